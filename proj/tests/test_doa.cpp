#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <hankelmc/doa.hpp>
#include <hankelmc/errors.hpp>
#include <hankelmc/lp_solver.hpp>
#include <hankelmc/sim_model.hpp>

#include "support.hpp"

using namespace hankelmc;

namespace
{

constexpr double kDeg = std::numbers::pi / 180.0;

/// Normalized single-source ULA response |a(t)^H a(t0)|^2 / N^2, summed
/// term by term.
double ula_response(double t_deg, double t0_deg, int n)
{
    Complex acc(0.0, 0.0);
    for (int k = 0; k < n; ++k) {
        acc += std::polar(1.0, std::numbers::pi * k *
                                   (std::sin(t0_deg * kDeg) - std::sin(t_deg * kDeg)));
    }
    return std::norm(acc) / (static_cast<double>(n) * n);
}

SpatialSpectrum synthetic(const std::vector<double>& angles,
                          const std::function<double(double)>& f)
{
    SpatialSpectrum s;
    s.angles = angles;
    for (double a : angles) {
        s.values.push_back(f(a));
    }
    return s;
}

} // namespace

TEST_CASE("angle grid")
{
    const auto grid = angle_grid();
    REQUIRE(grid.size() == 1799);
    CHECK(grid.front() == doctest::Approx(-89.9));
    CHECK(grid.back() == doctest::Approx(89.9));
    CHECK_THROWS_AS(angle_grid(0.0), ValidationError);
}

TEST_CASE("sample covariance")
{
    CHECK(sample_covariance(MatrixXc::Zero(4, 3)).isZero());

    Rng rng(1);
    const VectorXc d = test::random_complex(5, 1, rng);
    const MatrixXc c = sample_covariance(d);
    CHECK((c - d * d.adjoint()).norm() < 1e-14);

    const std::vector<double> angles{-20.0, 30.0};
    const MatrixXc A = build_steering_matrix(angles, 8);
    const MatrixXc S = sample_signal(2, 10000, rng);
    const MatrixXc C = sample_covariance(A * S);
    const MatrixXc expected = A * A.adjoint();
    CHECK((C - expected).norm() < 0.05 * expected.norm());
}

TEST_CASE("Bartlett spectrum basics")
{
    const auto grid = angle_grid();
    SUBCASE("matched steering")
    {
        const VectorXc a = steering_vector(23.456, 12);
        const auto s     = bartlett_spectrum(a * a.adjoint(), grid);
        const auto best  = std::max_element(s.values.begin(), s.values.end()) - s.values.begin();
        CHECK(s.angles[static_cast<std::size_t>(best)] == doctest::Approx(23.5));
        CHECK(s.values[static_cast<std::size_t>(best)] == 1.0);
    }
    SUBCASE("white field is flat")
    {
        const auto s = bartlett_spectrum(MatrixXc::Identity(10, 10), grid);
        for (double v : s.values) {
            CHECK(std::abs(v - 1.0) < 1e-12);
        }
    }
    SUBCASE("first-null beamwidth at broadside")
    {
        const VectorXc a = steering_vector(0.0, 20);
        const auto s     = bartlett_spectrum(a * a.adjoint(), angle_grid(0.01));
        const auto peak  = static_cast<std::size_t>(
            std::max_element(s.values.begin(), s.values.end()) - s.values.begin());
        std::size_t lo = peak, hi = peak;
        while (s.values[lo - 1] < s.values[lo]) {
            --lo;
        }
        while (s.values[hi + 1] < s.values[hi]) {
            ++hi;
        }
        const double width    = s.angles[hi] - s.angles[lo];
        const double expected = 2.0 * std::asin(2.0 / 20.0) / kDeg;
        CHECK(expected == doctest::Approx(11.48).epsilon(1e-3));
        CHECK(std::abs(width - expected) < 0.05);
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(bartlett_spectrum(MatrixXc::Zero(4, 4), grid), ValidationError);
        CHECK_THROWS_AS(bartlett_spectrum(MatrixXc::Identity(4, 3), grid), ValidationError);
    }
}

TEST_CASE("spectrum properties")
{
    const auto grid = angle_grid(0.5);
    Rng rng(2);
    for (int rep = 0; rep < 10; ++rep) {
        const MatrixXc d = test::random_complex(8, 20, rng);
        const MatrixXc c = sample_covariance(d);
        const auto s     = bartlett_spectrum(c, grid);
        CHECK(*std::max_element(s.values.begin(), s.values.end()) == 1.0);

        const auto scaled = bartlett_spectrum(7.5 * c, grid);
        const auto a = pick_peaks(scaled, 2).angles;
        const auto b = pick_peaks(s, 2).angles;
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(std::abs(a[k] - b[k]) < 1e-9);
        }

        const MatrixXc real_c = c.real().cast<Complex>();
        const auto sym        = bartlett_spectrum(real_c, grid);
        for (std::size_t i = 0; i < sym.size(); ++i) {
            CHECK(std::abs(sym.values[i] - sym.values[sym.size() - 1 - i]) < 1e-12);
        }
    }
}

TEST_CASE("peak picking")
{
    const auto grid = angle_grid();
    SUBCASE("single delta-like peak")
    {
        const auto s = synthetic(grid, [](double a) {
            return std::abs(a - 10.0) < 0.05 ? 1.0 : 0.01;
        });
        const auto est = pick_peaks(s, 1);
        REQUIRE(est.angles.size() == 1);
        CHECK(std::abs(est.angles[0] - 10.0) <= 0.1);
    }
    SUBCASE("two equal peaks are sorted")
    {
        const auto s = synthetic(grid, [](double a) {
            return ula_response(a, -30.0, 20) + ula_response(a, 30.0, 20);
        });
        const auto est = pick_peaks(s, 2);
        REQUIRE(est.angles.size() == 2);
        CHECK(est.angles[0] == doctest::Approx(-30.0).epsilon(1e-4));
        CHECK(est.angles[1] == doctest::Approx(30.0).epsilon(1e-4));
        CHECK_FALSE(est.padded);
    }
    SUBCASE("parabolic refinement is exact on a parabola")
    {
        const auto s = synthetic(grid, [](double a) {
            return 1.0 - (a - 10.05) * (a - 10.05) / 1e5;
        });
        const auto est = pick_peaks(s, 1);
        CHECK(std::abs(est.angles[0] - 10.05) < 1e-6);
    }
    SUBCASE("flat tops count once")
    {
        SpatialSpectrum s;
        s.angles = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0};
        s.values = {0.1, 0.5, 0.5, 0.5, 0.2, 0.9, 0.9, 1.0};
        CHECK(local_maxima(s) == std::vector<std::size_t>{2});
    }
    SUBCASE("too few maxima are padded")
    {
        const auto s   = synthetic(grid, [](double a) { return ula_response(a, 0.0, 2); });
        const auto est = pick_peaks(s, 2);
        CHECK(est.padded);
        CHECK(est.angles.size() == 2);
        CHECK(std::is_sorted(est.angles.begin(), est.angles.end()));
    }
}

TEST_CASE("DOA error")
{
    const std::vector<double> truth{-20.0, 30.0};
    std::vector<DoaEstimate> exact(10, DoaEstimate{truth, false});
    CHECK(rmse_theta(exact, truth) == 0.0);

    const std::vector<double> one{5.0};
    std::vector<DoaEstimate> off(100, DoaEstimate{{6.0}, false});
    CHECK(rmse_theta(off, one) == doctest::Approx(1.0).epsilon(1e-14));

    std::vector<DoaEstimate> half(50, DoaEstimate{truth, false});
    half.insert(half.end(), 50, DoaEstimate{{-18.0, 30.0}, false});
    CHECK(rmse_theta(half, truth) == doctest::Approx(1.0).epsilon(1e-14));

    // Pairing is by sorted order, whatever order the estimate arrives in.
    std::vector<DoaEstimate> swapped(1, DoaEstimate{{30.0, -20.0}, false});
    CHECK(rmse_theta(swapped, truth) == 0.0);
}

TEST_CASE("beam metrics of a single source")
{
    const auto grid  = angle_grid(0.01);
    const VectorXc a = steering_vector(0.0, 20);
    const auto s     = bartlett_spectrum(a * a.adjoint(), grid);
    const std::vector<double> truth{0.0};
    const BeamMetrics bm = beam_metrics(s, truth, 20, 1);

    // Half-power half-width by bisection on the exact response.
    double lo = 0.0, hi = 5.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ula_response(mid, 0.0, 20) > 0.5 ? lo : hi) = mid;
    }
    CHECK(bm.beamwidth_3db == doctest::Approx(2.0 * lo).epsilon(1e-3));
    // First sidelobe lies between the first and second nulls.
    double side = 0.0;
    for (double t = std::asin(0.1) / kDeg; t < std::asin(0.2) / kDeg; t += 1e-4) {
        side = std::max(side, ula_response(t, 0.0, 20));
    }
    CHECK(bm.peak_sidelobe_db == doctest::Approx(10.0 * std::log10(side)).epsilon(1e-3));
    CHECK(bm.spurious_peaks == 0);
}

TEST_CASE("l1 pipeline resolves both sources")
{
    const auto grid = angle_grid();
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        ScenarioConfig c;
        c.rng_seed          = 7000 + seed;
        const Measurement m = generate_scenario(c);
        SolverOptions o;
        o.rng_seed       = seed;
        const auto est   = estimate_doa(complete(m, o), 2, grid);
        bool ok          = est.angles.size() == 2;
        for (std::size_t p = 0; ok && p < 2; ++p) {
            ok = std::abs(est.angles[p] - c.dir_angles[p]) < 1.0;
        }
        hits += ok ? 1 : 0;
    }
    CHECK(hits >= 95);
}

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include <Eigen/LU>
#include <Eigen/QR>

#include <hankelmc/errors.hpp>
#include <hankelmc/hankel.hpp>
#include <hankelmc/lp_solver.hpp>
#include <hankelmc/metrics.hpp>
#include <hankelmc/sim_model.hpp>

#include "support.hpp"

using namespace hankelmc;

namespace
{

/// Rank-1 least-squares fit of a fully observed 2 x n matrix by scanning
/// unit vectors u = (cos a, sin a e^{j phi}) on a 100 x 100 grid.
double grid_rank1_objective(const MatrixXc& z)
{
    double best = std::numeric_limits<double>::infinity();
    const int steps = 100;
    for (int ia = 0; ia < steps; ++ia) {
        const double a = (ia + 0.5) * (std::numbers::pi / 2.0) / steps;
        for (int ip = 0; ip < steps; ++ip) {
            const double phi = ip * 2.0 * std::numbers::pi / steps;
            Eigen::Vector2cd u(std::cos(a), std::sin(a) * std::polar(1.0, phi));
            // Best v for fixed unit u: v = u^H z; residual = ||z||^2 - ||u^H z||^2.
            const double f = z.squaredNorm() - (u.adjoint() * z).squaredNorm();
            best = std::min(best, f);
        }
    }
    return best;
}

/// Fully observed lifted pattern of the given size.
LiftedMask full_mask(Index rows, Index cols)
{
    LiftedMask lm;
    lm.shape = HankelShape::from_lifted(rows, cols, rows);
    lm.omega = Mask::Constant(rows, cols, true);
    lm.col_sets.assign(static_cast<std::size_t>(cols), std::vector<Index>(rows));
    lm.row_sets.assign(static_cast<std::size_t>(rows), std::vector<Index>(cols));
    for (auto& s : lm.col_sets) {
        std::iota(s.begin(), s.end(), Index{0});
    }
    for (auto& s : lm.row_sets) {
        std::iota(s.begin(), s.end(), Index{0});
    }
    return lm;
}

SolverOptions l2_options(int iters = 10)
{
    SolverOptions o;
    o.p           = Norm::L2;
    o.outer_iters = iters;
    return o;
}

Measurement noiseless(std::uint64_t seed, double fraction)
{
    ScenarioConfig c;
    c.ssr_db           = std::numeric_limits<double>::infinity();
    c.failure_fraction = fraction;
    c.rng_seed         = seed;
    return generate_scenario(c);
}

Mask worked_mask()
{
    Mask b = Mask::Constant(3, 4, true);
    b.col(1).setConstant(false);
    return b;
}

} // namespace

TEST_CASE("real embedding")
{
    Eigen::VectorXcd b(3);
    b << 1.0, -2.0, 3.5;
    const auto e = embed_real(b, MatrixXc::Identity(3, 2));
    Eigen::VectorXd expected(6);
    expected << 1.0, -2.0, 3.5, 0.0, 0.0, 0.0;
    CHECK(e.b == expected);

    const MatrixXc G = Complex(0.0, 1.0) * MatrixXc::Identity(2, 2);
    Eigen::MatrixXd E(4, 4);
    E << 0, 0, -1, 0,
         0, 0, 0, -1,
         1, 0, 0, 0,
         0, 1, 0, 0;
    CHECK(embed_real(VectorXc::Zero(2), G).G == E);

    Eigen::VectorXd stacked(4);
    stacked << 1.0, 2.0, 3.0, 4.0;
    const VectorXc z = recombine(stacked);
    CHECK(z(0) == Complex(1.0, 3.0));
    CHECK(z(1) == Complex(2.0, 4.0));
}

TEST_CASE("least-squares subproblem hand cases")
{
    MatrixXc G = MatrixXc::Ones(3, 1);
    VectorXc b(3);
    b << 1.0, 2.0, 3.0;
    CHECK(std::abs(solve_ls_subproblem(b, G).v(0) - Complex(2.0, 0.0)) < 1e-14);
    CHECK(solve_ls_subproblem(VectorXc::Zero(3), G).v.norm() == 0.0);

    Rng rng(1);
    const MatrixXc Gs = test::random_complex(4, 4, rng);
    const VectorXc vs = test::random_complex(4, 1, rng);
    const auto sol    = solve_ls_subproblem(Gs * vs, Gs);
    CHECK((sol.v - vs).norm() <= 1e-12 * vs.norm());
    CHECK_FALSE(sol.degenerate);
}

TEST_CASE("least-squares subproblem matches the complex pseudoinverse")
{
    Rng rng(2);
    for (int rep = 0; rep < 1000; ++rep) {
        const Index r = 1 + static_cast<Index>(rng.uniform_index(4));
        const Index q = r + 1 + static_cast<Index>(rng.uniform_index(10));
        const MatrixXc G = test::random_complex(q, r, rng);
        const VectorXc b = test::random_complex(q, 1, rng);
        const VectorXc oracle = G.completeOrthogonalDecomposition().pseudoInverse() * b;
        const VectorXc v      = solve_ls_subproblem(b, G).v;
        REQUIRE((v - oracle).norm() <= 1e-10 * oracle.norm());
    }
}

TEST_CASE("rank-deficient least squares returns the minimum-norm solution")
{
    MatrixXc G(3, 2);
    G << 1.0, 2.0, 1.0, 2.0, 1.0, 2.0;
    VectorXc b(3);
    b << 1.0, 2.0, 3.0;
    const auto sol = solve_ls_subproblem(b, G);
    CHECK(sol.degenerate);
    const VectorXc oracle = G.completeOrthogonalDecomposition().pseudoInverse() * b;
    CHECK((sol.v - oracle).norm() < 1e-10);
}

TEST_CASE("weighted least squares")
{
    Rng rng(3);
    const MatrixXc G = test::random_complex(8, 2, rng);
    const VectorXc b = test::random_complex(8, 1, rng);
    Eigen::VectorXd w = Eigen::VectorXd::Ones(8);
    CHECK((solve_weighted_ls(b, G, w).v - solve_ls_subproblem(b, G).v).norm() < 1e-12);

    // Scaling rows by sqrt(w) reduces to ordinary least squares.
    for (Index i = 0; i < 8; ++i) {
        w(i) = 0.1 + i;
    }
    const Eigen::VectorXd s = w.cwiseSqrt();
    const VectorXc oracle =
        solve_ls_subproblem(s.cast<Complex>().asDiagonal() * b,
                            s.cast<Complex>().asDiagonal() * G).v;
    CHECK((solve_weighted_ls(b, G, w).v - oracle).norm() < 1e-12);
}

TEST_CASE("l1 subproblem hand cases")
{
    MatrixXc G = MatrixXc::Ones(3, 1);
    VectorXc b(3);
    b << 1.0, 2.0, 100.0;
    CHECK(std::abs(solve_l1_subproblem(b, G, 20, 1e-6).v(0) - Complex(2.0, 0.0)) < 0.05);

    Rng rng(4);
    const MatrixXc Gc = test::random_complex(6, 2, rng);
    const VectorXc vc = test::random_complex(2, 1, rng);
    CHECK((solve_l1_subproblem(Gc * vc, Gc, 20, 1e-6).v - vc).norm() < 1e-12);

    const VectorXc bc = test::random_complex(6, 1, rng);
    const Complex alpha(3.0, 4.0);
    const VectorXc v1 = solve_l1_subproblem(bc, Gc, 20, 1e-6).v;
    const VectorXc v3 = solve_l1_subproblem(alpha * bc, Gc, 20, 1e-6 * std::abs(alpha)).v;
    CHECK((v3 - alpha * v1).norm() <= 1e-6 * std::abs(alpha) * v1.norm());

    CHECK_THROWS_AS(solve_l1_subproblem(b, G, 20, 0.0), DomainError);
}

TEST_CASE("l1 subproblem matches the weighted median")
{
    Rng rng(5);
    for (int rep = 0; rep < 1000; ++rep) {
        const Index q = 3 + static_cast<Index>(rng.uniform_index(12));
        const Eigen::VectorXd g = test::random_real(q, 1, rng);
        Eigen::VectorXd b       = test::random_real(q, 1, rng);
        if (rep % 3 == 0) {
            b(0) *= 100.0;
        }
        const double oracle = test::weighted_median(b, g);
        const VectorXc v =
            solve_l1_subproblem(b.cast<Complex>(), g.cast<Complex>(), 20, 1e-6).v;
        REQUIRE(std::abs(v(0) - Complex(oracle, 0.0)) < 1e-3);
    }
}

TEST_CASE("lp cost")
{
    VectorXc r(2);
    r << Complex(3.0, 4.0), Complex(0.0, -1.0);
    CHECK(lp_cost(r, Norm::L1) == doctest::Approx(6.0));
    CHECK(lp_cost(r, Norm::L2) == doctest::Approx(26.0));
}

TEST_CASE("column and row updates")
{
    Rng rng(6);
    SUBCASE("fully observed consistent data recovers the factors")
    {
        const MatrixXc U = test::random_complex(8, 2, rng);
        const MatrixXc V = test::random_complex(2, 5, rng);
        const MatrixXc z = U * V;
        const LiftedMask full = full_mask(8, 5);
        const SolverOptions o = l2_options();
        CHECK((update_V(z, full, U, o).factor - V).norm() < 1e-10 * V.norm());

        const Eigen::Matrix2cd W = test::random_complex(2, 2, rng);
        const MatrixXc Vw        = W.inverse() * V;
        const MatrixXc Uhat      = update_U(z, full, Vw, o).factor;
        CHECK((Uhat * Vw - z).norm() < 1e-10 * z.norm());
    }
    SUBCASE("only observed entries of a column are used")
    {
        const LiftedMask lm = lift_mask(worked_mask(), 2);
        const MatrixXc U    = test::random_complex(6, 1, rng);
        MatrixXc z          = test::random_complex(6, 3, rng);
        const double nan    = std::numeric_limits<double>::quiet_NaN();
        for (Index i = 0; i < 6; ++i) {
            for (Index j = 0; j < 3; ++j) {
                if (!lm.omega(i, j)) {
                    z(i, j) = Complex(nan, nan);
                }
            }
        }
        const SolverOptions o = [] {
            SolverOptions s = l2_options();
            s.rank          = 1;
            return s;
        }();
        const MatrixXc V = update_V(z, lm, U, o).factor;
        REQUIRE(V.allFinite());
        const std::vector<Index> rows{0, 1, 2};
        const VectorXc oracle =
            solve_ls_subproblem(z(rows, 0), U(rows, Eigen::all)).v;
        CHECK(std::abs(V(0, 0) - oracle(0)) < 1e-14);

        const MatrixXc Unew = update_U(z, lm, V, o).factor;
        REQUIRE(Unew.allFinite());
        const std::vector<Index> cols{1, 2};
        const VectorXc row_oracle = solve_ls_subproblem(
            z(3, cols).transpose(), V(Eigen::all, cols).transpose()).v;
        CHECK(std::abs(Unew(3, 0) - row_oracle(0)) < 1e-14);
    }
}

TEST_CASE("each sweep does not increase the objective")
{
    for (Norm p : {Norm::L2, Norm::L1}) {
        CAPTURE(to_string(p));
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            ScenarioConfig c;
            c.rng_seed          = seed;
            const Measurement m = generate_scenario(c);
            const LiftedMask lm = lift_mask(m.mask, 0);
            const MatrixXc z    = lift(m.data, lm.shape.n1);
            SolverOptions o;
            o.p = p;
            MatrixXc U = initial_factor(z.rows(), 2, seed);
            MatrixXc V = update_V(z, lm, U, o).factor;
            double f   = objective(z, lm, U, V, p);
            for (int k = 0; k < 5; ++k) {
                U = update_U(z, lm, V, o, U).factor;
                const double fu = objective(z, lm, U, V, p);
                CHECK(fu <= f * (1.0 + 1e-12));
                V = update_V(z, lm, U, o, V).factor;
                const double fv = objective(z, lm, U, V, p);
                CHECK(fv <= fu * (1.0 + 1e-12));
                f = fv;
            }
        }
    }
}

TEST_CASE("objective is gauge invariant")
{
    Rng rng(7);
    const LiftedMask lm = lift_mask(worked_mask(), 2);
    const MatrixXc z    = test::random_complex(6, 3, rng);
    const MatrixXc U    = test::random_complex(6, 2, rng);
    const MatrixXc V    = test::random_complex(2, 3, rng);
    const MatrixXc W    = test::random_complex(2, 2, rng);
    for (Norm p : {Norm::L1, Norm::L2}) {
        CHECK(objective(z, lm, U * W, W.inverse() * V, p) ==
              doctest::Approx(objective(z, lm, U, V, p)).epsilon(1e-12));
    }
}

TEST_CASE("alternating minimization on exact rank-2 data")
{
    Rng rng(8);
    const MatrixXc z = test::random_complex(12, 2, rng) * test::random_complex(2, 7, rng);
    const auto result = alternate_minimize(z, full_mask(12, 7), l2_options(3));
    CHECK(result.report.objective.back() < 1e-20);
    CHECK((result.factors.product() - z).norm() < 1e-10 * z.norm());
}

TEST_CASE("rank-1 alternating minimization matches a brute-force grid fit")
{
    Rng rng(9);
    for (int rep = 0; rep < 5; ++rep) {
        // A 1 x 7 data matrix lifts to a fully observed 2 x 6 Hankel matrix.
        const MatrixXc x = test::random_complex(1, 7, rng);
        const LiftedMask lm = lift_mask(Mask::Constant(1, 7, true), 2);
        const MatrixXc z    = lift(x, 2);
        SolverOptions o     = l2_options(200);
        o.rank              = 1;
        o.rel_tol           = 1e-14;
        o.rng_seed          = static_cast<std::uint64_t>(rep);
        const auto result   = alternate_minimize(z, lm, o);
        const double als    = result.report.objective.back();
        const double grid   = grid_rank1_objective(z);
        CHECK(std::abs(als - grid) <= 0.01 * grid);
        CHECK(als <= grid * (1.0 + 1e-9));
    }
}

TEST_CASE("noiseless completion")
{
    SUBCASE("no failures")
    {
        const Measurement m = noiseless(21, 0.0);
        CHECK(nrmse(complete(m, l2_options()), m.truth) < 1e-8);
    }
    SUBCASE("one failed channel")
    {
        ScenarioConfig c;
        c.ssr_db            = std::numeric_limits<double>::infinity();
        c.failure_fraction  = 0.05;
        c.rng_seed          = 22;
        const Measurement m = generate_scenario(c);
        REQUIRE(m.mask.count() == 19 * 100);
        SolverOptions o = l2_options(50);
        o.rel_tol       = 1e-12;
        CHECK(nrmse(complete(m, o), m.truth) < 1e-6);
    }
}

TEST_CASE("masked entries are never read")
{
    ScenarioConfig c;
    c.rng_seed      = 23;
    Measurement m   = generate_scenario(c);
    Measurement alt = m;
    Rng rng(24);
    for (Index i = 0; i < alt.data.size(); ++i) {
        if (!alt.mask(i)) {
            alt.data(i) = 1e6 * rng.complex_normal();
        }
    }
    for (Norm p : {Norm::L1, Norm::L2}) {
        SolverOptions o;
        o.p = p;
        const MatrixXc a = complete(m, o);
        const MatrixXc b = complete(alt, o);
        CHECK((a - b).norm() <= 1e-12 * a.norm());
    }
    const MatrixXc sa = sap_baseline(m.data, m.mask, 2, 10);
    const MatrixXc sb = sap_baseline(alt.data, alt.mask, 2, 10);
    CHECK((sa - sb).norm() <= 1e-12 * sa.norm());
}

TEST_CASE("completion is deterministic")
{
    ScenarioConfig c;
    c.rng_seed          = 25;
    const Measurement m = generate_scenario(c);
    SolverOptions o;
    o.rng_seed = 99;
    const LiftedMask lm = lift_mask(m.mask, 0);
    const MatrixXc z    = lift(m.data, lm.shape.n1);
    const auto a        = alternate_minimize(z, lm, o);
    const auto b        = alternate_minimize(z, lm, o);
    CHECK(a.factors.U == b.factors.U);
    CHECK(a.factors.V == b.factors.V);
    o.rng_seed = 100;
    CHECK(alternate_minimize(z, lm, o).factors.U != a.factors.U);
}

TEST_CASE("objective traces settle within ten iterations")
{
    std::vector<double> l1_change, l2_change;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        ScenarioConfig c;
        c.rng_seed          = 1000 + seed;
        const Measurement m = generate_scenario(c);
        for (Norm p : {Norm::L1, Norm::L2}) {
            SolverOptions o;
            o.p        = p;
            o.rel_tol  = 1e-300; // never stop early
            o.rng_seed = seed;
            const auto r = complete_with_report(m.data, m.mask, o);
            // An exactly repeated objective still ends the run.
            const auto& f = r.report.objective;
            REQUIRE(f.size() >= 2);
            const double change =
                std::abs(f.back() - f[f.size() - 2]) / f[f.size() - 2];
            (p == Norm::L1 ? l1_change : l2_change).push_back(change);
        }
    }
    CHECK(median(l1_change) < 0.05);
    CHECK(median(l2_change) < 0.05);
}

TEST_CASE("l1 is more robust to gross outliers than l2")
{
    std::vector<double> e1, e2;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Measurement m = noiseless(5000 + seed, 0.3);
        Rng rng(seed);
        for (Index i = 0; i < m.data.size(); ++i) {
            if (m.mask(i) && rng.uniform() < 0.05) {
                m.data(i) = 100.0 * rng.complex_normal();
            }
        }
        SolverOptions o;
        o.rng_seed = seed;
        o.p        = Norm::L1;
        e1.push_back(nrmse(complete(m, o), m.truth));
        o.p = Norm::L2;
        e2.push_back(nrmse(complete(m, o), m.truth));
    }
    CHECK(median(e1) < median(e2));
}

TEST_CASE("alternating projection baseline")
{
    SUBCASE("exact after one round on fully observed rank-r data")
    {
        const Measurement m = noiseless(31, 0.0);
        const auto r        = sap_with_report(m.data, m.mask, 2, 1);
        CHECK(nrmse(r.estimate, m.truth) < 1e-12);
        CHECK(r.report.objective[0] < 1e-20 * m.truth.squaredNorm());
    }
    SUBCASE("data misfit does not increase on noiseless data")
    {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const Measurement m = noiseless(40 + seed, 0.3);
            const auto r        = sap_with_report(m.data, m.mask, 2, 20);
            for (std::size_t k = 1; k < r.report.objective.size(); ++k) {
                CHECK(r.report.objective[k] <=
                      r.report.objective[k - 1] * (1.0 + 1e-10));
            }
        }
    }
    SUBCASE("truncated svd")
    {
        Rng rng(32);
        const MatrixXc a = test::random_complex(6, 2, rng) * test::random_complex(2, 5, rng);
        CHECK((truncated_svd(a, 2) - a).norm() < 1e-12 * a.norm());
        CHECK(truncated_svd(a, 1).norm() < a.norm());
    }
}

TEST_CASE("structural errors")
{
    ScenarioConfig c;
    c.rng_seed    = 50;
    Measurement m = generate_scenario(c);
    // Observe only two of twenty channels' first snapshot rows.
    Mask sparse = Mask::Constant(100, 20, false);
    sparse.col(0).setConstant(true);
    SolverOptions o;
    CHECK_THROWS_AS(complete(m.data, sparse, o), StructuralError);
    CHECK_THROWS_AS(sap_baseline(m.data, sparse, 2, 5), StructuralError);
}

TEST_CASE("solver option validation")
{
    SolverOptions o;
    CHECK_NOTHROW(o.validate());
    SolverOptions bad = o;
    bad.rank          = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad              = o;
    bad.irls_epsilon = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad             = o;
    bad.outer_iters = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    CHECK(norm_from_string("L2") == Norm::L2);
    CHECK_THROWS_AS(norm_from_string("L3"), ValidationError);
}

#include <hankelmc/doa.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <hankelmc/errors.hpp>
#include <hankelmc/sim_model.hpp>

namespace hankelmc
{

std::vector<double> angle_grid(double step_deg)
{
    if (!(step_deg > 0.0 && step_deg < 90.0)) {
        throw ValidationError("angle grid step must lie in (0, 90) degrees");
    }
    std::vector<double> grid;
    for (int i = 1;; ++i) {
        const double a = -90.0 + i * step_deg;
        if (a >= 90.0 - 1e-9) {
            break;
        }
        grid.push_back(a);
    }
    return grid;
}

MatrixXc sample_covariance(const MatrixXc& data)
{
    if (data.cols() < 1) {
        throw ValidationError("sample_covariance: no snapshots");
    }
    return data * data.adjoint() / static_cast<double>(data.cols());
}

SpatialSpectrum bartlett_spectrum(const MatrixXc& covariance,
                                  std::span<const double> grid)
{
    const Index n = covariance.rows();
    if (n < 1 || covariance.cols() != n) {
        throw ValidationError("bartlett_spectrum: covariance must be square");
    }
    if (grid.empty()) {
        throw ValidationError("bartlett_spectrum: empty grid");
    }
    if (covariance.cwiseAbs().maxCoeff() == 0.0) {
        throw ValidationError("bartlett_spectrum: zero covariance");
    }
    const MatrixXc steering = build_steering_matrix(grid, n);
    const MatrixXc weighted = covariance * steering;

    SpatialSpectrum out;
    out.angles.assign(grid.begin(), grid.end());
    out.values.resize(grid.size());
    const double n2 = static_cast<double>(n * n);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto col    = static_cast<Index>(g);
        const double power =
            steering.col(col).dot(weighted.col(col)).real() / n2;
        out.values[g] = std::max(power, 0.0);
    }
    const double peak = *std::max_element(out.values.begin(), out.values.end());
    if (!(peak > 0.0)) {
        throw ValidationError("bartlett_spectrum: spectrum vanishes on grid");
    }
    for (double& v : out.values) {
        v /= peak;
    }
    return out;
}

std::vector<std::size_t> local_maxima(const SpatialSpectrum& spectrum)
{
    std::vector<std::size_t> peaks;
    const auto& v = spectrum.values;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) {
            continue;
        }
        // A flat top of equal samples counts once, at its centre (left of
        // centre for even widths, which the parabolic fit then corrects).
        std::size_t j = i;
        while (j + 1 < v.size() && v[j + 1] == v[i]) {
            ++j;
        }
        if (j + 1 < v.size() && v[j + 1] < v[i]) {
            peaks.push_back(i + (j - i) / 2);
        }
        i = j;
    }
    return peaks;
}

namespace
{

double refine_peak(const SpatialSpectrum& s, std::size_t i)
{
    if (i == 0 || i + 1 >= s.size()) {
        return s.angles[i];
    }
    const double left  = s.values[i - 1];
    const double mid   = s.values[i];
    const double right = s.values[i + 1];
    const double denom = left - 2.0 * mid + right;
    if (!(denom < 0.0)) {
        return s.angles[i];
    }
    const double offset =
        std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
    const double step = 0.5 * (s.angles[i + 1] - s.angles[i - 1]);
    return s.angles[i] + offset * step;
}

std::vector<std::size_t> by_value_desc(const SpatialSpectrum& s,
                                       std::vector<std::size_t> idx)
{
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return s.values[a] > s.values[b];
    });
    return idx;
}

} // namespace

DoaEstimate pick_peaks(const SpatialSpectrum& spectrum, std::size_t r)
{
    if (spectrum.size() == 0) {
        throw ValidationError("pick_peaks: empty spectrum");
    }
    if (r < 1) {
        throw ValidationError("pick_peaks: r must be positive");
    }
    DoaEstimate out;
    const auto peaks = by_value_desc(spectrum, local_maxima(spectrum));
    std::vector<bool> used(spectrum.size(), false);
    for (std::size_t k = 0; k < peaks.size() && out.angles.size() < r; ++k) {
        out.angles.push_back(refine_peak(spectrum, peaks[k]));
        used[peaks[k]] = true;
    }
    if (out.angles.size() < r) {
        out.padded = true;
        std::vector<std::size_t> all(spectrum.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        for (std::size_t i : by_value_desc(spectrum, std::move(all))) {
            if (out.angles.size() == r) {
                break;
            }
            if (!used[i]) {
                out.angles.push_back(spectrum.angles[i]);
                used[i] = true;
            }
        }
    }
    std::sort(out.angles.begin(), out.angles.end());
    return out;
}

DoaEstimate estimate_doa(const MatrixXc& data, std::size_t r,
                         std::span<const double> grid)
{
    return pick_peaks(bartlett_spectrum(sample_covariance(data), grid), r);
}

double rmse_theta(std::span<const DoaEstimate> estimates,
                  std::span<const double> truth)
{
    if (estimates.empty() || truth.empty()) {
        throw ValidationError("rmse_theta: no trials or no true angles");
    }
    std::vector<double> sorted_truth(truth.begin(), truth.end());
    std::sort(sorted_truth.begin(), sorted_truth.end());
    double acc = 0.0;
    for (const DoaEstimate& e : estimates) {
        if (e.angles.size() != sorted_truth.size()) {
            throw ValidationError("rmse_theta: estimate has " +
                                  std::to_string(e.angles.size()) +
                                  " angles, expected " +
                                  std::to_string(sorted_truth.size()));
        }
        std::vector<double> est = e.angles;
        std::sort(est.begin(), est.end());
        for (std::size_t p = 0; p < est.size(); ++p) {
            const double d = est[p] - sorted_truth[p];
            acc += d * d;
        }
    }
    const double count =
        static_cast<double>(estimates.size() * sorted_truth.size());
    return std::sqrt(acc / count);
}

namespace
{

// Linear interpolation of the angle where the spectrum crosses `level`
// between samples i and j.
double crossing(const SpatialSpectrum& s, std::size_t i, std::size_t j,
                double level)
{
    const double vi = s.values[i];
    const double vj = s.values[j];
    if (vi == vj) {
        return s.angles[i];
    }
    const double t = (level - vi) / (vj - vi);
    return s.angles[i] + t * (s.angles[j] - s.angles[i]);
}

// Extent of the lobe around peak i: walk downhill to the nearest minimum.
std::pair<std::size_t, std::size_t> lobe_extent(const SpatialSpectrum& s,
                                                std::size_t i)
{
    std::size_t lo = i;
    while (lo > 0 && s.values[lo - 1] <= s.values[lo]) {
        --lo;
    }
    std::size_t hi = i;
    while (hi + 1 < s.size() && s.values[hi + 1] <= s.values[hi]) {
        ++hi;
    }
    return {lo, hi};
}

} // namespace

BeamMetrics beam_metrics(const SpatialSpectrum& spectrum,
                         std::span<const double> truth_deg, Index n_sensors,
                         std::size_t r)
{
    if (spectrum.size() < 3) {
        throw ValidationError("beam_metrics: spectrum too short");
    }
    const auto& v = spectrum.values;
    BeamMetrics out;

    const auto top = static_cast<std::size_t>(
        std::max_element(v.begin(), v.end()) - v.begin());
    const double half = 0.5 * v[top];
    std::size_t lo = top;
    while (lo > 0 && v[lo] >= half) {
        --lo;
    }
    std::size_t hi = top;
    while (hi + 1 < v.size() && v[hi] >= half) {
        ++hi;
    }
    const double left =
        v[lo] < half ? crossing(spectrum, lo, lo + 1, half) : spectrum.angles[lo];
    const double right =
        v[hi] < half ? crossing(spectrum, hi - 1, hi, half) : spectrum.angles[hi];
    out.beamwidth_3db = right - left;

    const auto peaks = by_value_desc(spectrum, local_maxima(spectrum));
    std::vector<std::pair<std::size_t, std::size_t>> lobes;
    lobes.push_back(lobe_extent(spectrum, top));
    for (std::size_t k = 0; k < peaks.size() && k < r; ++k) {
        lobes.push_back(lobe_extent(spectrum, peaks[k]));
    }
    double sidelobe = 0.0;
    for (std::size_t i : peaks) {
        const bool in_main = std::any_of(
            lobes.begin(), lobes.end(),
            [&](const auto& l) { return i >= l.first && i <= l.second; });
        if (!in_main) {
            sidelobe = std::max(sidelobe, v[i]);
        }
    }
    out.peak_sidelobe_db = sidelobe > 0.0
                               ? 10.0 * std::log10(sidelobe / v[top])
                               : -std::numeric_limits<double>::infinity();

    const double null_halfwidth = 2.0 / static_cast<double>(n_sensors);
    const auto sin_deg = [](double a) {
        return std::sin(a * std::numbers::pi / 180.0);
    };
    for (std::size_t i : peaks) {
        if (v[i] <= 0.1 * v[top]) {
            continue;
        }
        const double s = sin_deg(spectrum.angles[i]);
        const bool near_truth =
            std::any_of(truth_deg.begin(), truth_deg.end(), [&](double t) {
                return std::abs(s - sin_deg(t)) <= null_halfwidth;
            });
        if (!near_truth) {
            ++out.spurious_peaks;
        }
    }
    return out;
}

} // namespace hankelmc

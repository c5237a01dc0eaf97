#include <hankelmc/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <hankelmc/errors.hpp>

namespace hankelmc
{

double nrmse(const MatrixXc& estimate, const MatrixXc& truth)
{
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
        throw ValidationError("nrmse: shape mismatch");
    }
    const double denom = truth.norm();
    if (!(denom > 0.0)) {
        throw ValidationError("nrmse: ground truth is zero");
    }
    return (estimate - truth).norm() / denom;
}

double aggregate_nrmse(std::span<const double> ratios)
{
    if (ratios.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double acc = 0.0;
    for (double r : ratios) {
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(ratios.size()));
}

double median(std::span<const double> values)
{
    if (values.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace hankelmc

///
/// \file metrics.hpp
///
/// Recovery error measures.
///
#pragma once

#include <span>

#include <hankelmc/types.hpp>

namespace hankelmc
{

/// Default success threshold on the normalized recovery error.
inline constexpr double kRecoveryThreshold = 0.15;

/// ||estimate - truth||_F / ||truth||_F. Throws ValidationError on a shape
/// mismatch or an all-zero truth.
double nrmse(const MatrixXc& estimate, const MatrixXc& truth);

/// Trial succeeds iff its error is strictly below the threshold.
inline bool recovery_success(double error,
                             double threshold = kRecoveryThreshold)
{
    return error < threshold;
}

///
/// Aggregate over trials with the expectation inside the square root:
/// sqrt(mean(ratio^2)). Empty input gives NaN.
///
double aggregate_nrmse(std::span<const double> ratios);

/// Median (mean of the two middle values for even counts); NaN when empty.
double median(std::span<const double> values);

} // namespace hankelmc

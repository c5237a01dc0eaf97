///
/// \file types.hpp
///
/// Dense matrix aliases shared by every module.
///
#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Core>

namespace hankelmc
{

using Index   = Eigen::Index;
using Complex = std::complex<double>;

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using MatrixXc = Matrix<Complex>;
using VectorXc = Vector<Complex>;

/// Observation mask: `true` marks an observed entry.
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

} // namespace hankelmc

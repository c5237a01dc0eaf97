///
/// Shared helpers for the test suites.
///
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <hankelmc/random.hpp>
#include <hankelmc/types.hpp>

namespace hankelmc::test
{

inline MatrixXc random_complex(Index rows, Index cols, Rng& rng)
{
    MatrixXc m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            m(i, j) = rng.complex_normal();
        }
    }
    return m;
}

inline Eigen::MatrixXd random_real(Index rows, Index cols, Rng& rng)
{
    Eigen::MatrixXd m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            m(i, j) = rng.normal();
        }
    }
    return m;
}

/// Composite Simpson rule on [a, b] with `n` (even) panels.
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n)
{
    const double h = (b - a) / n;
    double acc     = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        acc += (i % 2 == 1 ? 4.0 : 2.0) * f(a + h * i);
    }
    return acc * h / 3.0;
}

/// Minimizer of sum_i |g_i| |b_i / g_i - v| over real v: the median of
/// the ratios b_i / g_i weighted by |g_i|.
inline double weighted_median(const Eigen::VectorXd& b, const Eigen::VectorXd& g)
{
    std::vector<std::pair<double, double>> pts;
    double total = 0.0;
    for (Index i = 0; i < b.size(); ++i) {
        pts.emplace_back(b(i) / g(i), std::abs(g(i)));
        total += std::abs(g(i));
    }
    std::sort(pts.begin(), pts.end());
    double acc = 0.0;
    for (const auto& [t, w] : pts) {
        acc += w;
        if (acc >= total / 2.0) {
            return t;
        }
    }
    return pts.back().first;
}

} // namespace hankelmc::test

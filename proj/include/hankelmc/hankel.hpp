///
/// \file hankel.hpp
///
/// Block-Hankel lift of an M x N data matrix and its averaging inverse.
///
/// For X = [x_1, ..., x_N] (columns x_j of length M) and n1 + n2 = N + 1,
///
///   lift(X) = [ x_1    x_2      ...  x_n2
///               x_2    x_3      ...  x_(n2+1)
///               ...
///               x_n1   x_(n1+1) ...  x_N    ]      ((M n1) x n2)
///
/// Block (k1, k2) holds column x_(k1+k2-1), so whole missing columns of X
/// turn into scattered missing entries of the lifted matrix. `unlift`
/// averages each block anti-diagonal back onto its source column, with
/// block stride M, and is an exact left inverse of `lift`.
///
#pragma once

#include <algorithm>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include <hankelmc/errors.hpp>
#include <hankelmc/types.hpp>

namespace hankelmc
{

/// Dimensions of a lift: data is rows x cols, lifted is (rows n1) x n2.
struct HankelShape
{
    Index rows = 0; ///< M
    Index cols = 0; ///< N
    Index n1   = 0;
    Index n2   = 0;

    /// floor(N / 2), clamped to at least 1.
    static Index default_n1(Index cols) { return std::max<Index>(1, cols / 2); }

    /// Validated shape; `n1 == 0` selects `default_n1(cols)`.
    static HankelShape make(Index rows, Index cols, Index n1 = 0)
    {
        if (rows < 1 || cols < 1) {
            throw ValidationError("HankelShape: data must be non-empty");
        }
        if (n1 == 0) {
            n1 = default_n1(cols);
        }
        if (n1 < 1 || n1 > cols) {
            throw ValidationError("HankelShape: n1 must lie in [1, N]");
        }
        return HankelShape{rows, cols, n1, cols + 1 - n1};
    }

    /// Recovers the shape from lifted dimensions and the block height M.
    static HankelShape from_lifted(Index lifted_rows, Index lifted_cols,
                                   Index rows)
    {
        if (rows < 1 || lifted_cols < 1 || lifted_rows < rows ||
            lifted_rows % rows != 0) {
            throw ValidationError("lifted matrix dimensions are not a "
                                  "multiple of the block height");
        }
        const Index n1 = lifted_rows / rows;
        return HankelShape{rows, n1 + lifted_cols - 1, n1, lifted_cols};
    }

    Index lifted_rows() const { return rows * n1; }
    Index lifted_cols() const { return n2; }

    /// Source column (0-based) of lifted entry (row, col).
    Index source_column(Index lifted_row, Index lifted_col) const
    {
        return lifted_row / rows + lifted_col;
    }

    friend bool operator==(const HankelShape&, const HankelShape&) = default;
};

namespace detail
{

template <typename Derived>
using DynamicPlain = std::conditional_t<
    std::is_base_of_v<Eigen::ArrayBase<Derived>, Derived>,
    Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>,
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>>;

} // namespace detail

///
/// Lifted matrix of `x` (M x N) with `n1` block rows. Works for matrices and
/// arrays of any scalar, including `bool` masks.
///
template <typename Derived>
detail::DynamicPlain<Derived> lift(const Eigen::DenseBase<Derived>& x,
                                   Index n1)
{
    if (n1 < 1) {
        throw ValidationError("lift: n1 must lie in [1, N]");
    }
    const auto shape = HankelShape::make(x.rows(), x.cols(), n1);
    const Index m = shape.rows;
    detail::DynamicPlain<Derived> z(shape.lifted_rows(), shape.n2);
    for (Index k2 = 0; k2 < shape.n2; ++k2) {
        for (Index k1 = 0; k1 < shape.n1; ++k1) {
            z.col(k2).segment(k1 * m, m) = x.col(k1 + k2);
        }
    }
    return z;
}

/// Anti-diagonal multiplicities w_j = min(j, n1, n2, N + 1 - j), 1-based j.
inline Eigen::VectorXi antidiagonal_weights(const HankelShape& shape)
{
    Eigen::VectorXi w(shape.cols);
    for (Index j = 0; j < shape.cols; ++j) {
        const Index w_j =
            std::min({j + 1, shape.n1, shape.n2, shape.cols - j});
        w(j) = static_cast<int>(w_j);
    }
    return w;
}

///
/// Anti-diagonal average of a lifted matrix back to rows x cols:
///
///   out(i, j) = (1 / w_j) * sum_{k1 + k2 = j} z(k1 M + i, k2)     (0-based)
///
template <typename Derived>
Matrix<typename Derived::Scalar> unlift(const Eigen::MatrixBase<Derived>& lifted,
                                        const HankelShape& shape)
{
    // Products and other lazy expressions are evaluated once.
    const auto& z = lifted.eval();
    if (z.rows() != shape.lifted_rows() || z.cols() != shape.n2 ||
        shape.n1 + shape.n2 != shape.cols + 1) {
        throw ValidationError("unlift: matrix does not match the Hankel shape");
    }
    using Scalar = typename Derived::Scalar;
    using Real   = typename Eigen::NumTraits<Scalar>::Real;
    const Index m = shape.rows;
    Matrix<Scalar> out = Matrix<Scalar>::Zero(m, shape.cols);
    for (Index k2 = 0; k2 < shape.n2; ++k2) {
        for (Index k1 = 0; k1 < shape.n1; ++k1) {
            out.col(k1 + k2) += z.col(k2).segment(k1 * m, m);
        }
    }
    const Eigen::VectorXi w = antidiagonal_weights(shape);
    for (Index j = 0; j < shape.cols; ++j) {
        out.col(j) /= static_cast<Real>(w(j));
    }
    return out;
}

///
/// Observation pattern of a lifted matrix together with the per-column
/// observed rows (`col_sets`) and per-row observed columns (`row_sets`),
/// both sorted and 0-based.
///
struct LiftedMask
{
    HankelShape shape;
    Mask omega;
    std::vector<std::vector<Index>> col_sets;
    std::vector<std::vector<Index>> row_sets;

    Index observed_count() const { return omega.count(); }

    /// Smallest observed count over columns (resp. rows).
    Index min_column_count() const;
    Index min_row_count() const;
};

inline Index LiftedMask::min_column_count() const
{
    Index best = shape.lifted_rows();
    for (const auto& s : col_sets) {
        best = std::min<Index>(best, static_cast<Index>(s.size()));
    }
    return best;
}

inline Index LiftedMask::min_row_count() const
{
    Index best = shape.n2;
    for (const auto& s : row_sets) {
        best = std::min<Index>(best, static_cast<Index>(s.size()));
    }
    return best;
}

///
/// Lifts the M x N observation mask and derives the index sets. Throws
/// StructuralError when a lifted column has no observed entry.
///
inline LiftedMask lift_mask(const Mask& mask, Index n1)
{
    LiftedMask out;
    out.shape = HankelShape::make(mask.rows(), mask.cols(), n1);
    out.omega = lift(mask, out.shape.n1);

    const Index rows = out.omega.rows();
    const Index cols = out.omega.cols();
    out.col_sets.resize(static_cast<std::size_t>(cols));
    out.row_sets.resize(static_cast<std::size_t>(rows));
    for (Index jj = 0; jj < cols; ++jj) {
        for (Index ii = 0; ii < rows; ++ii) {
            if (out.omega(ii, jj)) {
                out.col_sets[static_cast<std::size_t>(jj)].push_back(ii);
                out.row_sets[static_cast<std::size_t>(ii)].push_back(jj);
            }
        }
        if (out.col_sets[static_cast<std::size_t>(jj)].empty()) {
            throw StructuralError("lifted column " + std::to_string(jj) +
                                  " has no observed entry");
        }
    }
    return out;
}

} // namespace hankelmc

#include <hankelmc/lp_solver.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <hankelmc/errors.hpp>
#include <hankelmc/metrics.hpp>
#include <hankelmc/random.hpp>

namespace hankelmc
{

std::string to_string(Norm p)
{
    return p == Norm::L1 ? "L1" : "L2";
}

Norm norm_from_string(const std::string& name)
{
    if (name == "L1") {
        return Norm::L1;
    }
    if (name == "L2") {
        return Norm::L2;
    }
    throw ValidationError("unknown norm '" + name + "' (expected L1 or L2)");
}

void SolverOptions::validate() const
{
    if (rank < 1) {
        throw ValidationError("solver rank must be positive");
    }
    if (outer_iters < 1 || irls_iters < 1) {
        throw ValidationError("iteration counts must be positive");
    }
    if (!(irls_epsilon > 0.0) || !(rel_tol > 0.0)) {
        throw ValidationError("solver tolerances must be positive");
    }
    if (hankel_n1 < 0) {
        throw ValidationError("hankel_n1 must be >= 0");
    }
}

//------------------------------------------------------------------------------
// Subproblems
//------------------------------------------------------------------------------

namespace
{

constexpr double kPinvCutoff = 1e-10;

// |z| without the overflow guarding of hypot; inputs here are O(1).
inline double modulus(const Complex& z)
{
    return std::sqrt(std::norm(z));
}

template <typename Derived>
double sum_modulus(const Eigen::MatrixBase<Derived>& v)
{
    double acc = 0.0;
    for (Index i = 0; i < v.size(); ++i) {
        acc += modulus(v(i));
    }
    return acc;
}

template <typename Derived>
double max_modulus(const Eigen::MatrixBase<Derived>& v)
{
    double acc = 0.0;
    for (Index i = 0; i < v.size(); ++i) {
        acc = std::max(acc, modulus(v(i)));
    }
    return acc;
}

struct RealSolve
{
    Eigen::VectorXd x;
    bool degenerate = false;
};

// Minimum-norm solution of min ||b - G x||_2 over the reals.
RealSolve solve_real_ls(const Eigen::MatrixXd& G, const Eigen::VectorXd& b)
{
    const Index n = G.cols();
    if (G.rows() >= n && n > 0) {
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(G);
        const double r_max = std::abs(qr.matrixR()(0, 0));
        const double r_min = std::abs(qr.matrixR()(n - 1, n - 1));
        if (r_max > 0.0 && r_min > kPinvCutoff * r_max) {
            return {qr.solve(b), false};
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeThinU |
                                                 Eigen::ComputeThinV);
    svd.setThreshold(kPinvCutoff);
    return {svd.solve(b), svd.rank() < n};
}

// Real-embedded weighted least squares via the 2r x 2r normal equations,
// with the QR/SVD route as fallback when the Gram matrix is ill-conditioned.
RealSolve solve_real_weighted(const Eigen::MatrixXd& G,
                              const Eigen::VectorXd& b,
                              const Eigen::VectorXd& w)
{
    const Eigen::MatrixXd gram = G.transpose() * w.asDiagonal() * G;
    const Eigen::VectorXd rhs  = G.transpose() * w.cwiseProduct(b);
    const Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() == Eigen::Success) {
        const auto diag   = llt.matrixLLT().diagonal().cwiseAbs();
        const double dmax = diag.maxCoeff();
        // cond(gram) ~ (dmax / dmin)^2; 1e-6 keeps ~4 significant digits.
        if (dmax > 0.0 && diag.minCoeff() > 1e-6 * dmax) {
            return {llt.solve(rhs), false};
        }
    }
    const Eigen::VectorXd sw = w.cwiseSqrt();
    return solve_real_ls(sw.asDiagonal() * G, sw.cwiseProduct(b));
}

Eigen::VectorXd duplicate(const Eigen::VectorXd& w)
{
    Eigen::VectorXd out(2 * w.size());
    out << w, w;
    return out;
}

} // namespace

RealEmbedding embed_real(const Eigen::Ref<const VectorXc>& b,
                         const Eigen::Ref<const MatrixXc>& G)
{
    if (b.size() != G.rows()) {
        throw ValidationError("embed_real: b and G have different row counts");
    }
    const Index q = G.rows();
    const Index r = G.cols();
    RealEmbedding e;
    e.b.resize(2 * q);
    e.b << b.real(), b.imag();
    e.G.resize(2 * q, 2 * r);
    e.G.topLeftCorner(q, r)     = G.real();
    e.G.topRightCorner(q, r)    = -G.imag();
    e.G.bottomLeftCorner(q, r)  = G.imag();
    e.G.bottomRightCorner(q, r) = G.real();
    return e;
}

VectorXc recombine(const Eigen::Ref<const Eigen::VectorXd>& stacked)
{
    if (stacked.size() % 2 != 0) {
        throw ValidationError("recombine: odd length");
    }
    const Index r = stacked.size() / 2;
    VectorXc v(r);
    for (Index k = 0; k < r; ++k) {
        v(k) = Complex(stacked(k), stacked(r + k));
    }
    return v;
}

double lp_cost(const Eigen::Ref<const VectorXc>& residual, Norm p)
{
    return p == Norm::L1 ? sum_modulus(residual) : residual.squaredNorm();
}

SubproblemSolution solve_ls_subproblem(const Eigen::Ref<const VectorXc>& b,
                                       const Eigen::Ref<const MatrixXc>& G)
{
    const RealEmbedding e = embed_real(b, G);
    const RealSolve s     = solve_real_ls(e.G, e.b);
    return {recombine(s.x), s.degenerate};
}

SubproblemSolution solve_weighted_ls(const Eigen::Ref<const VectorXc>& b,
                                     const Eigen::Ref<const MatrixXc>& G,
                                     const Eigen::Ref<const Eigen::VectorXd>& w)
{
    if (w.size() != b.size()) {
        throw ValidationError("solve_weighted_ls: weight length mismatch");
    }
    const RealEmbedding e = embed_real(b, G);
    const RealSolve s     = solve_real_weighted(e.G, e.b, duplicate(w));
    return {recombine(s.x), s.degenerate};
}

namespace
{

/// Calls `visit` with every r-subset of {0, ..., n - 1}.
template <typename Visit>
void for_each_subset(Index n, Index r, Visit&& visit)
{
    std::vector<Index> pick(static_cast<std::size_t>(r));
    for (Index k = 0; k < r; ++k) {
        pick[static_cast<std::size_t>(k)] = k;
    }
    while (true) {
        visit(pick);
        Index k = r - 1;
        while (k >= 0 && pick[static_cast<std::size_t>(k)] == n - r + k) {
            --k;
        }
        if (k < 0) {
            return;
        }
        ++pick[static_cast<std::size_t>(k)];
        for (Index m = k + 1; m < r; ++m) {
            pick[static_cast<std::size_t>(m)] = pick[static_cast<std::size_t>(m - 1)] + 1;
        }
    }
}

///
/// IRLS approaches l1 minimizers that interpolate some rows (zero
/// residuals) only sublinearly. Try exact fits through r of the r + 4
/// smallest residuals and keep any that lowers the cost.
///
void polish_vertex(const Eigen::Ref<const VectorXc>& b,
                   const Eigen::Ref<const MatrixXc>& G, VectorXc& best,
                   double& best_cost)
{
    const Index q = G.rows();
    const Index r = G.cols();
    if (q <= r) {
        return;
    }
    const Index pool = std::min(q, r + 4);
    std::vector<Index> order(static_cast<std::size_t>(q));
    VectorXc residual(q);
    Eigen::VectorXd size(q);
    MatrixXc sub(r, r);
    VectorXc rhs(r);
    VectorXc candidate(r);
    Eigen::FullPivLU<MatrixXc> lu(r, r);

    // l1 cost of `candidate`, abandoned once it cannot beat the incumbent.
    const auto cost_below_best = [&](double& cost) {
        cost = 0.0;
        for (Index i = 0; i < q && cost < best_cost; ++i) {
            Complex fit = 0.0;
            for (Index k = 0; k < r; ++k) {
                fit += G(i, k) * candidate(k);
            }
            cost += modulus(b(i) - fit);
        }
        return cost < best_cost;
    };

    for (int round = 0; round < 8; ++round) {
        residual.noalias() = b - G * best;
        for (Index i = 0; i < q; ++i) {
            size(i) = modulus(residual(i));
        }
        std::iota(order.begin(), order.end(), Index{0});
        std::partial_sort(order.begin(), order.begin() + pool, order.end(),
                          [&](Index a, Index c) { return size(a) < size(c); });
        bool improved = false;
        for_each_subset(pool, r, [&](const std::vector<Index>& pick) {
            for (Index k = 0; k < r; ++k) {
                const Index row = order[static_cast<std::size_t>(pick[static_cast<std::size_t>(k)])];
                sub.row(k)      = G.row(row);
                rhs(k)          = b(row);
            }
            lu.compute(sub);
            if (lu.rank() < r) {
                return;
            }
            candidate = lu.solve(rhs);
            double cost = 0.0;
            if (cost_below_best(cost)) {
                best_cost = cost;
                best      = candidate;
                improved  = true;
            }
        });
        if (!improved) {
            return;
        }
    }
}

///
/// Exact line searches along each real coordinate of v (real and imaginary
/// part of every entry). Along a line the cost sum_i |c_i - t e_i| is
/// convex and minimized inside the hull of the per-row projections
/// Re(conj(e_i) c_i) / |e_i|^2, so golden-section search on that hull is
/// exact to rounding. Recovers flat minima that IRLS creeps toward.
///
void polish_coordinates(const Eigen::Ref<const VectorXc>& b,
                        const Eigen::Ref<const MatrixXc>& G, VectorXc& best,
                        double& best_cost)
{
    const Index q = G.rows();
    const Index r = G.cols();
    VectorXc c = b - G * best;
    VectorXc e(q);
    const auto cost_at = [&](double t) {
        double sum = 0.0;
        for (Index i = 0; i < q; ++i) {
            sum += modulus(c(i) - t * e(i));
        }
        return sum;
    };
    constexpr double kInvPhi = 0.6180339887498949;
    for (int sweep = 0; sweep < 3; ++sweep) {
        const double start_cost = best_cost;
        for (Index k = 0; k < r; ++k) {
            for (const Complex d : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
                e = G.col(k) * d;
                double lo = std::numeric_limits<double>::infinity();
                double hi = -lo;
                for (Index i = 0; i < q; ++i) {
                    const double n = std::norm(e(i));
                    if (n > 0.0) {
                        const double t = (std::conj(e(i)) * c(i)).real() / n;
                        lo = std::min(lo, t);
                        hi = std::max(hi, t);
                    }
                }
                if (!(lo < hi)) {
                    continue;
                }
                // Convexity: if neither side of 0 descends, the minimum is
                // within +-h and nothing worthwhile is left on this line.
                const double width = hi - lo;
                const double h     = 1e-6 * width;
                const double f0    = cost_at(0.0);
                if (cost_at(h) < f0) {
                    lo = 0.0;
                } else if (cost_at(-h) < f0) {
                    hi = 0.0;
                } else {
                    continue;
                }
                double x1 = hi - kInvPhi * (hi - lo);
                double x2 = lo + kInvPhi * (hi - lo);
                double f1 = cost_at(x1);
                double f2 = cost_at(x2);
                while (x2 - x1 > 1e-13 * width) {
                    if (f1 <= f2) {
                        hi = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = hi - kInvPhi * (hi - lo);
                        f1 = cost_at(x1);
                    } else {
                        lo = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = lo + kInvPhi * (hi - lo);
                        f2 = cost_at(x2);
                    }
                }
                const double t = f1 <= f2 ? x1 : x2;
                const double f = std::min(f1, f2);
                if (f < best_cost) {
                    best(k) += t * d;
                    best_cost = f;
                    c -= t * e;
                }
            }
        }
        if (!(best_cost < start_cost * (1.0 - 1e-15))) {
            return;
        }
    }
}

} // namespace

SubproblemSolution solve_l1_subproblem(const Eigen::Ref<const VectorXc>& b,
                                       const Eigen::Ref<const MatrixXc>& G,
                                       int irls_iters, double epsilon,
                                       double rel_tol)
{
    if (!(epsilon > 0.0)) {
        throw DomainError("solve_l1_subproblem: epsilon must be positive");
    }
    const Index q = G.rows();
    const Index r = G.cols();
    SubproblemSolution ls = solve_ls_subproblem(b, G);
    bool degenerate       = ls.degenerate;
    VectorXc v            = std::move(ls.v);

    VectorXc residual = b - G * v;
    VectorXc best     = v;
    double best_cost  = sum_modulus(residual);
    if (max_modulus(residual) <= 1e-13 * max_modulus(b)) {
        return {best, degenerate};
    }

    Eigen::VectorXd w(q);
    MatrixXc gram(r, r);
    VectorXc rhs(r);
    Eigen::MatrixXd gram_r(2 * r, 2 * r);
    Eigen::VectorXd rhs_r(2 * r);
    for (int it = 0; it < irls_iters; ++it) {
        for (Index i = 0; i < q; ++i) {
            w(i) = 1.0 / std::max(modulus(residual(i)), epsilon);
        }
        // Normal equations of the embedded weighted problem. Both real rows
        // of a complex residual share one weight, so the embedded Gram
        // matrix is the real form of G^H W G.
        gram.setZero();
        rhs.setZero();
        for (Index i = 0; i < q; ++i) {
            for (Index a = 0; a < r; ++a) {
                const Complex ga = std::conj(G(i, a)) * w(i);
                rhs(a) += ga * b(i);
                for (Index c = a; c < r; ++c) {
                    gram(a, c) += ga * G(i, c);
                }
            }
        }
        for (Index a = 0; a < r; ++a) {
            for (Index c = 0; c < a; ++c) {
                gram(a, c) = std::conj(gram(c, a));
            }
        }
        gram_r << gram.real(), -gram.imag(), gram.imag(), gram.real();
        rhs_r << rhs.real(), rhs.imag();

        VectorXc next;
        const Eigen::LLT<Eigen::MatrixXd> llt(gram_r);
        bool solved = false;
        if (llt.info() == Eigen::Success) {
            const auto diag   = llt.matrixLLT().diagonal().cwiseAbs();
            const double dmax = diag.maxCoeff();
            // cond(gram) ~ (dmax / dmin)^2
            if (dmax > 0.0 && diag.minCoeff() > 1e-6 * dmax) {
                next   = recombine(llt.solve(rhs_r));
                solved = true;
            }
        }
        if (!solved) {
            SubproblemSolution fallback = solve_weighted_ls(b, G, w);
            degenerate = degenerate || fallback.degenerate;
            next       = std::move(fallback.v);
        }

        const double step = (next - v).norm();
        const double size = v.norm();
        v                 = std::move(next);
        residual.noalias() = b - G * v;
        const double cost = sum_modulus(residual);
        if (cost < best_cost) {
            best_cost = cost;
            best      = v;
        }
        if (step <= rel_tol * size) {
            break;
        }
    }
    polish_vertex(b, G, best, best_cost);
    polish_coordinates(b, G, best, best_cost);
    return {best, degenerate};
}

//------------------------------------------------------------------------------
// Alternating minimization
//------------------------------------------------------------------------------

namespace
{

SubproblemSolution solve_subproblem(const VectorXc& b, const MatrixXc& G,
                                    const SolverOptions& options)
{
    if (options.p == Norm::L2) {
        return solve_ls_subproblem(b, G);
    }
    return solve_l1_subproblem(b, G, options.irls_iters, options.irls_epsilon,
                               options.rel_tol);
}

SweepResult sweep_columns(const MatrixXc& z, const LiftedMask& mask,
                          const MatrixXc& U, const SolverOptions& options,
                          const MatrixXc* current)
{
    const Index n2   = mask.shape.n2;
    const Index rank = U.cols();
    if (z.rows() != mask.omega.rows() || z.cols() != n2 ||
        U.rows() != z.rows()) {
        throw ValidationError("update_V: dimension mismatch");
    }
    SweepResult out;
    out.factor.resize(rank, n2);
    for (Index jj = 0; jj < n2; ++jj) {
        const auto& rows = mask.col_sets[static_cast<std::size_t>(jj)];
        if (static_cast<Index>(rows.size()) <= rank) {
            throw StructuralError("lifted column " + std::to_string(jj) +
                                  " has too few observed entries for rank " +
                                  std::to_string(rank));
        }
        const VectorXc b = z(rows, jj);
        const MatrixXc G = U(rows, Eigen::all);
        SubproblemSolution sol = solve_subproblem(b, G, options);
        out.degenerate += sol.degenerate ? 1 : 0;
        if (current != nullptr) {
            const VectorXc& old = current->col(jj);
            if (lp_cost(b - G * sol.v, options.p) >
                lp_cost(b - G * old, options.p)) {
                sol.v = old;
            }
        }
        out.factor.col(jj) = sol.v;
    }
    return out;
}

SweepResult sweep_rows(const MatrixXc& z, const LiftedMask& mask,
                       const MatrixXc& V, const SolverOptions& options,
                       const MatrixXc* current)
{
    const Index rows_total = mask.shape.lifted_rows();
    const Index rank       = V.rows();
    if (z.rows() != rows_total || z.cols() != mask.shape.n2 ||
        V.cols() != z.cols()) {
        throw ValidationError("update_U: dimension mismatch");
    }
    SweepResult out;
    out.factor.resize(rows_total, rank);
    for (Index ii = 0; ii < rows_total; ++ii) {
        const auto& cols = mask.row_sets[static_cast<std::size_t>(ii)];
        if (static_cast<Index>(cols.size()) <= rank) {
            throw StructuralError("lifted row " + std::to_string(ii) +
                                  " has too few observed entries for rank " +
                                  std::to_string(rank));
        }
        const VectorXc b = z(ii, cols).transpose();
        const MatrixXc G = V(Eigen::all, cols).transpose();
        SubproblemSolution sol = solve_subproblem(b, G, options);
        out.degenerate += sol.degenerate ? 1 : 0;
        if (current != nullptr) {
            const VectorXc old = current->row(ii).transpose();
            if (lp_cost(b - G * sol.v, options.p) >
                lp_cost(b - G * old, options.p)) {
                sol.v = old;
            }
        }
        out.factor.row(ii) = sol.v.transpose();
    }
    return out;
}

} // namespace

double objective(const MatrixXc& z, const LiftedMask& mask, const MatrixXc& U,
                 const MatrixXc& V, Norm p)
{
    double total = 0.0;
    for (Index jj = 0; jj < mask.shape.n2; ++jj) {
        const auto& rows = mask.col_sets[static_cast<std::size_t>(jj)];
        const VectorXc residual =
            z(rows, jj) - U(rows, Eigen::all) * V.col(jj);
        total += lp_cost(residual, p);
    }
    return total;
}

SweepResult update_V(const MatrixXc& z, const LiftedMask& mask,
                     const MatrixXc& U, const SolverOptions& options)
{
    return sweep_columns(z, mask, U, options, nullptr);
}

SweepResult update_V(const MatrixXc& z, const LiftedMask& mask,
                     const MatrixXc& U, const SolverOptions& options,
                     const MatrixXc& current)
{
    return sweep_columns(z, mask, U, options, &current);
}

SweepResult update_U(const MatrixXc& z, const LiftedMask& mask,
                     const MatrixXc& V, const SolverOptions& options)
{
    return sweep_rows(z, mask, V, options, nullptr);
}

SweepResult update_U(const MatrixXc& z, const LiftedMask& mask,
                     const MatrixXc& V, const SolverOptions& options,
                     const MatrixXc& current)
{
    return sweep_rows(z, mask, V, options, &current);
}

MatrixXc initial_factor(Index rows, Index rank, std::uint64_t seed)
{
    Rng rng(seed);
    MatrixXc u(rows, rank);
    const double scale = 1.0 / std::sqrt(static_cast<double>(rank));
    for (Index c = 0; c < rank; ++c) {
        for (Index r = 0; r < rows; ++r) {
            u(r, c) = Complex(scale * rng.normal(), 0.0);
        }
    }
    return u;
}

namespace
{

void check_solvable(const LiftedMask& mask, Index rank)
{
    if (mask.min_column_count() <= rank) {
        throw StructuralError("a lifted column has no more than rank = " +
                              std::to_string(rank) + " observed entries");
    }
    if (mask.min_row_count() <= rank) {
        throw StructuralError("a lifted row has no more than rank = " +
                              std::to_string(rank) + " observed entries");
    }
}

MinimizeResult minimize_impl(const MatrixXc& z, const LiftedMask& mask,
                             const SolverOptions& options,
                             const MatrixXc* truth)
{
    options.validate();
    check_solvable(mask, options.rank);
    if (z.rows() != mask.omega.rows() || z.cols() != mask.omega.cols()) {
        throw ValidationError("alternate_minimize: data and mask differ in "
                              "shape");
    }

    MinimizeResult result;
    ResidualReport& report = result.report;
    MatrixXc U = initial_factor(z.rows(), options.rank, options.rng_seed);
    MatrixXc V;

    double previous = 0.0;
    for (int k = 0; k < options.outer_iters; ++k) {
        SweepResult v_step = k == 0 ? update_V(z, mask, U, options)
                                    : update_V(z, mask, U, options, V);
        V = std::move(v_step.factor);
        report.degenerate_solves += v_step.degenerate;
        report.sweep_objective.push_back(objective(z, mask, U, V, options.p));

        SweepResult u_step = update_U(z, mask, V, options, U);
        U = std::move(u_step.factor);
        report.degenerate_solves += u_step.degenerate;
        const double f = objective(z, mask, U, V, options.p);
        report.sweep_objective.push_back(f);
        report.objective.push_back(f);

        if (truth != nullptr) {
            const MatrixXc estimate = unlift(U * V, mask.shape).transpose();
            report.nrmse.push_back(nrmse(estimate, *truth));
        }
        if (k > 0 && (f == 0.0 || std::abs(previous - f) <
                                      options.rel_tol * previous)) {
            report.stopped_early = k + 1 < options.outer_iters;
            break;
        }
        previous = f;
    }
    result.factors = FactorPair{std::move(U), std::move(V)};
    return result;
}

void check_measurement(const MatrixXc& data, const Mask& mask)
{
    if (data.rows() != mask.rows() || data.cols() != mask.cols()) {
        throw ValidationError("data and mask differ in shape");
    }
}

void check_finite(const MatrixXc& estimate)
{
    if (!estimate.allFinite()) {
        throw StructuralError("completion produced non-finite entries");
    }
}

} // namespace

MinimizeResult alternate_minimize(const MatrixXc& z, const LiftedMask& mask,
                                  const SolverOptions& options)
{
    return minimize_impl(z, mask, options, nullptr);
}

MinimizeResult alternate_minimize(const MatrixXc& z, const LiftedMask& mask,
                                  const SolverOptions& options,
                                  const MatrixXc& truth)
{
    return minimize_impl(z, mask, options, &truth);
}

Completion complete_with_report(const MatrixXc& data, const Mask& mask,
                                const SolverOptions& options,
                                const MatrixXc* truth)
{
    check_measurement(data, mask);
    options.validate();
    const LiftedMask lifted_mask = lift_mask(mask, options.hankel_n1);
    const MatrixXc z = lift(data, lifted_mask.shape.n1);
    MinimizeResult solved = minimize_impl(z, lifted_mask, options, truth);

    Completion out;
    out.estimate =
        unlift(solved.factors.product(), lifted_mask.shape).transpose();
    out.report = std::move(solved.report);
    check_finite(out.estimate);
    return out;
}

MatrixXc complete(const MatrixXc& data, const Mask& mask,
                  const SolverOptions& options)
{
    return complete_with_report(data, mask, options).estimate;
}

MatrixXc complete(const Measurement& measurement, const SolverOptions& options)
{
    return complete(measurement.data, measurement.mask, options);
}

//------------------------------------------------------------------------------
// Alternating projection baseline
//------------------------------------------------------------------------------

MatrixXc truncated_svd(const MatrixXc& z, Index rank)
{
    const Eigen::BDCSVD<MatrixXc> svd(z, Eigen::ComputeThinU |
                                             Eigen::ComputeThinV);
    const Index k = std::min<Index>(rank, svd.singularValues().size());
    return svd.matrixU().leftCols(k) *
           svd.singularValues().head(k).asDiagonal() *
           svd.matrixV().leftCols(k).adjoint();
}

Completion sap_with_report(const MatrixXc& data, const Mask& mask, Index rank,
                           int iters, Index n1, const MatrixXc* truth)
{
    check_measurement(data, mask);
    if (rank < 1 || iters < 1) {
        throw ValidationError("sap: rank and iters must be positive");
    }
    const LiftedMask lifted_mask = lift_mask(mask, n1);
    check_solvable(lifted_mask, rank);
    const HankelShape& shape = lifted_mask.shape;
    const MatrixXc observed =
        lifted_mask.omega.select(lift(data, shape.n1), Complex(0.0));

    Completion out;
    MatrixXc iterate = observed;
    MatrixXc low_rank;
    for (int it = 0; it < iters; ++it) {
        low_rank = truncated_svd(iterate, rank);
        const MatrixXc misfit =
            lifted_mask.omega.select(low_rank - observed, Complex(0.0));
        out.report.objective.push_back(misfit.squaredNorm());
        if (truth != nullptr) {
            out.report.nrmse.push_back(
                nrmse(unlift(low_rank, shape).transpose(), *truth));
        }
        iterate = lifted_mask.omega.select(observed, low_rank);
        iterate = lift(unlift(iterate, shape), shape.n1);
    }
    out.report.sweep_objective = out.report.objective;
    out.estimate = unlift(low_rank, shape).transpose();
    check_finite(out.estimate);
    return out;
}

MatrixXc sap_baseline(const MatrixXc& data, const Mask& mask, Index rank,
                      int iters, Index n1)
{
    return sap_with_report(data, mask, rank, iters, n1).estimate;
}

} // namespace hankelmc

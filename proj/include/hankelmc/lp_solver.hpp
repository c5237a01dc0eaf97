///
/// \file lp_solver.hpp
///
/// Hankel-structured low-rank completion by alternating l_p minimization.
///
/// The lifted data Z (observed on Omega') is approximated by a rank-r
/// product U V, U in C^{(M n1) x r}, V in C^{r x n2}, minimizing
///
///   f_p(U, V) = sum_{(i, j) in Omega'} |Z_ij - (U V)_ij|^p,   p in {1, 2}.
///
/// Each sweep fixes one factor; the problem then separates into one small
/// regression per column of V (rows I_jj of U) or per row of U (columns
/// J_ii of V). p = 2 regressions are least-squares solves; p = 1 uses
/// iteratively reweighted least squares. Complex regressions are solved in
/// the real embedding
///
///   b -> [Re b; Im b],   G -> [Re G, -Im G; Im G, Re G].
///
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <hankelmc/hankel.hpp>
#include <hankelmc/sim_model.hpp>
#include <hankelmc/types.hpp>

namespace hankelmc
{

enum class Norm
{
    L1,
    L2,
};

std::string to_string(Norm p);
Norm norm_from_string(const std::string& name);

struct SolverOptions
{
    Norm p                 = Norm::L1;
    Index rank             = 2;
    int outer_iters        = 10;
    int irls_iters         = 20;
    double irls_epsilon    = 1e-6;
    double rel_tol         = 1e-6;
    std::uint64_t rng_seed = 0;
    /// Block rows of the lift; 0 selects floor(N / 2).
    Index hankel_n1 = 0;

    void validate() const;
};

//------------------------------------------------------------------------------
// Subproblems
//------------------------------------------------------------------------------

struct RealEmbedding
{
    Eigen::VectorXd b; ///< [Re b; Im b]
    Eigen::MatrixXd G; ///< [Re G, -Im G; Im G, Re G]
};

RealEmbedding embed_real(const Eigen::Ref<const VectorXc>& b,
                         const Eigen::Ref<const MatrixXc>& G);

/// Inverse of the vector embedding: [x; y] -> x + j y.
VectorXc recombine(const Eigen::Ref<const Eigen::VectorXd>& stacked);

struct SubproblemSolution
{
    VectorXc v;
    /// Set when G (after weighting) was numerically rank deficient and the
    /// truncated pseudoinverse was used.
    bool degenerate = false;
};

///
/// Minimum-norm least-squares solution of min ||b - G v||_2. Rank-deficient
/// G falls back to an SVD pseudoinverse with cutoff 1e-10 * sigma_max.
///
SubproblemSolution solve_ls_subproblem(const Eigen::Ref<const VectorXc>& b,
                                       const Eigen::Ref<const MatrixXc>& G);

/// min sum_i w_i |b_i - (G v)_i|^2 with nonnegative weights.
SubproblemSolution solve_weighted_ls(const Eigen::Ref<const VectorXc>& b,
                                     const Eigen::Ref<const MatrixXc>& G,
                                     const Eigen::Ref<const Eigen::VectorXd>& w);

///
/// Approximate minimizer of sum_i |b_i - (G v)_i| (complex moduli) by IRLS:
/// start from the least-squares solution, then repeat weighted least squares
/// with w_i = 1 / max(|residual_i|, epsilon) for at most `irls_iters`
/// rounds or until ||dv|| < rel_tol ||v||. IRLS creeps toward minimizers
/// that interpolate rows or sit in flat valleys, so the best iterate is then
/// polished by exact fits through small-residual rows and by exact line
/// searches along each real coordinate. Polishing only ever lowers the
/// cost. Returns the point with the smallest l1 objective seen.
///
SubproblemSolution solve_l1_subproblem(const Eigen::Ref<const VectorXc>& b,
                                       const Eigen::Ref<const MatrixXc>& G,
                                       int irls_iters, double epsilon,
                                       double rel_tol = 1e-6);

/// sum_i |r_i|^p.
double lp_cost(const Eigen::Ref<const VectorXc>& residual, Norm p);

//------------------------------------------------------------------------------
// Alternating minimization
//------------------------------------------------------------------------------

/// f_p(U, V) over the observed lifted entries.
double objective(const MatrixXc& z, const LiftedMask& mask, const MatrixXc& U,
                 const MatrixXc& V, Norm p);

struct SweepResult
{
    MatrixXc factor;
    Index degenerate = 0; ///< number of degenerate subproblem solves
};

///
/// Column sweep: column jj of the returned V solves the regression of
/// z(I_jj, jj) on U(I_jj, :). The overload taking `current` keeps a column
/// of `current` whenever the new candidate does not lower its cost.
///
SweepResult update_V(const MatrixXc& z, const LiftedMask& mask,
                     const MatrixXc& U, const SolverOptions& options);
SweepResult update_V(const MatrixXc& z, const LiftedMask& mask,
                     const MatrixXc& U, const SolverOptions& options,
                     const MatrixXc& current);

/// Row sweep, the mirror of update_V: row ii regresses z(ii, J_ii) on
/// V(:, J_ii).
SweepResult update_U(const MatrixXc& z, const LiftedMask& mask,
                     const MatrixXc& V, const SolverOptions& options);
SweepResult update_U(const MatrixXc& z, const LiftedMask& mask,
                     const MatrixXc& V, const SolverOptions& options,
                     const MatrixXc& current);

struct FactorPair
{
    MatrixXc U;
    MatrixXc V;

    MatrixXc product() const { return U * V; }
};

struct ResidualReport
{
    /// f_p after each outer iteration.
    std::vector<double> objective;
    /// Normalized error of the unlifted estimate after each outer iteration;
    /// empty unless ground truth was supplied.
    std::vector<double> nrmse;
    /// f_p after every individual V and U sweep, in order.
    std::vector<double> sweep_objective;
    Index degenerate_solves = 0;
    bool stopped_early      = false;

    std::size_t iterations() const { return objective.size(); }
};

struct MinimizeResult
{
    FactorPair factors;
    ResidualReport report;
};

/// Random real Gaussian U0 scaled by 1 / sqrt(r), drawn from `seed`.
MatrixXc initial_factor(Index rows, Index rank, std::uint64_t seed);

///
/// Runs `outer_iters` V/U sweep pairs from a seeded random U0, stopping
/// early once the relative objective change drops below `rel_tol`.
/// Throws StructuralError if some lifted column or row has no more than
/// `rank` observed entries.
///
MinimizeResult alternate_minimize(const MatrixXc& z, const LiftedMask& mask,
                                  const SolverOptions& options);

/// As above, also tracing the normalized error against `truth` (N x M).
MinimizeResult alternate_minimize(const MatrixXc& z, const LiftedMask& mask,
                                  const SolverOptions& options,
                                  const MatrixXc& truth);

struct Completion
{
    MatrixXc estimate; ///< N x M
    ResidualReport report;
};

///
/// Full pipeline on an M x N masked data matrix: lift, analyze the mask,
/// alternate, unlift and transpose. Values of `data` at unobserved positions
/// are never read.
///
Completion complete_with_report(const MatrixXc& data, const Mask& mask,
                                const SolverOptions& options,
                                const MatrixXc* truth = nullptr);

MatrixXc complete(const MatrixXc& data, const Mask& mask,
                  const SolverOptions& options);
MatrixXc complete(const Measurement& measurement, const SolverOptions& options);

//------------------------------------------------------------------------------
// Alternating projection baseline
//------------------------------------------------------------------------------

///
/// Structured alternating projection: repeat (i) rank-r truncated SVD of the
/// lifted iterate, (ii) reset observed lifted entries to the data,
/// (iii) re-Hankelize via unlift then lift. The estimate after each round
/// is the unlifted rank-r projection. `report.objective` holds the squared
/// data misfit of that projection on Omega'.
///
Completion sap_with_report(const MatrixXc& data, const Mask& mask, Index rank,
                           int iters, Index n1 = 0,
                           const MatrixXc* truth = nullptr);

MatrixXc sap_baseline(const MatrixXc& data, const Mask& mask, Index rank,
                      int iters, Index n1 = 0);

/// Rank-r truncated SVD approximation.
MatrixXc truncated_svd(const MatrixXc& z, Index rank);

} // namespace hankelmc

///
/// \file experiments.hpp
///
/// Seeded Monte-Carlo experiments: convergence traces, recovery phase
/// transition, beam patterns and DOA error maps.
///
/// Trial `t` of grid cell `c` draws its scenario from
/// `derive_seed(master, c, t)`; the solver's U0 comes from
/// `solver_seed_for(scenario_seed)`. All algorithms of one trial see the same
/// scenario. Trials run on a bounded thread pool and are collected in index
/// order, so output files do not depend on the thread count.
///
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <hankelmc/config.hpp>
#include <hankelmc/doa.hpp>
#include <hankelmc/lp_solver.hpp>
#include <hankelmc/sim_model.hpp>

namespace hankelmc
{

constexpr std::uint64_t solver_seed_for(std::uint64_t scenario_seed) noexcept
{
    return derive_seed(scenario_seed, 1, 0);
}

/// Execution settings shared by all experiments.
struct RunContext
{
    std::uint64_t master_seed = 0;
    int threads               = 1;
    /// Output directory; nothing is written when empty.
    std::filesystem::path out_dir;
};

/// Calls `body(i)` for i in [0, count) on at most `threads` workers. The
/// first exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body);

/// Runs one algorithm on a measurement. Solver options are used as given
/// (including the seed); `p` is overridden for L1/L2 and SAP runs
/// `outer_iters` rounds.
Completion run_algorithm(Algorithm algo, const Measurement& measurement,
                         const SolverOptions& options, bool track_truth);

/// Result of one algorithm on one trial.
struct AlgorithmOutcome
{
    bool ok = false;
    /// Structural error message when !ok.
    std::string error;
    double nrmse = 0.0;
    /// nrmse after each outer iteration (tracked runs only).
    std::vector<double> trace;
    DoaEstimate doa;
};

struct TrialRecord
{
    std::size_t cell = 0;
    int trial        = 0;
    std::uint64_t seed = 0;
    /// DOA estimate from the masked data without completion.
    DoaEstimate raw_doa;
    /// One entry per configured algorithm, in configuration order.
    std::vector<AlgorithmOutcome> outcomes;
};

//------------------------------------------------------------------------------
// Convergence
//------------------------------------------------------------------------------

struct ConvergenceResult
{
    std::vector<Algorithm> algorithms;
    /// Trials in index order.
    std::vector<TrialRecord> trials;
    /// Per algorithm, median nrmse over successful trials at iterations
    /// 1..outer_iters. Traces that stop early are padded with their last
    /// value.
    std::vector<std::vector<double>> median_trace;
    /// Per algorithm, number of trials that raised a structural error.
    std::vector<int> failed;
};

/// Writes convergence.csv, convergence_trials.csv and convergence.svg.
ConvergenceResult run_convergence(const ExperimentConfig& config,
                                  const RunContext& context);

//------------------------------------------------------------------------------
// Grids
//------------------------------------------------------------------------------

struct CellSummary
{
    std::string algo; ///< "L1", "L2", "SAP" or "RAW"
    double ssr_db           = 0.0;
    double failure_fraction = 0.0;
    int trials    = 0;
    int successes = 0;
    int failed    = 0; ///< structural errors
    /// successes / trials; failed trials count as non-successes.
    double prob = 0.0;
    /// sqrt(mean squared nrmse) over non-failed trials (NaN if none).
    double mean_nrmse = 0.0;
    double median_nrmse = 0.0;
    /// DOA RMSE in degrees over all trials (NaN if any trial failed).
    double doa_rmse = 0.0;
    bool doa_pass   = false;
};

struct GridResult
{
    GridSpec grid;
    std::vector<TrialRecord> trials;
    /// Recovery aggregates, ordered by algorithm, then SSR, then fraction.
    std::vector<CellSummary> phase;
    /// DOA aggregates with RAW first, same ordering.
    std::vector<CellSummary> doa;
};

/// Cell index of (ssr index, fraction index).
inline std::size_t cell_index(const GridSpec& grid, std::size_t i_ssr,
                              std::size_t i_frac)
{
    return i_ssr * grid.failure_fractions.size() + i_frac;
}

/// Runs every (SSR, fraction, trial) once for all algorithms and computes
/// both recovery and DOA aggregates without writing files.
GridResult evaluate_grid(const ExperimentConfig& config,
                         const RunContext& context);

/// Writes phase.csv, phase_trials.csv and phase_<algo>.svg.
GridResult run_phase_transition(const ExperimentConfig& config,
                                const RunContext& context);
/// Requires every failure fraction < 0.5. Writes doa.csv, doa_trials.csv and
/// doa_<algo>.svg (including RAW).
GridResult run_doa_grid(const ExperimentConfig& config,
                        const RunContext& context);

void write_phase_outputs(const GridResult& result,
                         const std::filesystem::path& dir);
void write_doa_outputs(const GridResult& result,
                       const std::filesystem::path& dir);

//------------------------------------------------------------------------------
// Beam pattern
//------------------------------------------------------------------------------

struct BeamCurve
{
    std::string name; ///< "RAW", "L1", "L2", "SAP" or "CLEAN"
    /// Spectrum of the first trial.
    SpatialSpectrum spectrum;
    std::vector<BeamMetrics> per_trial;
    /// Medians over trials.
    BeamMetrics summary;
    int failed = 0;
};

struct BeamResult
{
    std::vector<BeamCurve> curves;
};

/// Spectra of the raw masked data, each completion and the noiseless
/// truth over `grid.trials_per_cell` scenarios at the configured setting.
/// Writes spectrum_<curve>.csv, beam_summary.csv and beam.svg.
BeamResult run_beam_pattern(const ExperimentConfig& config,
                            const RunContext& context);

} // namespace hankelmc

#include <hankelmc/experiments.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <hankelmc/errors.hpp>
#include <hankelmc/io.hpp>
#include <hankelmc/metrics.hpp>
#include <hankelmc/svg.hpp>

namespace hankelmc
{

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDoaThreshold = 0.15;

std::string fmt(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return format_real(v);
}

std::string tick(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

std::ofstream open_csv(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write '" + path.string() + "'");
    }
    return out;
}

void prepare_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw ValidationError("cannot create output directory '" +
                              dir.string() + "': " + ec.message());
    }
}

const std::vector<double>& doa_grid()
{
    static const std::vector<double> grid = angle_grid();
    return grid;
}

DoaEstimate doa_of(const MatrixXc& data_nm, Index r)
{
    return estimate_doa(data_nm, static_cast<std::size_t>(r), doa_grid());
}

AlgorithmOutcome evaluate(Algorithm algo, const Measurement& m,
                          const SolverOptions& options, bool track, bool doa)
{
    AlgorithmOutcome out;
    try {
        const Completion c = run_algorithm(algo, m, options, track);
        out.ok    = true;
        out.nrmse = nrmse(c.estimate, m.truth);
        out.trace = c.report.nrmse;
        if (doa) {
            out.doa = doa_of(c.estimate, options.rank);
        }
    } catch (const StructuralError& e) {
        out.ok    = false;
        out.error = e.what();
        out.nrmse = kNaN;
    }
    return out;
}

} // namespace

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body)
{
    const std::size_t workers =
        std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            if (stop.load()) {
                return;
            }
            const std::size_t i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                stop = true;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

Completion run_algorithm(Algorithm algo, const Measurement& measurement,
                         const SolverOptions& options, bool track_truth)
{
    const MatrixXc* truth = track_truth ? &measurement.truth : nullptr;
    switch (algo) {
    case Algorithm::L1:
    case Algorithm::L2: {
        SolverOptions o = options;
        o.p = algo == Algorithm::L1 ? Norm::L1 : Norm::L2;
        return complete_with_report(measurement.data, measurement.mask, o,
                                    truth);
    }
    case Algorithm::SAP:
        return sap_with_report(measurement.data, measurement.mask,
                               options.rank, options.outer_iters,
                               options.hankel_n1, truth);
    }
    throw ValidationError("unknown algorithm");
}

//------------------------------------------------------------------------------
// Convergence
//------------------------------------------------------------------------------

ConvergenceResult run_convergence(const ExperimentConfig& config,
                                  const RunContext& context)
{
    config.scenario.validate();
    config.solver.validate();
    config.grid.validate();

    const auto& algos = config.grid.algorithms;
    const int n_trials = config.grid.trials_per_cell;
    const auto K = static_cast<std::size_t>(config.solver.outer_iters);

    ConvergenceResult result;
    result.algorithms = algos;
    result.trials.resize(static_cast<std::size_t>(n_trials));

    parallel_for(result.trials.size(), context.threads, [&](std::size_t t) {
        TrialRecord& rec = result.trials[t];
        rec.cell  = 0;
        rec.trial = static_cast<int>(t);
        rec.seed  = derive_seed(context.master_seed, 0, t);

        ScenarioConfig sc = config.scenario;
        sc.rng_seed       = rec.seed;
        const Measurement m = generate_scenario(sc);
        SolverOptions so    = config.solver;
        so.rng_seed         = solver_seed_for(rec.seed);
        for (Algorithm a : algos) {
            AlgorithmOutcome o = evaluate(a, m, so, true, false);
            if (o.ok && !o.trace.empty()) {
                o.trace.resize(K, o.trace.back());
            }
            rec.outcomes.push_back(std::move(o));
        }
    });

    for (std::size_t a = 0; a < algos.size(); ++a) {
        std::vector<double> trace(K, kNaN);
        int failed = 0;
        for (std::size_t k = 0; k < K; ++k) {
            std::vector<double> column;
            for (const auto& rec : result.trials) {
                if (rec.outcomes[a].ok) {
                    column.push_back(rec.outcomes[a].trace[k]);
                }
            }
            trace[k] = median(column);
        }
        for (const auto& rec : result.trials) {
            failed += rec.outcomes[a].ok ? 0 : 1;
        }
        result.median_trace.push_back(std::move(trace));
        result.failed.push_back(failed);
    }

    if (!context.out_dir.empty()) {
        prepare_dir(context.out_dir);
        {
            auto out = open_csv(context.out_dir / "convergence.csv");
            out << "algo,iter,median_nrmse\n";
            for (std::size_t a = 0; a < algos.size(); ++a) {
                for (std::size_t k = 0; k < K; ++k) {
                    out << to_string(algos[a]) << ',' << (k + 1) << ','
                        << fmt(result.median_trace[a][k]) << '\n';
                }
            }
        }
        {
            auto out = open_csv(context.out_dir / "convergence_trials.csv");
            out << "algo,trial,seed,status,iter,nrmse\n";
            for (std::size_t a = 0; a < algos.size(); ++a) {
                for (const auto& rec : result.trials) {
                    const auto& o = rec.outcomes[a];
                    if (!o.ok) {
                        out << to_string(algos[a]) << ',' << rec.trial << ','
                            << rec.seed << ",failed,,\n";
                        continue;
                    }
                    for (std::size_t k = 0; k < K; ++k) {
                        out << to_string(algos[a]) << ',' << rec.trial << ','
                            << rec.seed << ",ok," << (k + 1) << ','
                            << fmt(o.trace[k]) << '\n';
                    }
                }
            }
        }
        LinePlot plot;
        plot.title   = "Normalized RMSE versus iteration";
        plot.x_label = "iteration";
        plot.y_label = "median normalized RMSE";
        plot.log_y   = true;
        for (std::size_t a = 0; a < algos.size(); ++a) {
            Series s;
            s.label = to_string(algos[a]);
            for (std::size_t k = 0; k < K; ++k) {
                s.x.push_back(static_cast<double>(k + 1));
                s.y.push_back(result.median_trace[a][k]);
            }
            plot.series.push_back(std::move(s));
        }
        write_text_file(context.out_dir / "convergence.svg", render_svg(plot));
    }
    return result;
}

//------------------------------------------------------------------------------
// Grids
//------------------------------------------------------------------------------

GridResult evaluate_grid(const ExperimentConfig& config,
                         const RunContext& context)
{
    config.scenario.validate();
    config.solver.validate();
    config.grid.validate();

    const GridSpec& grid = config.grid;
    const auto n_trials  = static_cast<std::size_t>(grid.trials_per_cell);
    const auto n_cells   = grid.cell_count();
    const auto n_frac    = grid.failure_fractions.size();

    // Reject settings that cannot produce a valid scenario up front.
    for (double ssr : grid.ssr_values) {
        for (double f : grid.failure_fractions) {
            ScenarioConfig sc   = config.scenario;
            sc.ssr_db           = ssr;
            sc.failure_fraction = f;
            sc.validate();
        }
    }

    GridResult result;
    result.grid = grid;
    result.trials.resize(n_cells * n_trials);

    parallel_for(result.trials.size(), context.threads, [&](std::size_t idx) {
        const std::size_t cell = idx / n_trials;
        const std::size_t t    = idx % n_trials;
        TrialRecord& rec       = result.trials[idx];
        rec.cell  = cell;
        rec.trial = static_cast<int>(t);
        rec.seed  = derive_seed(context.master_seed, cell, t);

        ScenarioConfig sc   = config.scenario;
        sc.ssr_db           = grid.ssr_values[cell / n_frac];
        sc.failure_fraction = grid.failure_fractions[cell % n_frac];
        sc.rng_seed         = rec.seed;
        const Measurement m = generate_scenario(sc);
        rec.raw_doa = doa_of(m.data.transpose(), sc.n_sources);

        SolverOptions so = config.solver;
        so.rng_seed      = solver_seed_for(rec.seed);
        for (Algorithm a : grid.algorithms) {
            rec.outcomes.push_back(evaluate(a, m, so, false, true));
        }
    });

    const auto& angles = config.scenario.dir_angles;
    const std::size_t n_methods = grid.algorithms.size() + 1;
    result.doa.resize(n_methods * n_cells);
    result.phase.resize(grid.algorithms.size() * n_cells);

    for (std::size_t cell = 0; cell < n_cells; ++cell) {
        const double ssr  = grid.ssr_values[cell / n_frac];
        const double frac = grid.failure_fractions[cell % n_frac];
        const auto first  = result.trials.begin() +
                           static_cast<std::ptrdiff_t>(cell * n_trials);
        const auto last = first + static_cast<std::ptrdiff_t>(n_trials);

        for (std::size_t k = 0; k < n_methods; ++k) {
            // k == 0 is the uncompleted data.
            CellSummary s;
            s.algo = k == 0 ? "RAW" : to_string(grid.algorithms[k - 1]);
            s.ssr_db           = ssr;
            s.failure_fraction = frac;
            s.trials           = static_cast<int>(n_trials);

            std::vector<DoaEstimate> doas;
            std::vector<double> errors;
            for (auto it = first; it != last; ++it) {
                if (k == 0) {
                    doas.push_back(it->raw_doa);
                    continue;
                }
                const auto& o = it->outcomes[k - 1];
                if (!o.ok) {
                    ++s.failed;
                    continue;
                }
                doas.push_back(o.doa);
                errors.push_back(o.nrmse);
                s.successes += recovery_success(o.nrmse) ? 1 : 0;
            }
            s.prob = static_cast<double>(s.successes) /
                     static_cast<double>(s.trials);
            s.mean_nrmse   = k == 0 ? kNaN : aggregate_nrmse(errors);
            s.median_nrmse = k == 0 ? kNaN : median(errors);
            s.doa_rmse = s.failed > 0 ? kNaN : rmse_theta(doas, angles);
            s.doa_pass = s.failed == 0 && s.doa_rmse < kDoaThreshold;

            const std::size_t i_ssr  = cell / n_frac;
            const std::size_t i_frac = cell % n_frac;
            const std::size_t slot =
                k * n_cells + cell_index(grid, i_ssr, i_frac);
            result.doa[slot] = s;
            if (k > 0) {
                result.phase[(k - 1) * n_cells + cell_index(grid, i_ssr, i_frac)] = s;
            }
        }
    }
    return result;
}

namespace
{

Heatmap grid_heatmap(const GridSpec& grid, const std::vector<CellSummary>& cells,
                     std::size_t offset, double (*value)(const CellSummary&))
{
    Heatmap map;
    map.x_label = "sensor failure fraction";
    map.y_label = "SSR (dB)";
    for (double f : grid.failure_fractions) {
        map.x_ticks.push_back(tick(f));
    }
    for (double s : grid.ssr_values) {
        map.y_ticks.push_back(tick(s));
    }
    map.values.resize(static_cast<Eigen::Index>(grid.ssr_values.size()),
                      static_cast<Eigen::Index>(grid.failure_fractions.size()));
    for (std::size_t i = 0; i < grid.ssr_values.size(); ++i) {
        for (std::size_t j = 0; j < grid.failure_fractions.size(); ++j) {
            map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                value(cells[offset + cell_index(grid, i, j)]);
        }
    }
    return map;
}

} // namespace

void write_phase_outputs(const GridResult& result,
                         const std::filesystem::path& dir)
{
    prepare_dir(dir);
    const GridSpec& grid = result.grid;
    const auto n_cells   = grid.cell_count();
    {
        auto out = open_csv(dir / "phase.csv");
        out << "algo,ssr_db,failure_fraction,prob,mean_nrmse,trials\n";
        for (const auto& s : result.phase) {
            out << s.algo << ',' << fmt(s.ssr_db) << ','
                << fmt(s.failure_fraction) << ',' << fmt(s.prob) << ','
                << fmt(s.mean_nrmse) << ',' << s.trials << '\n';
        }
    }
    {
        auto out = open_csv(dir / "phase_trials.csv");
        out << "algo,ssr_db,failure_fraction,trial,seed,status,nrmse,success\n";
        for (std::size_t a = 0; a < grid.algorithms.size(); ++a) {
            for (const auto& rec : result.trials) {
                const auto& o = rec.outcomes[a];
                const std::size_t n_frac = grid.failure_fractions.size();
                out << to_string(grid.algorithms[a]) << ','
                    << fmt(grid.ssr_values[rec.cell / n_frac]) << ','
                    << fmt(grid.failure_fractions[rec.cell % n_frac]) << ','
                    << rec.trial << ',' << rec.seed << ','
                    << (o.ok ? "ok" : "failed") << ',' << fmt(o.nrmse) << ','
                    << (o.ok && recovery_success(o.nrmse) ? 1 : 0) << '\n';
            }
        }
    }
    for (std::size_t a = 0; a < grid.algorithms.size(); ++a) {
        Heatmap map = grid_heatmap(grid, result.phase, a * n_cells,
                                   [](const CellSummary& s) { return s.prob; });
        map.title = "Probability of recovery, " + to_string(grid.algorithms[a]);
        write_text_file(dir / ("phase_" + to_string(grid.algorithms[a]) + ".svg"),
                        render_svg(map));
    }
}

void write_doa_outputs(const GridResult& result,
                       const std::filesystem::path& dir)
{
    prepare_dir(dir);
    const GridSpec& grid = result.grid;
    const auto n_cells   = grid.cell_count();
    const std::size_t n_frac = grid.failure_fractions.size();
    {
        auto out = open_csv(dir / "doa.csv");
        out << "algo,ssr_db,failure_fraction,rmse_deg,pass,trials,failed\n";
        for (const auto& s : result.doa) {
            out << s.algo << ',' << fmt(s.ssr_db) << ','
                << fmt(s.failure_fraction) << ',' << fmt(s.doa_rmse) << ','
                << (s.doa_pass ? 1 : 0) << ',' << s.trials << ',' << s.failed
                << '\n';
        }
    }
    {
        auto out = open_csv(dir / "doa_trials.csv");
        out << "algo,ssr_db,failure_fraction,trial,seed,status,angles_deg\n";
        const std::size_t n_methods = grid.algorithms.size() + 1;
        for (std::size_t k = 0; k < n_methods; ++k) {
            for (const auto& rec : result.trials) {
                const std::string name =
                    k == 0 ? "RAW" : to_string(grid.algorithms[k - 1]);
                const bool ok = k == 0 || rec.outcomes[k - 1].ok;
                out << name << ',' << fmt(grid.ssr_values[rec.cell / n_frac])
                    << ',' << fmt(grid.failure_fractions[rec.cell % n_frac])
                    << ',' << rec.trial << ',' << rec.seed << ','
                    << (ok ? "ok" : "failed") << ',';
                if (ok) {
                    const auto& est =
                        k == 0 ? rec.raw_doa : rec.outcomes[k - 1].doa;
                    for (std::size_t p = 0; p < est.angles.size(); ++p) {
                        out << (p ? ";" : "") << fmt(est.angles[p]);
                    }
                }
                out << '\n';
            }
        }
    }
    const std::size_t n_methods = grid.algorithms.size() + 1;
    for (std::size_t k = 0; k < n_methods; ++k) {
        const std::string name =
            k == 0 ? "RAW" : to_string(grid.algorithms[k - 1]);
        Heatmap map = grid_heatmap(grid, result.doa, k * n_cells,
                                   [](const CellSummary& s) {
                                       return s.doa_pass ? 1.0 : 0.0;
                                   });
        map.title = "DOA RMSE below threshold, " + name;
        write_text_file(dir / ("doa_" + name + ".svg"), render_svg(map));
    }
}

GridResult run_phase_transition(const ExperimentConfig& config,
                                const RunContext& context)
{
    GridResult result = evaluate_grid(config, context);
    if (!context.out_dir.empty()) {
        write_phase_outputs(result, context.out_dir);
    }
    return result;
}

GridResult run_doa_grid(const ExperimentConfig& config,
                        const RunContext& context)
{
    for (double f : config.grid.failure_fractions) {
        if (!(f < 0.5)) {
            throw ValidationError(
                "DOA grid requires failure fractions below 0.5");
        }
    }
    GridResult result = evaluate_grid(config, context);
    if (!context.out_dir.empty()) {
        write_doa_outputs(result, context.out_dir);
    }
    return result;
}

//------------------------------------------------------------------------------
// Beam pattern
//------------------------------------------------------------------------------

BeamResult run_beam_pattern(const ExperimentConfig& config,
                            const RunContext& context)
{
    config.scenario.validate();
    config.solver.validate();
    config.grid.validate();

    const auto& algos  = config.grid.algorithms;
    const auto n_trials = static_cast<std::size_t>(config.grid.trials_per_cell);
    const std::size_t n_curves = algos.size() + 2;
    const auto& truth  = config.scenario.dir_angles;
    const Index N      = config.scenario.n_sensors;
    const auto r       = static_cast<std::size_t>(config.scenario.n_sources);

    struct TrialSpectra
    {
        std::vector<SpatialSpectrum> spectra;
        std::vector<bool> ok;
    };
    std::vector<TrialSpectra> per_trial(n_trials);

    parallel_for(n_trials, context.threads, [&](std::size_t t) {
        const std::uint64_t seed = derive_seed(context.master_seed, 0, t);
        ScenarioConfig sc        = config.scenario;
        sc.rng_seed              = seed;
        const Measurement m      = generate_scenario(sc);
        SolverOptions so         = config.solver;
        so.rng_seed              = solver_seed_for(seed);

        auto& ts = per_trial[t];
        ts.spectra.resize(n_curves);
        ts.ok.assign(n_curves, true);
        ts.spectra[0] =
            bartlett_spectrum(sample_covariance(m.data.transpose()), doa_grid());
        for (std::size_t a = 0; a < algos.size(); ++a) {
            try {
                const Completion c = run_algorithm(algos[a], m, so, false);
                ts.spectra[a + 1] =
                    bartlett_spectrum(sample_covariance(c.estimate), doa_grid());
            } catch (const StructuralError&) {
                ts.ok[a + 1] = false;
            }
        }
        ts.spectra[n_curves - 1] =
            bartlett_spectrum(sample_covariance(m.truth), doa_grid());
    });

    BeamResult result;
    for (std::size_t k = 0; k < n_curves; ++k) {
        BeamCurve curve;
        curve.name = k == 0              ? "RAW"
                     : k == n_curves - 1 ? "CLEAN"
                                         : to_string(algos[k - 1]);
        std::vector<double> bw, sl, sp;
        for (std::size_t t = 0; t < n_trials; ++t) {
            if (!per_trial[t].ok[k]) {
                ++curve.failed;
                continue;
            }
            if (curve.spectrum.size() == 0) {
                curve.spectrum = per_trial[t].spectra[k];
            }
            const BeamMetrics bm =
                beam_metrics(per_trial[t].spectra[k], truth, N, r);
            curve.per_trial.push_back(bm);
            bw.push_back(bm.beamwidth_3db);
            sl.push_back(bm.peak_sidelobe_db);
            sp.push_back(static_cast<double>(bm.spurious_peaks));
        }
        curve.summary.beamwidth_3db    = median(bw);
        curve.summary.peak_sidelobe_db = median(sl);
        curve.summary.spurious_peaks =
            sp.empty() ? 0 : static_cast<int>(std::floor(median(sp)));
        result.curves.push_back(std::move(curve));
    }

    if (!context.out_dir.empty()) {
        prepare_dir(context.out_dir);
        for (const auto& c : result.curves) {
            auto out = open_csv(context.out_dir / ("spectrum_" + c.name + ".csv"));
            out << "angle_deg,power\n";
            for (std::size_t i = 0; i < c.spectrum.size(); ++i) {
                out << fmt(c.spectrum.angles[i]) << ','
                    << fmt(c.spectrum.values[i]) << '\n';
            }
        }
        {
            auto out = open_csv(context.out_dir / "beam_summary.csv");
            out << "curve,beamwidth_3db_deg,peak_sidelobe_db,spurious_peaks,"
                   "trials,failed\n";
            for (const auto& c : result.curves) {
                out << c.name << ',' << fmt(c.summary.beamwidth_3db) << ','
                    << fmt(c.summary.peak_sidelobe_db) << ','
                    << c.summary.spurious_peaks << ',' << n_trials << ','
                    << c.failed << '\n';
            }
        }
        LinePlot plot;
        plot.title   = "Beam pattern";
        plot.x_label = "bearing (deg)";
        plot.y_label = "normalized spectrum (dB)";
        for (const auto& c : result.curves) {
            Series s;
            s.label = c.name;
            for (std::size_t i = 0; i < c.spectrum.size(); ++i) {
                s.x.push_back(c.spectrum.angles[i]);
                s.y.push_back(10.0 * std::log10(std::max(c.spectrum.values[i], 1e-6)));
            }
            plot.series.push_back(std::move(s));
        }
        write_text_file(context.out_dir / "beam.svg", render_svg(plot));
    }
    return result;
}

} // namespace hankelmc

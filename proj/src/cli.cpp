#include <hankelmc/cli.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include <hankelmc/errors.hpp>
#include <hankelmc/experiments.hpp>
#include <hankelmc/io.hpp>
#include <hankelmc/metrics.hpp>

namespace hankelmc
{

namespace
{

struct GlobalOptions
{
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> threads;
};

int resolve_threads(const GlobalOptions& g)
{
    int threads = 1;
    if (g.threads) {
        threads = *g.threads;
    } else if (const char* env = std::getenv("HANKELMC_THREADS")) {
        try {
            std::size_t used = 0;
            threads = std::stoi(env, &used);
            if (used != std::string(env).size()) {
                throw std::invalid_argument(env);
            }
        } catch (const std::exception&) {
            throw ValidationError(std::string("HANKELMC_THREADS is not an "
                                              "integer: '") +
                                  env + "'");
        }
    }
    if (threads < 1) {
        throw ValidationError("thread count must be positive");
    }
    return threads;
}

ExperimentConfig resolve_config(const GlobalOptions& g)
{
    ExperimentConfig config;
    if (!g.config_path.empty()) {
        config = load_config(g.config_path);
    }
    if (g.trials) {
        config.grid.trials_per_cell = *g.trials;
    }
    config.scenario.validate();
    config.solver.validate();
    config.grid.validate();
    return config;
}

RunContext resolve_context(const GlobalOptions& g)
{
    RunContext ctx;
    ctx.master_seed = g.seed.value_or(0);
    ctx.threads     = resolve_threads(g);
    ctx.out_dir     = g.out_dir;
    return ctx;
}

void print_grid(const std::vector<CellSummary>& cells, bool doa, std::ostream& out)
{
    for (const auto& s : cells) {
        out << s.algo << " ssr=" << s.ssr_db << " fail=" << s.failure_fraction;
        if (doa) {
            out << " rmse_deg=" << s.doa_rmse << (s.doa_pass ? " pass" : " fail");
        } else {
            out << " prob=" << s.prob << " mean_nrmse=" << s.mean_nrmse;
        }
        if (s.failed > 0) {
            out << " failed=" << s.failed;
        }
        out << '\n';
    }
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err)
{
    CLI::App app{"Hankel-lifted lp-norm matrix completion for sensor-array "
                 "data with failed channels",
                 "hankelmc"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config_path, "JSON config file");
    app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", g.seed, "Master seed (u64)");
    app.add_option("--trials", g.trials, "Trials per cell")
        ->check(CLI::PositiveNumber);
    app.add_option("--threads", g.threads,
                   "Worker threads (default: $HANKELMC_THREADS or 1)")
        ->check(CLI::PositiveNumber);

    auto* convergence =
        app.add_subcommand("convergence", "Normalized RMSE versus iteration");
    auto* phase = app.add_subcommand(
        "phase", "Recovery probability over SSR and failure fraction");
    auto* beam = app.add_subcommand("beam", "Beam pattern comparison");
    auto* doa  = app.add_subcommand("doa", "DOA RMSE over SSR and failure fraction");

    auto* complete_cmd =
        app.add_subcommand("complete", "Complete a CSV-supplied matrix");
    std::string input_path;
    std::string mask_path;
    std::string algo_name;
    complete_cmd->add_option("--input", input_path, "M x N data CSV")->required();
    complete_cmd->add_option("--mask", mask_path, "M x N mask CSV")->required();
    complete_cmd->add_option("--algo", algo_name,
                             "L1, L2 or SAP (default: solver.p)")
        ->check(CLI::IsMember({"L1", "L2", "SAP"}));

    auto* gen = app.add_subcommand("gen", "Write a synthetic scenario to files");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return 1;
    }

    try {
        ExperimentConfig config = resolve_config(g);
        const RunContext ctx    = resolve_context(g);

        if (convergence->parsed()) {
            const auto r = run_convergence(config, ctx);
            for (std::size_t a = 0; a < r.algorithms.size(); ++a) {
                out << to_string(r.algorithms[a]) << " final median nrmse "
                    << r.median_trace[a].back() << " (failed trials "
                    << r.failed[a] << ")\n";
            }
        } else if (phase->parsed()) {
            print_grid(run_phase_transition(config, ctx).phase, false, out);
        } else if (doa->parsed()) {
            print_grid(run_doa_grid(config, ctx).doa, true, out);
        } else if (beam->parsed()) {
            for (const auto& c : run_beam_pattern(config, ctx).curves) {
                out << c.name << " beamwidth_3db=" << c.summary.beamwidth_3db
                    << " peak_sidelobe_db=" << c.summary.peak_sidelobe_db
                    << " spurious_peaks=" << c.summary.spurious_peaks << '\n';
            }
        } else if (gen->parsed()) {
            if (g.seed) {
                config.scenario.rng_seed = *g.seed;
                config.solver.rng_seed   = solver_seed_for(*g.seed);
            }
            const Measurement m = generate_scenario(config.scenario);
            std::filesystem::create_directories(ctx.out_dir);
            write_matrix_csv(m.data, ctx.out_dir / "X.csv");
            write_mask_csv(m.mask, ctx.out_dir / "mask.csv");
            write_matrix_csv(m.truth, ctx.out_dir / "truth.csv");
            save_config(config, ctx.out_dir / "config.json");
            out << "wrote scenario to " << ctx.out_dir.string() << '\n';
        } else if (complete_cmd->parsed()) {
            if (g.seed) {
                config.solver.rng_seed = solver_seed_for(*g.seed);
            }
            Measurement m;
            m.data = read_matrix_csv(std::filesystem::path(input_path));
            m.mask = read_mask_csv(std::filesystem::path(mask_path));
            if (m.data.rows() != m.mask.rows() || m.data.cols() != m.mask.cols()) {
                throw ValidationError("data and mask shapes differ");
            }
            Algorithm algo = config.solver.p == Norm::L1 ? Algorithm::L1
                                                         : Algorithm::L2;
            if (!algo_name.empty()) {
                algo = algorithm_from_string(algo_name);
            }
            const Completion c = run_algorithm(algo, m, config.solver, false);
            std::filesystem::create_directories(ctx.out_dir);
            write_matrix_csv(c.estimate, ctx.out_dir / "Mhat.csv");
            out << "wrote " << (ctx.out_dir / "Mhat.csv").string() << " ("
                << c.report.iterations() << " iterations)\n";
        }
    } catch (const StructuralError& e) {
        err << "structural error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

int cli_main(int argc, char** argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return cli_main(args, std::cout, std::cerr);
}

} // namespace hankelmc

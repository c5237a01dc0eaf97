#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <hankelmc/cli.hpp>
#include <hankelmc/experiments.hpp>
#include <hankelmc/io.hpp>

using namespace hankelmc;

namespace
{

struct Run
{
    int code = 0;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    Run r;
    r.code = cli_main(args, out, err);
    r.out  = out.str();
    r.err  = err.str();
    return r;
}

std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("hankelmc_cli_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("gen then complete reproduces the in-process estimate")
{
    const auto dir = scratch_dir("roundtrip");
    const std::string gen_dir = (dir / "gen").string();
    const std::string out_dir = (dir / "out").string();

    REQUIRE(run({"--out", gen_dir, "--seed", "1234", "gen"}).code == 0);
    const Run c = run({"--config", gen_dir + "/config.json", "--out", out_dir, "complete",
                       "--input", gen_dir + "/X.csv", "--mask", gen_dir + "/mask.csv"});
    REQUIRE(c.code == 0);

    ExperimentConfig config;
    config.scenario.rng_seed = 1234;
    config.solver.rng_seed   = solver_seed_for(1234);
    const Measurement m      = generate_scenario(config.scenario);
    const MatrixXc expected  = complete(m, config.solver);
    const MatrixXc from_file = read_matrix_csv(std::filesystem::path(out_dir) / "Mhat.csv");
    REQUIRE(from_file.rows() == expected.rows());
    REQUIRE(from_file.cols() == expected.cols());
    CHECK(from_file == expected);

    CHECK(read_matrix_csv(std::filesystem::path(gen_dir) / "truth.csv") == m.truth);
    CHECK((read_mask_csv(std::filesystem::path(gen_dir) / "mask.csv") == m.mask).all());
}

TEST_CASE("complete with an explicit algorithm")
{
    const auto dir = scratch_dir("algo");
    const std::string d = dir.string();
    REQUIRE(run({"--out", d, "--seed", "3", "gen"}).code == 0);
    for (const char* algo : {"L1", "L2", "SAP"}) {
        CHECK(run({"--out", d, "complete", "--input", d + "/X.csv", "--mask",
                   d + "/mask.csv", "--algo", algo})
                  .code == 0);
    }
    CHECK(run({"--out", d, "complete", "--input", d + "/X.csv", "--mask", d + "/mask.csv",
               "--algo", "MUSIC"})
              .code == 1);
}

TEST_CASE("exit codes")
{
    const Run missing = run({"--config", "/no/such/config.json", "phase"});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("/no/such/config.json") != std::string::npos);

    CHECK(run({"--bogus", "phase"}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({}).code == 1);
    CHECK(run({"--threads", "0", "phase"}).code == 1);
    CHECK(run({"--help"}).code == 0);

    const auto dir = scratch_dir("structural");
    Mask none = Mask::Constant(100, 20, false);
    none.col(0).setConstant(true);
    write_mask_csv(none, dir / "mask.csv");
    write_matrix_csv(MatrixXc::Ones(100, 20), dir / "X.csv");
    const Run structural = run({"--out", dir.string(), "complete", "--input",
                                (dir / "X.csv").string(), "--mask",
                                (dir / "mask.csv").string()});
    CHECK(structural.code == 2);

    std::ofstream(dir / "bad.json") << R"({"solver": {"unknown": 1}})";
    CHECK(run({"--config", (dir / "bad.json").string(), "gen"}).code == 1);
}

TEST_CASE("thread count falls back to the environment")
{
    const auto dir = scratch_dir("env");
    std::ofstream(dir / "tiny.json")
        << R"({"grid": {"ssr_values": [10], "failure_fractions": [0.1], "trials_per_cell": 2}})";
    ::setenv("HANKELMC_THREADS", "two", 1);
    CHECK(run({"--config", (dir / "tiny.json").string(), "--out", dir.string(), "phase"}).code == 1);
    ::setenv("HANKELMC_THREADS", "2", 1);
    CHECK(run({"--config", (dir / "tiny.json").string(), "--out", dir.string(), "phase"}).code == 0);
    // An explicit flag wins over a broken environment value.
    ::setenv("HANKELMC_THREADS", "two", 1);
    CHECK(run({"--config", (dir / "tiny.json").string(), "--out", dir.string(), "--threads",
               "1", "phase"})
              .code == 0);
    ::unsetenv("HANKELMC_THREADS");
}

TEST_CASE("phase smoke run on a 3 x 3 grid")
{
    const auto dir = scratch_dir("phase");
    std::ofstream(dir / "grid.json")
        << R"({"grid": {"ssr_values": [0, 10, 20], "failure_fractions": [0, 0.2, 0.4]}})";
    const Run r = run({"--config", (dir / "grid.json").string(), "--out",
                       (dir / "out").string(), "--trials", "10", "phase"});
    REQUIRE(r.code == 0);
    std::ifstream in(dir / "out" / "phase.csv");
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        ++lines;
    }
    CHECK(lines == 1 + 27);
    for (const char* algo : {"L1", "L2", "SAP"}) {
        CHECK(std::filesystem::exists(dir / "out" / (std::string("phase_") + algo + ".svg")));
    }
}

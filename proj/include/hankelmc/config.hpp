///
/// \file config.hpp
///
/// Experiment configuration: scenario, solver and grid sections.
///
#pragma once

#include <string>
#include <vector>

#include <hankelmc/lp_solver.hpp>
#include <hankelmc/sim_model.hpp>

namespace hankelmc
{

enum class Algorithm
{
    L1,
    L2,
    SAP,
};

std::string to_string(Algorithm algo);
Algorithm algorithm_from_string(const std::string& name);

struct GridSpec
{
    std::vector<double> ssr_values{-5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
    std::vector<double> failure_fractions{0.0, 0.1, 0.2, 0.3, 0.4};
    int trials_per_cell = 100;
    std::vector<Algorithm> algorithms{Algorithm::L1, Algorithm::L2,
                                      Algorithm::SAP};

    void validate() const;
    std::size_t cell_count() const
    {
        return ssr_values.size() * failure_fractions.size();
    }
};

struct ExperimentConfig
{
    ScenarioConfig scenario;
    SolverOptions solver;
    GridSpec grid;
};

} // namespace hankelmc

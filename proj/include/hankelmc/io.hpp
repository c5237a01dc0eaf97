///
/// \file io.hpp
///
/// JSON configuration and CSV matrix files.
///
/// Config documents are strict: unknown keys are rejected, missing keys
/// keep their defaults. Matrix CSV files start with a `<rows>,<cols>` line
/// followed by one `i,j,re,im` line per entry (0-based, row-major); mask
/// files use `i,j,bit`. Reals are written with 17 significant digits, which
/// round-trips every double exactly.
///
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include <hankelmc/config.hpp>
#include <hankelmc/types.hpp>

namespace hankelmc
{

using Json = nlohmann::json;

Json to_json(const ScenarioConfig& config);
Json to_json(const SolverOptions& options);
Json to_json(const GridSpec& grid);
Json to_json(const ExperimentConfig& config);

ScenarioConfig scenario_from_json(const Json& doc);
SolverOptions solver_from_json(const Json& doc);
GridSpec grid_from_json(const Json& doc);
ExperimentConfig experiment_from_json(const Json& doc);

/// Reads and validates a config file. Throws ValidationError naming the
/// path when it cannot be opened or parsed.
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& config,
                 const std::filesystem::path& path);

/// Shortest-exact formatting used for every real written by the toolkit.
std::string format_real(double value);

void write_matrix_csv(const MatrixXc& m, std::ostream& out);
void write_matrix_csv(const MatrixXc& m, const std::filesystem::path& path);
MatrixXc read_matrix_csv(std::istream& in);
MatrixXc read_matrix_csv(const std::filesystem::path& path);

void write_mask_csv(const Mask& mask, std::ostream& out);
void write_mask_csv(const Mask& mask, const std::filesystem::path& path);
Mask read_mask_csv(std::istream& in);
Mask read_mask_csv(const std::filesystem::path& path);

/// Writes `iter,objective,nrmse` rows (nrmse left empty when untracked).
void write_report_csv(const ResidualReport& report, std::ostream& out);

} // namespace hankelmc

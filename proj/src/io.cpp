#include <hankelmc/io.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>
#include <tuple>
#include <vector>

#include <hankelmc/errors.hpp>

namespace hankelmc
{

std::string to_string(Algorithm algo)
{
    switch (algo) {
    case Algorithm::L1:
        return "L1";
    case Algorithm::L2:
        return "L2";
    case Algorithm::SAP:
        return "SAP";
    }
    return "?";
}

Algorithm algorithm_from_string(const std::string& name)
{
    if (name == "L1") {
        return Algorithm::L1;
    }
    if (name == "L2") {
        return Algorithm::L2;
    }
    if (name == "SAP") {
        return Algorithm::SAP;
    }
    throw ValidationError("unknown algorithm '" + name + "'");
}

void GridSpec::validate() const
{
    if (ssr_values.empty() || failure_fractions.empty() || algorithms.empty()) {
        throw ValidationError("grid lists must be non-empty");
    }
    if (trials_per_cell < 1) {
        throw ValidationError("trials_per_cell must be positive");
    }
    for (double f : failure_fractions) {
        if (!(f >= 0.0 && f < 1.0)) {
            throw ValidationError("grid failure fractions must lie in [0, 1)");
        }
    }
}

//------------------------------------------------------------------------------
// JSON
//------------------------------------------------------------------------------

namespace
{

void check_keys(const Json& doc, std::initializer_list<const char*> allowed,
                const std::string& section)
{
    if (!doc.is_object()) {
        throw ValidationError("'" + section + "' must be a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        bool known = false;
        for (const char* a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            throw ValidationError("unknown key '" + key + "' in " + section);
        }
    }
}

template <typename T>
void read_field(const Json& doc, const char* key, T& target)
{
    if (!doc.contains(key)) {
        return;
    }
    try {
        target = doc.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("bad value for '") + key +
                              "': " + e.what());
    }
}

} // namespace

Json to_json(const ScenarioConfig& c)
{
    return Json{
        {"n_sensors", c.n_sensors},
        {"n_snapshots", c.n_snapshots},
        {"n_sources", c.n_sources},
        {"dir_angles", c.dir_angles},
        {"ssr_db", c.ssr_db},
        {"failure_fraction", c.failure_fraction},
        {"failure_mode", to_string(c.failure_mode)},
        {"k_dof", c.k_dof},
        {"rng_seed", c.rng_seed},
    };
}

Json to_json(const SolverOptions& o)
{
    return Json{
        {"p", to_string(o.p)},
        {"rank", o.rank},
        {"outer_iters", o.outer_iters},
        {"irls_iters", o.irls_iters},
        {"irls_epsilon", o.irls_epsilon},
        {"rel_tol", o.rel_tol},
        {"rng_seed", o.rng_seed},
        {"hankel_n1", o.hankel_n1},
    };
}

Json to_json(const GridSpec& g)
{
    Json algos = Json::array();
    for (Algorithm a : g.algorithms) {
        algos.push_back(to_string(a));
    }
    return Json{
        {"ssr_values", g.ssr_values},
        {"failure_fractions", g.failure_fractions},
        {"trials_per_cell", g.trials_per_cell},
        {"algorithms", algos},
    };
}

Json to_json(const ExperimentConfig& c)
{
    return Json{
        {"scenario", to_json(c.scenario)},
        {"solver", to_json(c.solver)},
        {"grid", to_json(c.grid)},
    };
}

ScenarioConfig scenario_from_json(const Json& doc)
{
    check_keys(doc,
               {"n_sensors", "n_snapshots", "n_sources", "dir_angles",
                "ssr_db", "failure_fraction", "failure_mode", "k_dof",
                "rng_seed"},
               "scenario");
    ScenarioConfig c;
    read_field(doc, "n_sensors", c.n_sensors);
    read_field(doc, "n_snapshots", c.n_snapshots);
    read_field(doc, "n_sources", c.n_sources);
    read_field(doc, "dir_angles", c.dir_angles);
    read_field(doc, "ssr_db", c.ssr_db);
    read_field(doc, "failure_fraction", c.failure_fraction);
    std::string mode = to_string(c.failure_mode);
    read_field(doc, "failure_mode", mode);
    c.failure_mode = failure_mode_from_string(mode);
    read_field(doc, "k_dof", c.k_dof);
    read_field(doc, "rng_seed", c.rng_seed);
    c.validate();
    return c;
}

SolverOptions solver_from_json(const Json& doc)
{
    check_keys(doc,
               {"p", "rank", "outer_iters", "irls_iters", "irls_epsilon",
                "rel_tol", "rng_seed", "hankel_n1"},
               "solver");
    SolverOptions o;
    std::string p = to_string(o.p);
    read_field(doc, "p", p);
    o.p = norm_from_string(p);
    read_field(doc, "rank", o.rank);
    read_field(doc, "outer_iters", o.outer_iters);
    read_field(doc, "irls_iters", o.irls_iters);
    read_field(doc, "irls_epsilon", o.irls_epsilon);
    read_field(doc, "rel_tol", o.rel_tol);
    read_field(doc, "rng_seed", o.rng_seed);
    read_field(doc, "hankel_n1", o.hankel_n1);
    o.validate();
    return o;
}

GridSpec grid_from_json(const Json& doc)
{
    check_keys(doc,
               {"ssr_values", "failure_fractions", "trials_per_cell",
                "algorithms"},
               "grid");
    GridSpec g;
    read_field(doc, "ssr_values", g.ssr_values);
    read_field(doc, "failure_fractions", g.failure_fractions);
    read_field(doc, "trials_per_cell", g.trials_per_cell);
    if (doc.contains("algorithms")) {
        std::vector<std::string> names;
        read_field(doc, "algorithms", names);
        g.algorithms.clear();
        for (const auto& n : names) {
            g.algorithms.push_back(algorithm_from_string(n));
        }
    }
    g.validate();
    return g;
}

ExperimentConfig experiment_from_json(const Json& doc)
{
    check_keys(doc, {"scenario", "solver", "grid"}, "config");
    ExperimentConfig c;
    if (doc.contains("scenario")) {
        c.scenario = scenario_from_json(doc.at("scenario"));
    }
    if (doc.contains("solver")) {
        c.solver = solver_from_json(doc.at("solver"));
    }
    if (doc.contains("grid")) {
        c.grid = grid_from_json(doc.at("grid"));
    }
    if (c.solver.rank != c.scenario.n_sources) {
        throw ValidationError("solver.rank must equal scenario.n_sources");
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open config file '" + path.string() +
                              "'");
    }
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("cannot parse config file '" + path.string() +
                              "': " + e.what());
    }
    try {
        return experiment_from_json(doc);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void save_config(const ExperimentConfig& config,
                 const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot write '" + path.string() + "'");
    }
    out << to_json(config).dump(2) << '\n';
}

//------------------------------------------------------------------------------
// CSV
//------------------------------------------------------------------------------

std::string format_real(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace
{

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no)
{
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
        field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r' ||
                              field.back() == '\t')) {
        field.remove_suffix(1);
    }
    T value{};
    const auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ValidationError("CSV line " + std::to_string(line_no) +
                              ": cannot parse '" + std::string(field) + "'");
    }
    return value;
}

std::ofstream open_for_write(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot write '" + path.string() + "'");
    }
    return out;
}

std::ifstream open_for_read(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open '" + path.string() + "'");
    }
    return in;
}

// Reads the `<rows>,<cols>` line and then calls `entry(i, j, fields)` for
// every following entry, checking that each cell appears exactly once.
template <typename OnEntry>
std::pair<Index, Index> read_entries(std::istream& in, std::size_t width,
                                     OnEntry&& entry)
{
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) {
        throw ValidationError("CSV: missing dimension line");
    }
    const auto dims = split(line);
    if (dims.size() != 2) {
        throw ValidationError("CSV: dimension line must be '<rows>,<cols>'");
    }
    const auto rows = parse_number<Index>(dims[0], line_no);
    const auto cols = parse_number<Index>(dims[1], line_no);
    if (rows < 1 || cols < 1) {
        throw ValidationError("CSV: dimensions must be positive");
    }
    Mask seen = Mask::Constant(rows, cols, false);
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto fields = split(line);
        if (fields.size() != width) {
            throw ValidationError("CSV line " + std::to_string(line_no) +
                                  ": expected " + std::to_string(width) +
                                  " fields");
        }
        const auto i = parse_number<Index>(fields[0], line_no);
        const auto j = parse_number<Index>(fields[1], line_no);
        if (i < 0 || i >= rows || j < 0 || j >= cols) {
            throw ValidationError("CSV line " + std::to_string(line_no) +
                                  ": index out of range");
        }
        if (seen(i, j)) {
            throw ValidationError("CSV line " + std::to_string(line_no) +
                                  ": duplicate entry");
        }
        seen(i, j) = true;
        entry(i, j, fields, line_no);
    }
    if (!seen.all()) {
        throw ValidationError("CSV: missing entries");
    }
    return {rows, cols};
}

} // namespace

void write_matrix_csv(const MatrixXc& m, std::ostream& out)
{
    out << m.rows() << ',' << m.cols() << '\n';
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            out << i << ',' << j << ',' << format_real(m(i, j).real()) << ','
                << format_real(m(i, j).imag()) << '\n';
        }
    }
}

void write_matrix_csv(const MatrixXc& m, const std::filesystem::path& path)
{
    auto out = open_for_write(path);
    write_matrix_csv(m, out);
}

MatrixXc read_matrix_csv(std::istream& in)
{
    std::vector<std::tuple<Index, Index, Complex>> entries;
    const auto [rows, cols] = read_entries(
        in, 4, [&](Index i, Index j, const auto& f, std::size_t line_no) {
            entries.emplace_back(i, j,
                                 Complex(parse_number<double>(f[2], line_no),
                                         parse_number<double>(f[3], line_no)));
        });
    MatrixXc m(rows, cols);
    for (const auto& [i, j, v] : entries) {
        m(i, j) = v;
    }
    return m;
}

MatrixXc read_matrix_csv(const std::filesystem::path& path)
{
    auto in = open_for_read(path);
    try {
        return read_matrix_csv(in);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_mask_csv(const Mask& mask, std::ostream& out)
{
    out << mask.rows() << ',' << mask.cols() << '\n';
    for (Index i = 0; i < mask.rows(); ++i) {
        for (Index j = 0; j < mask.cols(); ++j) {
            out << i << ',' << j << ',' << (mask(i, j) ? 1 : 0) << '\n';
        }
    }
}

void write_mask_csv(const Mask& mask, const std::filesystem::path& path)
{
    auto out = open_for_write(path);
    write_mask_csv(mask, out);
}

Mask read_mask_csv(std::istream& in)
{
    std::vector<std::tuple<Index, Index, bool>> entries;
    const auto [rows, cols] = read_entries(
        in, 3, [&](Index i, Index j, const auto& f, std::size_t line_no) {
            const int bit = parse_number<int>(f[2], line_no);
            if (bit != 0 && bit != 1) {
                throw ValidationError("mask CSV line " +
                                      std::to_string(line_no) +
                                      ": bit must be 0 or 1");
            }
            entries.emplace_back(i, j, bit == 1);
        });
    Mask mask(rows, cols);
    for (const auto& [i, j, v] : entries) {
        mask(i, j) = v;
    }
    return mask;
}

Mask read_mask_csv(const std::filesystem::path& path)
{
    auto in = open_for_read(path);
    try {
        return read_mask_csv(in);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_report_csv(const ResidualReport& report, std::ostream& out)
{
    out << "iter,objective,nrmse\n";
    for (std::size_t k = 0; k < report.objective.size(); ++k) {
        out << (k + 1) << ',' << format_real(report.objective[k]) << ',';
        if (k < report.nrmse.size()) {
            out << format_real(report.nrmse[k]);
        }
        out << '\n';
    }
}

} // namespace hankelmc

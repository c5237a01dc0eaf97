#include <hankelmc/sim_model.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <hankelmc/errors.hpp>

namespace hankelmc
{

std::string to_string(FailureMode mode)
{
    switch (mode) {
    case FailureMode::RandomChannels:
        return "RandomChannels";
    case FailureMode::ContiguousChannels:
        return "ContiguousChannels";
    }
    return "?";
}

FailureMode failure_mode_from_string(const std::string& name)
{
    if (name == "RandomChannels") {
        return FailureMode::RandomChannels;
    }
    if (name == "ContiguousChannels") {
        return FailureMode::ContiguousChannels;
    }
    throw ValidationError("unknown failure_mode '" + name + "'");
}

namespace
{

void check_angle(double angle_deg)
{
    if (!(angle_deg > -90.0 && angle_deg < 90.0)) {
        throw DomainError("angle " + std::to_string(angle_deg) +
                          " deg outside (-90, 90)");
    }
}

void check_distinct(std::span<const double> angles)
{
    std::vector<double> sorted(angles.begin(), angles.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ValidationError("duplicate direction angles");
    }
}

Index round_half_up(double x)
{
    return static_cast<Index>(std::floor(x + 0.5));
}

} // namespace

Index ScenarioConfig::failed_channel_count() const
{
    return round_half_up(failure_fraction * static_cast<double>(n_sensors));
}

void ScenarioConfig::validate() const
{
    if (n_sources < 1 || n_sensors < 1 || n_snapshots < 1) {
        throw ValidationError("n_sensors, n_snapshots and n_sources must be "
                              "positive");
    }
    if (!(n_sources < n_sensors && n_sensors < n_snapshots)) {
        throw ValidationError("expected n_sources < n_sensors < n_snapshots");
    }
    if (static_cast<Index>(dir_angles.size()) != n_sources) {
        throw ValidationError("dir_angles must list exactly n_sources angles");
    }
    for (double a : dir_angles) {
        check_angle(a);
    }
    check_distinct(dir_angles);
    if (!(failure_fraction >= 0.0 && failure_fraction < 1.0)) {
        throw ValidationError("failure_fraction must lie in [0, 1)");
    }
    if (n_sensors - failed_channel_count() < n_sources + 1) {
        throw ValidationError("failure_fraction leaves fewer than "
                              "n_sources + 1 observed channels");
    }
    if (!(k_dof > 0.0)) {
        throw DomainError("k_dof must be positive");
    }
    if (std::isnan(ssr_db) || ssr_db == -HUGE_VAL) {
        throw ValidationError("ssr_db must be a number");
    }
}

VectorXc steering_vector(double angle_deg, Index n_sensors)
{
    check_angle(angle_deg);
    const double phase_step =
        std::numbers::pi * std::sin(angle_deg * std::numbers::pi / 180.0);
    VectorXc a(n_sensors);
    for (Index k = 0; k < n_sensors; ++k) {
        a(k) = std::polar(1.0, phase_step * static_cast<double>(k));
    }
    return a;
}

MatrixXc build_steering_matrix(std::span<const double> angles_deg,
                               Index n_sensors)
{
    if (n_sensors < 1) {
        throw ValidationError("build_steering_matrix: n_sensors must be >= 1");
    }
    for (double a : angles_deg) {
        check_angle(a);
    }
    check_distinct(angles_deg);
    MatrixXc steering(n_sensors, static_cast<Index>(angles_deg.size()));
    for (Index p = 0; p < steering.cols(); ++p) {
        steering.col(p) = steering_vector(angles_deg[p], n_sensors);
    }
    return steering;
}

MatrixXc sample_signal(Index n_sources, Index n_snapshots, Rng& rng)
{
    if (n_sources < 1 || n_snapshots < 1) {
        throw ValidationError("sample_signal: sizes must be positive");
    }
    MatrixXc s(n_sources, n_snapshots);
    // Column-major fill; the draw order is part of the seed contract.
    for (Index m = 0; m < n_snapshots; ++m) {
        for (Index p = 0; p < n_sources; ++p) {
            s(p, m) = rng.complex_normal();
        }
    }
    return s;
}

double sample_envelope(double dof, Rng& rng)
{
    if (!(dof > 0.0)) {
        throw DomainError("envelope degrees of freedom must be positive");
    }
    return rng.gamma(0.5 * dof, 2.0);
}

MatrixXc sample_reverberation(Index n_sensors, Index n_snapshots, double dof,
                              Rng& rng)
{
    if (!(dof > 0.0)) {
        throw DomainError("envelope degrees of freedom must be positive");
    }
    MatrixXc r(n_sensors, n_snapshots);
    for (Index m = 0; m < n_snapshots; ++m) {
        for (Index k = 0; k < n_sensors; ++k) {
            const double envelope = sample_envelope(dof, rng);
            const double phase = 2.0 * std::numbers::pi * rng.uniform_open();
            r(k, m) = std::polar(envelope, phase);
        }
    }
    return r;
}

double complex_variance(const MatrixXc& values)
{
    if (values.size() == 0) {
        return 0.0;
    }
    const Complex mean = values.mean();
    return (values.array() - mean).abs2().mean();
}

MatrixXc scale_to_ssr(const MatrixXc& signal, const MatrixXc& reverb,
                      double ssr_db)
{
    const double var_s = complex_variance(signal);
    const double var_n = complex_variance(reverb);
    if (!(var_s > 0.0)) {
        throw ValidationError("scale_to_ssr: signal has zero variance");
    }
    if (!(var_n > 0.0)) {
        throw ValidationError("scale_to_ssr: reverberation has zero variance");
    }
    const double target = var_s / std::pow(10.0, ssr_db / 10.0);
    return reverb * std::sqrt(target / var_n);
}

Mask sample_failure_mask(Index n_sensors, Index n_snapshots,
                         double failure_fraction, FailureMode mode,
                         Index min_observed, Rng& rng)
{
    if (n_sensors < 1 || n_snapshots < 1) {
        throw ValidationError("sample_failure_mask: sizes must be positive");
    }
    if (!(failure_fraction >= 0.0 && failure_fraction < 1.0)) {
        throw ValidationError("failure_fraction must lie in [0, 1)");
    }
    const Index failed =
        round_half_up(failure_fraction * static_cast<double>(n_sensors));
    if (n_sensors - failed < min_observed) {
        throw ValidationError("too few surviving channels: " +
                              std::to_string(n_sensors - failed) + " < " +
                              std::to_string(min_observed));
    }

    Mask mask = Mask::Constant(n_snapshots, n_sensors, true);
    if (failed == 0) {
        return mask;
    }
    if (mode == FailureMode::RandomChannels) {
        std::vector<Index> channels(static_cast<std::size_t>(n_sensors));
        std::iota(channels.begin(), channels.end(), Index{0});
        // Partial Fisher-Yates: the first `failed` slots are the sample.
        for (Index i = 0; i < failed; ++i) {
            const auto span = static_cast<std::uint64_t>(n_sensors - i);
            const auto j    = i + static_cast<Index>(rng.uniform_index(span));
            std::swap(channels[static_cast<std::size_t>(i)],
                      channels[static_cast<std::size_t>(j)]);
            mask.col(channels[static_cast<std::size_t>(i)]).setConstant(false);
        }
    } else {
        const auto starts = static_cast<std::uint64_t>(n_sensors - failed + 1);
        const auto start  = static_cast<Index>(rng.uniform_index(starts));
        mask.middleCols(start, failed).setConstant(false);
    }
    return mask;
}

Measurement assemble_measurement(const MatrixXc& steering,
                                 const MatrixXc& signal_matrix,
                                 const MatrixXc& reverb, const Mask& mask)
{
    const Index n = steering.rows();
    const Index m = signal_matrix.cols();
    if (steering.cols() != signal_matrix.rows() || reverb.rows() != n ||
        reverb.cols() != m || mask.rows() != m || mask.cols() != n) {
        throw ValidationError("assemble_measurement: dimension mismatch");
    }
    Measurement out;
    out.truth = steering * signal_matrix;
    out.mask  = mask;
    out.data  = mask.select((out.truth + reverb).transpose(), Complex(0.0));
    return out;
}

Measurement generate_scenario(const ScenarioConfig& config)
{
    config.validate();
    Rng rng(config.rng_seed);
    const MatrixXc steering =
        build_steering_matrix(config.dir_angles, config.n_sensors);
    const MatrixXc s =
        sample_signal(config.n_sources, config.n_snapshots, rng);
    MatrixXc reverb = sample_reverberation(config.n_sensors,
                                           config.n_snapshots, config.k_dof,
                                           rng);
    const Mask mask = sample_failure_mask(
        config.n_sensors, config.n_snapshots, config.failure_fraction,
        config.failure_mode, config.n_sources + 1, rng);

    if (std::isinf(config.ssr_db)) {
        reverb.setZero();
    } else {
        reverb = scale_to_ssr(steering * s, reverb, config.ssr_db);
    }
    return assemble_measurement(steering, s, reverb, mask);
}

} // namespace hankelmc

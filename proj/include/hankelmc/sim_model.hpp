///
/// \file sim_model.hpp
///
/// Synthetic sonar array data: a half-wavelength uniform linear array
/// observing `r` narrowband sources in K/chi-square distributed
/// reverberation, with whole sensor channels failing.
///
/// Conventions:
///   - steering entry for sensor k (0-based) and angle t is
///     exp(j * pi * k * sin(t)), so sensor 0 is the phase reference;
///   - the clean signal `A * S` is N x M (sensors x snapshots);
///   - the measured data matrix `X` is its M x N transpose, so a failed
///     channel is a zero *column* of `X`.
///
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <hankelmc/random.hpp>
#include <hankelmc/types.hpp>

namespace hankelmc
{

enum class FailureMode
{
    RandomChannels,
    ContiguousChannels,
};

std::string to_string(FailureMode mode);
FailureMode failure_mode_from_string(const std::string& name);

/// Full description of one synthetic experiment.
struct ScenarioConfig
{
    Index n_sensors  = 20;  ///< N
    Index n_snapshots = 100; ///< M
    Index n_sources  = 2;   ///< r
    std::vector<double> dir_angles{-20.0, 30.0}; ///< degrees, in (-90, 90)
    double ssr_db           = 10.0;
    double failure_fraction = 0.3;
    FailureMode failure_mode = FailureMode::RandomChannels;
    double k_dof            = 0.1; ///< degrees of freedom n of the envelope
    std::uint64_t rng_seed  = 0;

    /// Throws ValidationError / DomainError on violated invariants.
    void validate() const;

    /// round(failure_fraction * N) with ties rounded up.
    Index failed_channel_count() const;
};

/// Steering vector a(angle) of length `n_sensors`.
VectorXc steering_vector(double angle_deg, Index n_sensors);

/// N x r steering matrix, column p for `angles_deg[p]`.
MatrixXc build_steering_matrix(std::span<const double> angles_deg,
                               Index n_sensors);

/// r x M i.i.d. unit-variance circular complex Gaussian source matrix.
MatrixXc sample_signal(Index n_sources, Index n_snapshots, Rng& rng);

/// Envelope drawn from the chi-square form density with `dof` degrees of
/// freedom (Gamma with shape dof/2, scale 2).
double sample_envelope(double dof, Rng& rng);

/// N x M reverberation R = envelope * exp(j * phase), phase ~ U(0, 2 pi).
MatrixXc sample_reverberation(Index n_sensors, Index n_snapshots, double dof,
                              Rng& rng);

/// Variance of the complex entries: mean |z - mean(z)|^2.
double complex_variance(const MatrixXc& values);

///
/// Rescales `reverb` so that 10 log10(var(signal) / var(scaled)) = ssr_db.
/// `signal` is the clean N x M matrix A * S.
///
MatrixXc scale_to_ssr(const MatrixXc& signal, const MatrixXc& reverb,
                      double ssr_db);

///
/// M x N channel-failure mask (true = observed). Exactly
/// round(fraction * N) whole columns are cleared; at least `min_observed`
/// channels must survive.
///
Mask sample_failure_mask(Index n_sensors, Index n_snapshots,
                         double failure_fraction, FailureMode mode,
                         Index min_observed, Rng& rng);

/// Array data matrix together with its mask and the clean ground truth.
struct Measurement
{
    MatrixXc data;  ///< X, M x N, zero where the mask is false
    Mask mask;      ///< B, M x N
    MatrixXc truth; ///< A * S, N x M
};

/// X = B .* (A S + R)^T.
Measurement assemble_measurement(const MatrixXc& steering,
                                 const MatrixXc& signal_matrix,
                                 const MatrixXc& reverb, const Mask& mask);

///
/// Draws a complete scenario from `config.rng_seed`. The draw order is
/// signal, reverberation, failure mask. An `ssr_db` of +infinity yields a
/// reverberation-free measurement.
///
Measurement generate_scenario(const ScenarioConfig& config);

} // namespace hankelmc

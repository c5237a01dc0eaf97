///
/// \file doa.hpp
///
/// Conventional (Bartlett) beamforming on a half-wavelength ULA, peak
/// picking and the DOA error measure.
///
#pragma once

#include <span>
#include <vector>

#include <hankelmc/types.hpp>

namespace hankelmc
{

/// Uniform grid strictly inside (-90, 90): -90 + step, -90 + 2 step, ...
std::vector<double> angle_grid(double step_deg = 0.1);

struct SpatialSpectrum
{
    std::vector<double> angles; ///< degrees
    std::vector<double> values; ///< max-normalized power

    std::size_t size() const { return angles.size(); }
};

struct DoaEstimate
{
    std::vector<double> angles; ///< sorted ascending
    /// Set when fewer than r local maxima existed and the estimate was
    /// padded with the largest remaining grid values.
    bool padded = false;
};

/// (1 / M) D D^H for N x M data.
MatrixXc sample_covariance(const MatrixXc& data);

///
/// P(t) = a(t)^H C a(t) / N^2 over `grid`, normalized so that max P = 1.
/// Throws ValidationError for an all-zero covariance.
///
SpatialSpectrum bartlett_spectrum(const MatrixXc& covariance,
                                  std::span<const double> grid);

/// Indices of local maxima: samples greater than both neighbours, or the
/// centre of a flat run of equal samples that is greater than both sides.
std::vector<std::size_t> local_maxima(const SpatialSpectrum& spectrum);

///
/// The r largest local maxima, each refined by three-point parabolic
/// interpolation, sorted ascending.
///
DoaEstimate pick_peaks(const SpatialSpectrum& spectrum, std::size_t r);

/// Spectrum and peaks of N x M data in one step.
DoaEstimate estimate_doa(const MatrixXc& data, std::size_t r,
                         std::span<const double> grid);

///
/// sqrt( (1 / (T r)) sum_trials sum_p (est_p - truth_p)^2 ) in degrees,
/// with estimates and truth both sorted ascending before pairing.
///
double rmse_theta(std::span<const DoaEstimate> estimates,
                  std::span<const double> truth);

/// Beam-pattern figures of merit for one spectrum.
struct BeamMetrics
{
    /// -3 dB width of the lobe containing the global maximum, degrees.
    double beamwidth_3db = 0.0;
    /// Highest local maximum outside the main lobes of the r strongest
    /// peaks, dB relative to the global maximum (-inf if none).
    double peak_sidelobe_db = 0.0;
    /// Local maxima above -10 dB that lie farther than the first-null
    /// half-width (|sin t - sin t0| > 2 / N) from every true direction.
    int spurious_peaks = 0;
};

BeamMetrics beam_metrics(const SpatialSpectrum& spectrum,
                         std::span<const double> truth_deg, Index n_sensors,
                         std::size_t r);

} // namespace hankelmc

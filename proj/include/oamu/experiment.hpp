#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oamu/states.hpp"

namespace oamu {

/// Helicity-scan readout settings. Mode weights |c_m|^2 for |m| <= n_max are
/// read out with Poisson counting noise of scale `shots` per run; `repeats`
/// independent runs feed the error bars. The dispersion estimator is either
/// the prepared state's exact value (nominal) or rebuilt from the measured
/// weights assuming real nonnegative amplitudes (reconstructed).
struct MeasurementConfig {
    int n_max = 20;
    double shots = 1e4;
    int repeats = 1;
    std::uint64_t seed = 0;
    enum class DEstimator { nominal, reconstructed };
    DEstimator d_estimator = DEstimator::nominal;
};

struct ValueWithError {
    double value = 0.0;
    double std_error = 0.0;
};

struct MeasurementRecord {
    std::vector<std::vector<double>> repeat_weights;  // per surviving repeat, m = -n_max..n_max
    std::vector<double> mean_weights;                 // averaged, renormalized
    ValueWithError var_l_est;
    ValueWithError dispersion_sq_est;
    ValueWithError product_est;     // D^2 (dL)^2
    ValueWithError product_dl_est;  // D dL
    int discarded_repeats = 0;
};

/// Simulated helicity scan of a prepared state. Each repeat truncates the
/// true weights to |m| <= n_max, renormalizes, draws Poisson(shots * w_m)
/// counts per helicity, and estimates the moments from the counts. Repeats
/// with zero total count are discarded and flagged.
MeasurementRecord measure(const ModeSpectrum& state, const MeasurementConfig& config);

struct IdealMeasurement {
    double dispersion_sq = 0.0;
    double var_l = 0.0;
    double product = 0.0;     // D^2 (dL)^2
    double product_dl = 0.0;  // D dL
};

/// Noise-free readout: exact weights truncated to |m| <= n_max and
/// renormalized (the infinite-shots limit of measure()).
IdealMeasurement measure_ideal(const ModeSpectrum& state, int n_max,
                               MeasurementConfig::DEstimator d_estimator =
                                   MeasurementConfig::DEstimator::nominal);

struct TheoryRow {
    double d = 0.0;           // dispersion D
    double parameter = 0.0;   // Mathieu q or von Mises kappa
    double dispersion_sq = 0.0;
    double var_l = 0.0;
    double dl = 0.0;
    double product_dl = 0.0;  // D dL
    double product_sq = 0.0;  // D^2 (dL)^2
    double bound_dl = 0.0;    // sqrt(1 - D^2)/2
    double bound_sq = 0.0;    // (1 - D^2)/4
};

struct SimulatedPoint {
    double kappa = 0.0;
    double d = 0.0;
    double product = 0.0;  // D dL
    double err = 0.0;
    double product_sq = 0.0;
    double err_sq = 0.0;
};

struct Figure1Dataset {
    std::vector<TheoryRow> mathieu;    // minimum-uncertainty curve
    std::vector<TheoryRow> vonmises;   // comparison curve on the same D grid
    std::vector<double> vm_minus_mathieu_dl;  // per grid row, D dL units
    std::vector<SimulatedPoint> points;
    double max_abs_difference_dl = 0.0;
    double d_min = 0.0;
    double d_max = 0.0;
};

/// Theory curves on a uniform D grid [d_min, d_max] plus simulated
/// measurement points for the given prepared von Mises concentrations.
Figure1Dataset figure1_dataset(std::span<const double> kappas, const MeasurementConfig& config,
                               double d_min = 0.02, double d_max = 0.999, int grid_points = 120);

}  // namespace oamu

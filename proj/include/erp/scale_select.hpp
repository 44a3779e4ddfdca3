#pragma once

#include <vector>

#include "erp/config.hpp"
#include "erp/signal.hpp"
#include "erp/wavelet.hpp"

namespace erp {

struct ScaleEnergy {
    std::vector<int> scales;
    std::vector<double> energy; // S(a), microvolt-samples
    int best = 0;               // argmax scale, ties toward the smaller scale
};

struct ConeReport {
    bool localized = false;
    std::size_t peak_time_index = 0; // column of the global |C| maximum
    int peak_scale = 0;              // scale of that maximum
    double concentration = 0.0;      // fraction of retained coefficients near the peak
};

struct ThresholdCalibration {
    double c_tau = 0.0;
    std::size_t n_trials = 0;
    std::vector<double> per_trial_peaks;
};

// Per-scale L1 sums of the coefficient rows.
ScaleEnergy scale_energy(const CwtMatrix& cwt);

// Concentration of the retained (>= c_tau) coefficients around the global
// |C| maximum: fraction inside +-window_ms of its time index. With nothing
// retained the report is degenerate (not localized, concentration 0).
ConeReport cone_of_influence(const CwtMatrix& cwt, double c_tau,
                             double window_ms, double fraction);

// Analysis scale: the scale of the largest coefficient (the cone peak).
// The configured band must intersect the matrix scales.
int select_analysis_scale(const CwtMatrix& cwt, const ConeReport& cone,
                          const DetectorConfig& config);

// 50% rule: per trial, the peak positive coefficient at the selected scale
// within the post-stimulus calibration window; c_tau is half their mean.
ThresholdCalibration calibrate_threshold(const std::vector<Signal>& labeled_trials,
                                         const WaveletSpec& spec,
                                         const DetectorConfig& config);

// Calibration search window, ms after stimulus onset.
constexpr double kCalibrationWindowLowMs = 100.0;
constexpr double kCalibrationWindowHighMs = 250.0;

} // namespace erp

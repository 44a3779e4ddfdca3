#pragma once

#include <cstdint>
#include <vector>

#include "erp/detector.hpp"
#include "erp/synth.hpp"

namespace erp {

struct EvalReport {
    std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
    double hit_rate = 0.0;       // tp / (tp + fn)
    double rejection_rate = 0.0; // tn / (tn + fp)
    double overall = 0.0;        // (tp + tn) / total
    std::vector<double> latency_errors_ms; // |detected n1 - truth n1| per true positive
};

// Latency gate for counting a present detection as a true positive.
constexpr double kLatencyGateMs = 30.0;

// Confusion counts over aligned detection/truth lists. A detection on an
// ERP trial counts as tp only when its n1 latency error is within the gate.
EvalReport score(const std::vector<Detection>& detections,
                 const std::vector<TrialTruth>& truths, double rate_hz);

// Coefficient-pair period statistics measured on labeled calibration trials:
// the spacing between each trial's peak positive coefficient (calibration
// window) and the strongest preceding negative extremum.
struct PeriodCalibration {
    double window_low_ms = 0.0;
    double window_high_ms = 0.0;
    double center_ms = 0.0;
    std::vector<double> spacings_ms;
};
PeriodCalibration calibrate_period_window(const std::vector<Signal>& labeled_trials,
                                          const DetectorConfig& config);

struct BenchmarkRun {
    EvalReport report;
    DetectorConfig effective_config; // defaults + calibrated c_tau and period window
    std::size_t calibration_trials = 0;
};

// Two-stage protocol: calibrate on the first `calibration_trials` ERP-bearing
// trials (c_tau by the 50% rule, pair-period window from the same trials),
// then detect and score the remaining trials. Deterministic per corpus.
BenchmarkRun run_benchmark(const std::vector<LabeledTrial>& corpus,
                           const DetectorConfig& config,
                           std::size_t calibration_trials = 20);

} // namespace erp

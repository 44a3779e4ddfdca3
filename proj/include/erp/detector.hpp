#pragma once

#include <cstdint>
#include <vector>

#include "erp/config.hpp"
#include "erp/scale_select.hpp"
#include "erp/signal.hpp"
#include "erp/wavelet.hpp"

namespace erp {

// Candidate negative/positive coefficient extremum pair. The negative
// extremum precedes the positive one; the period lies inside the configured
// window and the score weights the pair energy by the period Gaussian.
struct CoefficientPair {
    std::int64_t neg_index = 0; // t2
    std::int64_t pos_index = 0; // t1
    double neg_value = 0.0;
    double pos_value = 0.0;
    double period_ms = 0.0; // (t1 - t2) in ms
    double energy = 0.0;    // |neg| + |pos|
    double score = 0.0;     // energy * gaussian_weight(period)
};

struct Peak {
    std::int64_t index = 0;
    double latency_ms = 0.0; // measured from the stimulus onset (trial start if none)
    double amplitude_uv = 0.0;
};

enum class PeakFailure {
    none,
    no_persistent_minimum,
    p1_missing,
    p2_missing,
    p1_n1_period,
    n1_p2_period,
    total_period, // signals the retry path
};

const char* peak_failure_name(PeakFailure f);

struct PeakCandidate {
    bool ok = false;
    PeakFailure failure = PeakFailure::none;
    Peak p1, n1, p2;
};

struct Detection {
    bool present = false;
    std::int64_t start_index = 0;
    std::int64_t end_index = 0;
    Peak p1, n1, p2;
    int best_scale = 0;
    CoefficientPair pair;
    bool retried = false;
};

// exp(-(period-center)^2 / (2 sigma^2)); 1 at the center.
double gaussian_weight(double period_ms, double center_ms, double sigma_ms);

// Proximity detection over one coefficient row: threshold, extremum search
// inside the post-onset window, pair formation, Gaussian-weighted ranking.
// Positive extrema must reach +c_tau; negative extrema qualify by sign.
// An empty result is the absence path, not an error.
std::vector<CoefficientPair> proximity_detect(const std::vector<double>& coeff_row,
                                              const DetectorConfig& config,
                                              double rate_hz,
                                              std::int64_t onset_index);

// Slope-persistence peak identification inside the proximity frame (the pair
// span extended by 20 ms, plus frame_extra_ms on retries). N1 anchors at the
// frame minimum; P1/P2 are the strongest persistent maxima inside the
// admissible inter-peak period windows.
PeakCandidate detect_peaks(const Signal& preprocessed, const CoefficientPair& pair,
                           const DetectorConfig& config, int persistence = 3,
                           double frame_extra_ms = 0.0);

// Total-period check and segment marking with the configured padding.
// A total-period violation returns ok=false with failure=total_period.
struct SegmentResult {
    bool ok = false;
    PeakFailure failure = PeakFailure::none;
    Detection detection;
};
SegmentResult validate_and_segment(const PeakCandidate& peaks, const Signal& signal,
                                   const DetectorConfig& config);

// Precomputed pipeline state (wavelet samples + lowpass filter) for a fixed
// config and sampling rate. run() is pure and safe to call concurrently.
class Detector {
  public:
    Detector(const DetectorConfig& config, double rate_hz);

    Detection run(const Signal& signal) const;
    const DetectorConfig& config() const { return config_; }
    double rate_hz() const { return rate_hz_; }

    // Preprocessed copy of the input (the signal the peak stage sees).
    Signal preprocess(const Signal& signal) const;

    // CWT of the preprocessed signal over the configured scale band.
    CwtMatrix transform(const Signal& preprocessed) const;

  private:
    DetectorConfig config_;
    double rate_hz_;
    WaveletSpec spec_;
    SampledWavelet psi_;
    std::vector<double> lowpass_taps_;
    std::vector<int> band_;
};

// Full pipeline: preprocess, CWT over the scale band, cone decision, scale
// selection, proximity ranking, peak identification with one bounded retry
// (persistence 2, frame widened 20 ms). Absence is a valid result.
Detection detect(const Signal& signal, const DetectorConfig& config);

} // namespace erp

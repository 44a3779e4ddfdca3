#include "erp/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "erp/fir.hpp"

namespace erp {
namespace {

constexpr int kRetryPersistence = 2;
constexpr double kFrameBaseExtensionMs = 20.0;
constexpr double kRetryFrameWidenMs = 20.0;

// Slope-sign persistence with an amplitude tolerance: the point must be a
// local extremum against its immediate neighbours, and micro-ripple smaller
// than eps along the k-sample approach does not count as a slope reversal.
bool local_min_persist(const std::vector<double>& x, std::int64_t i, int k,
                       double eps = 0.0) {
    const auto n = static_cast<std::int64_t>(x.size());
    if (i - k < 0 || i + k >= n) return false;
    if (x[static_cast<std::size_t>(i)] > x[static_cast<std::size_t>(i - 1)] ||
        x[static_cast<std::size_t>(i)] > x[static_cast<std::size_t>(i + 1)])
        return false;
    for (std::int64_t j = 1; j <= k; ++j) {
        if (x[static_cast<std::size_t>(i - j)] < x[static_cast<std::size_t>(i - j + 1)] - eps)
            return false;
        if (x[static_cast<std::size_t>(i + j)] < x[static_cast<std::size_t>(i + j - 1)] - eps)
            return false;
    }
    return true;
}

bool local_max_persist(const std::vector<double>& x, std::int64_t i, int k,
                       double eps = 0.0) {
    const auto n = static_cast<std::int64_t>(x.size());
    if (i - k < 0 || i + k >= n) return false;
    if (x[static_cast<std::size_t>(i)] < x[static_cast<std::size_t>(i - 1)] ||
        x[static_cast<std::size_t>(i)] < x[static_cast<std::size_t>(i + 1)])
        return false;
    for (std::int64_t j = 1; j <= k; ++j) {
        if (x[static_cast<std::size_t>(i - j)] > x[static_cast<std::size_t>(i - j + 1)] + eps)
            return false;
        if (x[static_cast<std::size_t>(i + j)] > x[static_cast<std::size_t>(i + j - 1)] + eps)
            return false;
    }
    return true;
}

// Strongest persistent local maximum within [lo_ms, hi_ms] of n1 on the given
// side. Maxima closer than lo_ms are treated as noise peaks and skipped; if
// only such maxima exist the failure names the violated lower bound.
struct ScanResult {
    std::int64_t index = -1;
    bool saw_sub_period_peak = false;
};

ScanResult scan_for_peak(const std::vector<double>& x, std::int64_t n1, int k,
                         double lo_ms, double hi_ms, double rate_hz, int direction,
                         double eps) {
    const std::int64_t lo_s = ms_to_samples(lo_ms, rate_hz);
    const std::int64_t hi_s = ms_to_samples(hi_ms, rate_hz);
    const auto n = static_cast<std::int64_t>(x.size());
    const double floor_value = x[static_cast<std::size_t>(n1)];
    ScanResult r;
    for (std::int64_t d = 1; d <= hi_s; ++d) {
        const std::int64_t i = direction < 0 ? n1 - d : n1 + d;
        if (i < k || i >= n - k) break;
        if (!local_max_persist(x, i, k, eps)) continue;
        if (x[static_cast<std::size_t>(i)] <= floor_value) continue; // must top the N1 trough
        if (d < lo_s) {
            r.saw_sub_period_peak = true;
            continue;
        }
        if (r.index < 0 || x[static_cast<std::size_t>(i)] > x[static_cast<std::size_t>(r.index)]) {
            r.index = i;
        }
    }
    return r;
}

Peak make_peak(const Signal& s, std::int64_t index) {
    Peak p;
    p.index = index;
    const std::int64_t origin = s.onset_index >= 0 ? s.onset_index : 0;
    p.latency_ms = samples_to_ms(index - origin, s.rate_hz);
    p.amplitude_uv = s.samples[static_cast<std::size_t>(index)];
    return p;
}

} // namespace

const char* peak_failure_name(PeakFailure f) {
    switch (f) {
        case PeakFailure::none: return "none";
        case PeakFailure::no_persistent_minimum: return "no persistent minimum in frame";
        case PeakFailure::p1_missing: return "P1 missing before signal boundary";
        case PeakFailure::p2_missing: return "P2 missing before signal boundary";
        case PeakFailure::p1_n1_period: return "P1-N1 period bound violated";
        case PeakFailure::n1_p2_period: return "N1-P2 period bound violated";
        case PeakFailure::total_period: return "total period bound violated";
    }
    return "unknown";
}

double gaussian_weight(double period_ms, double center_ms, double sigma_ms) {
    if (sigma_ms <= 0.0) throw std::invalid_argument("sigma must be positive");
    const double z = (period_ms - center_ms) / sigma_ms;
    return std::exp(-0.5 * z * z);
}

std::vector<CoefficientPair> proximity_detect(const std::vector<double>& coeff_row,
                                              const DetectorConfig& config,
                                              double rate_hz,
                                              std::int64_t onset_index) {
    if (config.c_tau < 0.0) throw std::invalid_argument("c_tau must be non-negative");
    const auto n = static_cast<std::int64_t>(coeff_row.size());
    if (n < 3) return {};

    std::int64_t lo = 1, hi = n - 2;
    if (onset_index >= 0) {
        lo = std::max<std::int64_t>(
            1, onset_index + ms_to_samples(config.search_window_low_ms, rate_hz));
        hi = std::min<std::int64_t>(
            n - 2, onset_index + ms_to_samples(config.search_window_high_ms, rate_hz));
    }

    std::vector<std::int64_t> neg, pos;
    for (std::int64_t i = lo; i <= hi; ++i) {
        const double v = coeff_row[static_cast<std::size_t>(i)];
        const double prev = coeff_row[static_cast<std::size_t>(i - 1)];
        const double next = coeff_row[static_cast<std::size_t>(i + 1)];
        if (v > 0.0 && v >= config.c_tau && v >= prev && v > next) pos.push_back(i);
        if (v < 0.0 && v <= prev && v < next) neg.push_back(i);
    }
    if (pos.empty()) return {}; // nothing retained: absence path

    std::vector<CoefficientPair> pairs;
    for (std::int64_t t2 : neg) {
        for (std::int64_t t1 : pos) {
            if (t2 >= t1) continue;
            const double period = samples_to_ms(t1 - t2, rate_hz);
            if (period < config.period_window_low_ms || period > config.period_window_high_ms)
                continue;
            CoefficientPair p;
            p.neg_index = t2;
            p.pos_index = t1;
            p.neg_value = coeff_row[static_cast<std::size_t>(t2)];
            p.pos_value = coeff_row[static_cast<std::size_t>(t1)];
            p.period_ms = period;
            p.energy = std::abs(p.neg_value) + p.pos_value;
            p.score = p.energy * gaussian_weight(period, config.gaussian_center_ms,
                                                 config.gaussian_sigma_ms);
            pairs.push_back(p);
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const CoefficientPair& a, const CoefficientPair& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.neg_index != b.neg_index) return a.neg_index < b.neg_index;
        return a.pos_index < b.pos_index;
    });
    return pairs;
}

PeakCandidate detect_peaks(const Signal& preprocessed, const CoefficientPair& pair,
                           const DetectorConfig& config, int persistence,
                           double frame_extra_ms) {
    const auto& x = preprocessed.samples;
    const auto n = static_cast<std::int64_t>(x.size());
    if (pair.neg_index < 0 || pair.pos_index >= n) {
        throw std::invalid_argument("pair indices outside the signal");
    }
    PeakCandidate out;

    const std::int64_t ext =
        ms_to_samples(kFrameBaseExtensionMs + frame_extra_ms, preprocessed.rate_hz);
    const std::int64_t lo = std::max<std::int64_t>(0, pair.neg_index - ext);
    const std::int64_t hi = std::min<std::int64_t>(n - 1, pair.pos_index + ext);

    // Candidate N1: the deepest slope-persistent local minimum within a
    // narrow amplitude band above the frame's raw minimum. The band tolerates
    // noise dimples on the trough floor without admitting shallow dips higher
    // up the slopes. A raw minimum at the frame edge means the trough
    // continues outside; fail so the retry path can widen the frame.
    std::int64_t argmin = lo;
    double raw_max = x[static_cast<std::size_t>(lo)];
    for (std::int64_t i = lo; i <= hi; ++i) {
        if (x[static_cast<std::size_t>(i)] < x[static_cast<std::size_t>(argmin)]) argmin = i;
        raw_max = std::max(raw_max, x[static_cast<std::size_t>(i)]);
    }
    const double raw_min = x[static_cast<std::size_t>(argmin)];
    const double eps = 0.02 * (raw_max - raw_min);
    std::int64_t n1 = -1;
    if (argmin > lo + persistence && argmin < hi - persistence) {
        const double band = raw_min + 0.05 * (raw_max - raw_min);
        for (std::int64_t i = lo; i <= hi; ++i) {
            if (x[static_cast<std::size_t>(i)] > band) continue;
            if (!local_min_persist(x, i, persistence, eps)) continue;
            if (n1 < 0 || x[static_cast<std::size_t>(i)] < x[static_cast<std::size_t>(n1)])
                n1 = i;
        }
    }
    if (n1 < 0) {
        out.failure = PeakFailure::no_persistent_minimum;
        return out;
    }

    const ScanResult r1 = scan_for_peak(x, n1, persistence, config.p1_n1_period_low_ms,
                                        config.p1_n1_period_high_ms, preprocessed.rate_hz,
                                        -1, eps);
    if (r1.index < 0) {
        out.failure = r1.saw_sub_period_peak ? PeakFailure::p1_n1_period : PeakFailure::p1_missing;
        return out;
    }
    const ScanResult r2 = scan_for_peak(x, n1, persistence, config.n1_p2_period_low_ms,
                                        config.n1_p2_period_high_ms, preprocessed.rate_hz,
                                        +1, eps);
    if (r2.index < 0) {
        out.failure = r2.saw_sub_period_peak ? PeakFailure::n1_p2_period : PeakFailure::p2_missing;
        return out;
    }

    out.ok = true;
    out.p1 = make_peak(preprocessed, r1.index);
    out.n1 = make_peak(preprocessed, n1);
    out.p2 = make_peak(preprocessed, r2.index);
    return out;
}

SegmentResult validate_and_segment(const PeakCandidate& peaks, const Signal& signal,
                                   const DetectorConfig& config) {
    SegmentResult res;
    if (!peaks.ok) {
        res.failure = peaks.failure;
        return res;
    }
    const double total_ms = samples_to_ms(peaks.p2.index - peaks.p1.index, signal.rate_hz);
    if (total_ms < config.total_period_low_ms || total_ms > config.total_period_high_ms) {
        res.failure = PeakFailure::total_period;
        return res;
    }
    const std::int64_t pad = ms_to_samples(config.padding_ms, signal.rate_hz);
    const auto n = static_cast<std::int64_t>(signal.samples.size());
    res.ok = true;
    res.detection.present = true;
    res.detection.start_index = std::max<std::int64_t>(0, peaks.p1.index - pad);
    res.detection.end_index = std::min<std::int64_t>(n - 1, peaks.p2.index + pad);
    res.detection.p1 = peaks.p1;
    res.detection.n1 = peaks.n1;
    res.detection.p2 = peaks.p2;
    return res;
}

void DetectorConfig::validate() const {
    auto bad = [](const std::string& field) {
        throw std::invalid_argument("invalid config field: " + field);
    };
    if (wavelet.empty()) bad("wavelet");
    if (scale_band_low <= 0 || scale_band_high < scale_band_low) bad("scale_band");
    if (c_tau < 0.0) bad("c_tau");
    if (period_window_low_ms >= period_window_high_ms) bad("period_window_ms");
    if (gaussian_sigma_ms <= 0.0) bad("gaussian_sigma_ms");
    if (padding_ms < 0.0) bad("padding_ms");
    if (search_window_low_ms >= search_window_high_ms) bad("search_window_ms");
    if (p1_n1_period_low_ms >= p1_n1_period_high_ms) bad("p1_n1_period_ms");
    if (n1_p2_period_low_ms >= n1_p2_period_high_ms) bad("n1_p2_period_ms");
    if (total_period_low_ms >= total_period_high_ms) bad("total_period_ms");
    if (cone_window_ms <= 0.0) bad("cone_window_ms");
    if (cone_fraction <= 0.0 || cone_fraction > 1.0) bad("cone_fraction");
    if (lowpass_cutoff_hz <= 0.0) bad("lowpass_cutoff_hz");
    if (lowpass_attenuation_db < 20.0) bad("lowpass_attenuation_db");
    if (max_retries < 0) bad("max_retries");
    if (cascade_iterations < 4 || cascade_iterations > 14) bad("cascade_iterations");
}

Detector::Detector(const DetectorConfig& config, double rate_hz)
    : config_(config), rate_hz_(rate_hz) {
    config_.validate();
    if (rate_hz <= 0.0) throw std::invalid_argument("sampling rate must be positive");
    spec_ = load_wavelet(config_.wavelet);
    psi_ = cascade_evaluate(spec_, config_.cascade_iterations);
    lowpass_taps_ =
        design_lowpass(rate_hz_, config_.lowpass_cutoff_hz, config_.lowpass_attenuation_db).taps;
    for (int a = config_.scale_band_low; a <= config_.scale_band_high; ++a) band_.push_back(a);
}

Signal Detector::preprocess(const Signal& signal) const {
    FirFilter f;
    f.taps = lowpass_taps_;
    f.sampling_rate_hz = rate_hz_;
    f.design_cutoff_hz = config_.lowpass_cutoff_hz;
    f.design_attenuation_db = config_.lowpass_attenuation_db;
    return filter_signal(signal, f);
}

CwtMatrix Detector::transform(const Signal& preprocessed) const {
    CwtMatrix m;
    m.scales = band_;
    m.sampling_rate_hz = preprocessed.rate_hz;
    m.coefficients.reserve(band_.size());
    for (int a : band_) {
        m.coefficients.push_back(
            cwt_row(preprocessed.samples, psi_, static_cast<double>(a)));
    }
    return m;
}

Detection Detector::run(const Signal& signal) const {
    if (signal.rate_hz != rate_hz_) {
        throw std::invalid_argument("signal rate does not match the detector");
    }
    if (signal.duration_ms() < 300.0) {
        throw std::invalid_argument("signal must be at least 300 ms long");
    }
    require_finite(signal.samples, "detect input");

    const Signal filtered = preprocess(signal);
    const CwtMatrix m = transform(filtered);

    // Stimulus-locked traces: the cone decision and scale selection examine
    // the post-onset search window (the epoch the detector actually scans);
    // without an onset the whole trace is the epoch.
    const CwtMatrix* selection_view = &m;
    CwtMatrix windowed;
    if (signal.onset_index >= 0) {
        const auto n = static_cast<std::int64_t>(filtered.samples.size());
        const std::int64_t lo = std::clamp<std::int64_t>(
            signal.onset_index + ms_to_samples(config_.search_window_low_ms, rate_hz_), 0,
            n - 1);
        const std::int64_t hi = std::clamp<std::int64_t>(
            signal.onset_index + ms_to_samples(config_.search_window_high_ms, rate_hz_), lo,
            n - 1);
        windowed.scales = m.scales;
        windowed.sampling_rate_hz = m.sampling_rate_hz;
        windowed.coefficients.reserve(m.coefficients.size());
        for (const auto& full_row : m.coefficients) {
            windowed.coefficients.emplace_back(full_row.begin() + lo,
                                               full_row.begin() + hi + 1);
        }
        selection_view = &windowed;
    }
    const ConeReport cone = cone_of_influence(*selection_view, config_.c_tau,
                                              config_.cone_window_ms, config_.cone_fraction);
    const int scale = select_analysis_scale(*selection_view, cone, config_);
    const auto& row = m.row_at_scale(scale);

    const std::vector<CoefficientPair> pairs =
        proximity_detect(row, config_, rate_hz_, signal.onset_index);

    for (const CoefficientPair& pair : pairs) {
        for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
            const int k = attempt == 0 ? 3 : kRetryPersistence;
            const double extra = attempt == 0 ? 0.0 : kRetryFrameWidenMs * attempt;
            const PeakCandidate peaks = detect_peaks(filtered, pair, config_, k, extra);
            if (!peaks.ok) continue;
            SegmentResult seg = validate_and_segment(peaks, filtered, config_);
            if (!seg.ok) continue; // total-period violation: retry, then next pair
            seg.detection.best_scale = scale;
            seg.detection.pair = pair;
            seg.detection.retried = attempt > 0;
            return seg.detection;
        }
    }

    Detection absent;
    absent.present = false;
    absent.start_index = 0;
    absent.end_index = 0;
    absent.best_scale = scale;
    return absent;
}

Detection detect(const Signal& signal, const DetectorConfig& config) {
    return Detector(config, signal.rate_hz).run(signal);
}

} // namespace erp

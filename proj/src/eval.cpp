#include "erp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace erp {

EvalReport score(const std::vector<Detection>& detections,
                 const std::vector<TrialTruth>& truths, double rate_hz) {
    if (detections.size() != truths.size()) {
        throw std::invalid_argument("detections and truths have different lengths");
    }
    EvalReport r;
    for (std::size_t i = 0; i < detections.size(); ++i) {
        const Detection& d = detections[i];
        const TrialTruth& t = truths[i];
        if (t.has_erp) {
            if (d.present) {
                const double err =
                    std::abs(samples_to_ms(d.n1.index - t.n1_index, rate_hz));
                if (err <= kLatencyGateMs) {
                    ++r.tp;
                    r.latency_errors_ms.push_back(err);
                } else {
                    ++r.fn;
                }
            } else {
                ++r.fn;
            }
        } else {
            if (d.present) ++r.fp;
            else ++r.tn;
        }
    }
    const std::size_t npos = r.tp + r.fn;
    const std::size_t nneg = r.tn + r.fp;
    r.hit_rate = npos ? static_cast<double>(r.tp) / static_cast<double>(npos) : 0.0;
    r.rejection_rate = nneg ? static_cast<double>(r.tn) / static_cast<double>(nneg) : 0.0;
    const std::size_t total = npos + nneg;
    r.overall = total ? static_cast<double>(r.tp + r.tn) / static_cast<double>(total) : 0.0;
    return r;
}

PeriodCalibration calibrate_period_window(const std::vector<Signal>& labeled_trials,
                                          const DetectorConfig& config) {
    if (labeled_trials.empty()) throw std::invalid_argument("empty calibration trial set");
    const Detector det(config, labeled_trials.front().rate_hz);

    PeriodCalibration cal;
    for (const Signal& trial : labeled_trials) {
        if (trial.onset_index < 0) {
            throw std::invalid_argument("calibration trial lacks a stimulus-onset index");
        }
        const Signal filtered = det.preprocess(trial);
        const CwtMatrix m = det.transform(filtered);
        const ConeReport cone =
            cone_of_influence(m, 0.0, config.cone_window_ms, config.cone_fraction);
        const int scale = select_analysis_scale(m, cone, config);
        const auto& row = m.row_at_scale(scale);

        const auto lo = static_cast<std::size_t>(
            trial.onset_index + ms_to_samples(kCalibrationWindowLowMs, trial.rate_hz));
        const auto hi = std::min(
            row.size() - 1,
            static_cast<std::size_t>(trial.onset_index +
                                     ms_to_samples(kCalibrationWindowHighMs, trial.rate_hz)));
        std::size_t peak_idx = 0;
        double peak = 0.0;
        bool found = false;
        for (std::size_t b = lo; b <= hi && b < row.size(); ++b) {
            if (row[b] > 0.0 && (!found || row[b] > peak)) {
                peak = row[b];
                peak_idx = b;
                found = true;
            }
        }
        if (!found) continue;

        // Strongest preceding negative extremum within 30..150 ms of the peak.
        const std::int64_t d_lo = ms_to_samples(30.0, trial.rate_hz);
        const std::int64_t d_hi = ms_to_samples(150.0, trial.rate_hz);
        std::int64_t best = -1;
        for (std::int64_t d = d_lo; d <= d_hi; ++d) {
            const std::int64_t j = static_cast<std::int64_t>(peak_idx) - d;
            if (j < 1) break;
            const auto ju = static_cast<std::size_t>(j);
            if (row[ju] < 0.0 && row[ju] <= row[ju - 1] && row[ju] < row[ju + 1]) {
                if (best < 0 || row[ju] < row[static_cast<std::size_t>(best)]) best = j;
            }
        }
        if (best >= 0) {
            cal.spacings_ms.push_back(
                samples_to_ms(static_cast<std::int64_t>(peak_idx) - best, trial.rate_hz));
        }
    }
    if (cal.spacings_ms.empty()) {
        // No measurable pairs: keep the configured defaults.
        cal.window_low_ms = config.period_window_low_ms;
        cal.window_high_ms = config.period_window_high_ms;
        cal.center_ms = config.gaussian_center_ms;
        return cal;
    }
    std::vector<double> sorted = cal.spacings_ms;
    std::sort(sorted.begin(), sorted.end());
    // Far-off pairings are junk measurements: drop spacings beyond p75 + 25 ms.
    const double cut = sorted[sorted.size() * 3 / 4] + 25.0;
    std::vector<double> kept;
    for (double s : sorted) {
        if (s <= cut) kept.push_back(s);
    }
    const std::size_t mid = kept.size() / 2;
    cal.center_ms =
        kept.size() % 2 == 1 ? kept[mid] : 0.5 * (kept[mid - 1] + kept[mid]);
    cal.window_low_ms = std::max(40.0, std::floor(kept.front()) - 10.0);
    // The samples come from each trial's own selected scale; the upper edge
    // must still cover pairs at the top of the configured band, hence the
    // wide center-relative margin.
    cal.window_high_ms = std::min(120.0, std::ceil(cal.center_ms) + 45.0);
    return cal;
}

BenchmarkRun run_benchmark(const std::vector<LabeledTrial>& corpus,
                           const DetectorConfig& config,
                           std::size_t calibration_trials) {
    std::vector<const LabeledTrial*> positives;
    for (const LabeledTrial& t : corpus) {
        if (t.truth.has_erp) positives.push_back(&t);
    }
    if (positives.size() < calibration_trials || corpus.size() <= calibration_trials) {
        throw std::invalid_argument("corpus too small to split off the calibration subset");
    }

    std::vector<Signal> cal_signals;
    std::vector<const LabeledTrial*> cal_set(positives.begin(),
                                             positives.begin() +
                                                 static_cast<std::ptrdiff_t>(calibration_trials));
    for (const LabeledTrial* t : cal_set) cal_signals.push_back(t->signal);

    DetectorConfig effective = config;
    const WaveletSpec spec = load_wavelet(config.wavelet);
    const ThresholdCalibration thr = calibrate_threshold(cal_signals, spec, config);
    effective.c_tau = thr.c_tau;
    const PeriodCalibration per = calibrate_period_window(cal_signals, config);
    effective.period_window_low_ms = per.window_low_ms;
    effective.period_window_high_ms = per.window_high_ms;
    effective.gaussian_center_ms = per.center_ms;

    const Detector det(effective, corpus.front().signal.rate_hz);
    std::vector<Detection> detections;
    std::vector<TrialTruth> truths;
    for (const LabeledTrial& t : corpus) {
        const bool in_cal =
            std::find(cal_set.begin(), cal_set.end(), &t) != cal_set.end();
        if (in_cal) continue;
        detections.push_back(det.run(t.signal));
        truths.push_back(t.truth);
    }

    BenchmarkRun run;
    run.report = score(detections, truths, corpus.front().signal.rate_hz);
    run.effective_config = effective;
    run.calibration_trials = calibration_trials;
    return run;
}

} // namespace erp

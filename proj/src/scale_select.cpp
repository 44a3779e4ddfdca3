#include "erp/scale_select.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace erp {

ScaleEnergy scale_energy(const CwtMatrix& cwt) {
    if (cwt.coefficients.empty()) throw std::invalid_argument("empty CWT matrix");
    ScaleEnergy se;
    se.scales = cwt.scales;
    se.energy.resize(cwt.scales.size(), 0.0);
    for (std::size_t i = 0; i < cwt.coefficients.size(); ++i) {
        double acc = 0.0;
        for (double c : cwt.coefficients[i]) acc += std::abs(c);
        se.energy[i] = acc;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < se.energy.size(); ++i) {
        if (se.energy[i] > se.energy[best]) best = i;
    }
    se.best = se.scales[best];
    return se;
}

ConeReport cone_of_influence(const CwtMatrix& cwt, double c_tau,
                             double window_ms, double fraction) {
    if (c_tau < 0.0) throw std::invalid_argument("c_tau must be non-negative");
    if (window_ms <= 0.0) throw std::invalid_argument("window_ms must be positive");
    if (fraction <= 0.0 || fraction > 1.0) {
        throw std::invalid_argument("fraction must lie in (0, 1]");
    }
    if (cwt.coefficients.empty()) throw std::invalid_argument("empty CWT matrix");

    ConeReport report;
    double best_abs = -1.0;
    for (std::size_t r = 0; r < cwt.coefficients.size(); ++r) {
        const auto& row = cwt.coefficients[r];
        for (std::size_t b = 0; b < row.size(); ++b) {
            const double a = std::abs(row[b]);
            if (a > best_abs) {
                best_abs = a;
                report.peak_scale = cwt.scales[r];
                report.peak_time_index = b;
            }
        }
    }

    // Retained set per the threshold rule: positive coefficients >= c_tau.
    const auto win = static_cast<std::int64_t>(ms_to_samples(window_ms, cwt.sampling_rate_hz));
    std::size_t total = 0, near = 0;
    for (const auto& row : cwt.coefficients) {
        for (std::size_t b = 0; b < row.size(); ++b) {
            const bool retained = c_tau > 0.0 ? row[b] >= c_tau : row[b] > 0.0;
            if (!retained) continue;
            ++total;
            const auto d = static_cast<std::int64_t>(b) -
                           static_cast<std::int64_t>(report.peak_time_index);
            if (d >= -win && d <= win) ++near;
        }
    }
    if (total == 0) {
        report.concentration = 0.0;
        report.localized = false;
    } else {
        report.concentration = static_cast<double>(near) / static_cast<double>(total);
        report.localized = report.concentration >= fraction;
    }
    return report;
}

int select_analysis_scale(const CwtMatrix& cwt, const ConeReport& cone,
                          const DetectorConfig& config) {
    bool band_hit = false;
    for (int s : cwt.scales) {
        if (s >= config.scale_band_low && s <= config.scale_band_high) {
            band_hit = true;
            break;
        }
    }
    if (!band_hit) {
        throw std::invalid_argument("configured scale band is disjoint from the matrix scales");
    }
    if (cone.localized) return cone.peak_scale;
    // Fallback: still the largest-coefficient scale, restricted to the band.
    int best_scale = 0;
    double best_abs = -1.0;
    for (std::size_t r = 0; r < cwt.coefficients.size(); ++r) {
        if (cwt.scales[r] < config.scale_band_low || cwt.scales[r] > config.scale_band_high) {
            continue;
        }
        for (double c : cwt.coefficients[r]) {
            if (std::abs(c) > best_abs) {
                best_abs = std::abs(c);
                best_scale = cwt.scales[r];
            }
        }
    }
    return best_scale;
}

ThresholdCalibration calibrate_threshold(const std::vector<Signal>& labeled_trials,
                                         const WaveletSpec& spec,
                                         const DetectorConfig& config) {
    if (labeled_trials.empty()) throw std::invalid_argument("empty calibration trial set");

    std::vector<int> scales;
    for (int a = config.scale_band_low; a <= config.scale_band_high; ++a) scales.push_back(a);

    ThresholdCalibration cal;
    cal.n_trials = labeled_trials.size();
    for (const Signal& trial : labeled_trials) {
        if (trial.onset_index < 0) {
            throw std::invalid_argument("calibration trial lacks a stimulus-onset index");
        }
        const CwtMatrix m = cwt(trial, spec, scales, config.cascade_iterations);
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
        double peak = 0.0;
        bool found = false;
        for (std::size_t b = lo; b <= hi && b < row.size(); ++b) {
            if (row[b] > 0.0 && (!found || row[b] > peak)) {
                peak = row[b];
                found = true;
            }
        }
        if (!found) {
            throw std::runtime_error("calibration trial has no positive coefficient in window");
        }
        cal.per_trial_peaks.push_back(peak);
    }
    double mean = 0.0;
    for (double p : cal.per_trial_peaks) mean += p;
    mean /= static_cast<double>(cal.per_trial_peaks.size());
    cal.c_tau = 0.5 * mean;
    return cal;
}

} // namespace erp

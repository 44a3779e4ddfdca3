#include "erpdetect.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <string>

#include "erp/detector.hpp"
#include "erp/eval.hpp"
#include "erp/synth.hpp"

namespace {

thread_local std::string g_last_error;

erp_status fail(erp_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

erp_status translate(const std::exception& e) {
    const std::string msg = e.what();
    g_last_error = msg;
    if (msg.find("unknown wavelet") != std::string::npos) return ERP_ERROR_UNKNOWN_WAVELET;
    if (msg.find("config field") != std::string::npos) return ERP_ERROR_BAD_CONFIG;
    if (dynamic_cast<const std::invalid_argument*>(&e)) return ERP_ERROR_INVALID_ARGUMENT;
    return ERP_ERROR_INTERNAL;
}

erp::DetectorConfig to_cpp(const erp_config& c) {
    erp::DetectorConfig out;
    out.wavelet.assign(c.wavelet, c.wavelet + strnlen(c.wavelet, sizeof c.wavelet));
    out.scale_band_low = c.scale_band_low;
    out.scale_band_high = c.scale_band_high;
    out.c_tau = c.c_tau;
    out.period_window_low_ms = c.period_window_low_ms;
    out.period_window_high_ms = c.period_window_high_ms;
    out.gaussian_center_ms = c.gaussian_center_ms;
    out.gaussian_sigma_ms = c.gaussian_sigma_ms;
    out.padding_ms = c.padding_ms;
    out.search_window_low_ms = c.search_window_low_ms;
    out.search_window_high_ms = c.search_window_high_ms;
    out.p1_n1_period_low_ms = c.p1_n1_period_low_ms;
    out.p1_n1_period_high_ms = c.p1_n1_period_high_ms;
    out.n1_p2_period_low_ms = c.n1_p2_period_low_ms;
    out.n1_p2_period_high_ms = c.n1_p2_period_high_ms;
    out.total_period_low_ms = c.total_period_low_ms;
    out.total_period_high_ms = c.total_period_high_ms;
    out.cone_window_ms = c.cone_window_ms;
    out.cone_fraction = c.cone_fraction;
    out.lowpass_cutoff_hz = c.lowpass_cutoff_hz;
    out.lowpass_attenuation_db = c.lowpass_attenuation_db;
    out.max_retries = c.max_retries;
    out.cascade_iterations = c.cascade_iterations;
    return out;
}

erp::TrialSpec to_cpp(const erp_trial_spec& s) {
    erp::TrialSpec out;
    out.seed = s.seed;
    out.duration_ms = s.duration_ms;
    out.sampling_rate_hz = s.sampling_rate_hz;
    out.onset_ms = s.onset_ms;
    out.has_erp = s.has_erp != 0;
    out.snr_db = s.snr_db;
    out.p1_latency_ms = s.p1_latency_ms;
    out.n1_latency_ms = s.n1_latency_ms;
    out.p2_latency_ms = s.p2_latency_ms;
    out.p1_amp_uv = s.p1_amp_uv;
    out.n1_amp_uv = s.n1_amp_uv;
    out.p2_amp_uv = s.p2_amp_uv;
    out.width_ms = s.width_ms;
    out.alpha_power = s.alpha_power;
    return out;
}

std::vector<erp::Signal> gather_trials(double rate, const double* samples,
                                       const size_t* offsets, const size_t* lengths,
                                       const int64_t* onsets, size_t n_trials) {
    std::vector<erp::Signal> trials;
    trials.reserve(n_trials);
    for (size_t i = 0; i < n_trials; ++i) {
        erp::Signal s;
        s.rate_hz = rate;
        s.onset_index = onsets[i];
        s.samples.assign(samples + offsets[i], samples + offsets[i] + lengths[i]);
        trials.push_back(std::move(s));
    }
    return trials;
}

} // namespace

extern "C" {

const char* erp_status_name(erp_status status) {
    switch (status) {
        case ERP_OK: return "ok";
        case ERP_ERROR_INVALID_ARGUMENT: return "invalid argument";
        case ERP_ERROR_UNKNOWN_WAVELET: return "unknown wavelet";
        case ERP_ERROR_BAD_CONFIG: return "bad config";
        case ERP_ERROR_BAD_DATA: return "bad data";
        case ERP_ERROR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* erp_last_error(void) { return g_last_error.c_str(); }

const char* erp_version(void) { return "1.0.0"; }

void erp_config_init(erp_config* config) {
    if (!config) return;
    const erp::DetectorConfig d;
    std::memset(config, 0, sizeof *config);
    std::snprintf(config->wavelet, sizeof config->wavelet, "%s", d.wavelet.c_str());
    config->scale_band_low = d.scale_band_low;
    config->scale_band_high = d.scale_band_high;
    config->c_tau = d.c_tau;
    config->period_window_low_ms = d.period_window_low_ms;
    config->period_window_high_ms = d.period_window_high_ms;
    config->gaussian_center_ms = d.gaussian_center_ms;
    config->gaussian_sigma_ms = d.gaussian_sigma_ms;
    config->padding_ms = d.padding_ms;
    config->search_window_low_ms = d.search_window_low_ms;
    config->search_window_high_ms = d.search_window_high_ms;
    config->p1_n1_period_low_ms = d.p1_n1_period_low_ms;
    config->p1_n1_period_high_ms = d.p1_n1_period_high_ms;
    config->n1_p2_period_low_ms = d.n1_p2_period_low_ms;
    config->n1_p2_period_high_ms = d.n1_p2_period_high_ms;
    config->total_period_low_ms = d.total_period_low_ms;
    config->total_period_high_ms = d.total_period_high_ms;
    config->cone_window_ms = d.cone_window_ms;
    config->cone_fraction = d.cone_fraction;
    config->lowpass_cutoff_hz = d.lowpass_cutoff_hz;
    config->lowpass_attenuation_db = d.lowpass_attenuation_db;
    config->max_retries = d.max_retries;
    config->cascade_iterations = d.cascade_iterations;
}

erp_status erp_config_validate(const erp_config* config) {
    if (!config) return fail(ERP_ERROR_INVALID_ARGUMENT, "null config");
    try {
        const erp::DetectorConfig cfg = to_cpp(*config);
        cfg.validate();
        erp::load_wavelet(cfg.wavelet);
        return ERP_OK;
    } catch (const std::exception& e) {
        const erp_status s = translate(e);
        return s == ERP_ERROR_INVALID_ARGUMENT ? ERP_ERROR_BAD_CONFIG : s;
    }
}

struct erp_detector {
    erp::Detector impl;
};

erp_status erp_detector_create(const erp_config* config, double sampling_rate_hz,
                               erp_detector** out_detector) {
    if (!config || !out_detector) return fail(ERP_ERROR_INVALID_ARGUMENT, "null argument");
    *out_detector = nullptr;
    try {
        *out_detector = new erp_detector{erp::Detector(to_cpp(*config), sampling_rate_hz)};
        return ERP_OK;
    } catch (const std::exception& e) {
        return translate(e);
    }
}

void erp_detector_destroy(erp_detector* detector) { delete detector; }

erp_status erp_detector_run(const erp_detector* detector, const double* samples,
                            size_t n_samples, int64_t onset_index, erp_detection* out) {
    if (!detector || !samples || !out) {
        return fail(ERP_ERROR_INVALID_ARGUMENT, "null argument");
    }
    try {
        erp::Signal s;
        s.rate_hz = detector->impl.rate_hz();
        s.onset_index = onset_index;
        s.samples.assign(samples, samples + n_samples);
        const erp::Detection d = detector->impl.run(s);
        std::memset(out, 0, sizeof *out);
        out->present = d.present ? 1 : 0;
        out->retried = d.retried ? 1 : 0;
        out->start_index = d.start_index;
        out->end_index = d.end_index;
        out->best_scale = d.best_scale;
        auto put = [](erp_peak& dst, const erp::Peak& src) {
            dst.index = src.index;
            dst.latency_ms = src.latency_ms;
            dst.amplitude_uv = src.amplitude_uv;
        };
        put(out->p1, d.p1);
        put(out->n1, d.n1);
        put(out->p2, d.p2);
        out->pair_neg_index = d.pair.neg_index;
        out->pair_pos_index = d.pair.pos_index;
        out->pair_neg_value = d.pair.neg_value;
        out->pair_pos_value = d.pair.pos_value;
        out->pair_period_ms = d.pair.period_ms;
        out->pair_energy = d.pair.energy;
        out->pair_score = d.pair.score;
        return ERP_OK;
    } catch (const std::exception& e) {
        return translate(e);
    }
}

erp_status erp_calibrate(const erp_config* config, double sampling_rate_hz,
                         const double* samples, const size_t* offsets,
                         const size_t* lengths, const int64_t* onsets, size_t n_trials,
                         double* out_c_tau, double* out_per_trial_peaks) {
    if (!config || !samples || !offsets || !lengths || !onsets || !out_c_tau) {
        return fail(ERP_ERROR_INVALID_ARGUMENT, "null argument");
    }
    try {
        const erp::DetectorConfig cfg = to_cpp(*config);
        const std::vector<erp::Signal> trials =
            gather_trials(sampling_rate_hz, samples, offsets, lengths, onsets, n_trials);
        const erp::ThresholdCalibration cal =
            erp::calibrate_threshold(trials, erp::load_wavelet(cfg.wavelet), cfg);
        *out_c_tau = cal.c_tau;
        if (out_per_trial_peaks) {
            std::copy(cal.per_trial_peaks.begin(), cal.per_trial_peaks.end(),
                      out_per_trial_peaks);
        }
        return ERP_OK;
    } catch (const std::exception& e) {
        return translate(e);
    }
}

erp_status erp_calibrate_period(const erp_config* config, double sampling_rate_hz,
                                const double* samples, const size_t* offsets,
                                const size_t* lengths, const int64_t* onsets,
                                size_t n_trials, double* out_low_ms, double* out_high_ms,
                                double* out_center_ms) {
    if (!config || !samples || !offsets || !lengths || !onsets || !out_low_ms ||
        !out_high_ms || !out_center_ms) {
        return fail(ERP_ERROR_INVALID_ARGUMENT, "null argument");
    }
    try {
        const erp::DetectorConfig cfg = to_cpp(*config);
        const std::vector<erp::Signal> trials =
            gather_trials(sampling_rate_hz, samples, offsets, lengths, onsets, n_trials);
        const erp::PeriodCalibration cal = erp::calibrate_period_window(trials, cfg);
        *out_low_ms = cal.window_low_ms;
        *out_high_ms = cal.window_high_ms;
        *out_center_ms = cal.center_ms;
        return ERP_OK;
    } catch (const std::exception& e) {
        return translate(e);
    }
}

erp_status erp_group_delay(const char* wavelet, size_t n_freqs, double* omega,
                           double* phase, double* group_delay, double* phase_delay,
                           uint8_t* defined) {
    if (!wavelet || !omega || !group_delay) {
        return fail(ERP_ERROR_INVALID_ARGUMENT, "null argument");
    }
    try {
        const erp::GroupDelayProfile p =
            erp::group_delay(erp::load_wavelet(wavelet), static_cast<int>(n_freqs));
        std::copy(p.omega.begin(), p.omega.end(), omega);
        std::copy(p.group_delay.begin(), p.group_delay.end(), group_delay);
        if (phase) std::copy(p.phase.begin(), p.phase.end(), phase);
        if (phase_delay) std::copy(p.phase_delay.begin(), p.phase_delay.end(), phase_delay);
        if (defined) std::copy(p.defined.begin(), p.defined.end(), defined);
        return ERP_OK;
    } catch (const std::exception& e) {
        return translate(e);
    }
}

erp_status erp_scale_energy(const erp_config* config, double sampling_rate_hz,
                            const double* samples, size_t n_samples, int scale_low,
                            int scale_high, double* energy, int* out_best_scale) {
    if (!config || !samples || !energy || !out_best_scale) {
        return fail(ERP_ERROR_INVALID_ARGUMENT, "null argument");
    }
    if (scale_low <= 0 || scale_high < scale_low) {
        return fail(ERP_ERROR_INVALID_ARGUMENT, "invalid scale range");
    }
    try {
        const erp::DetectorConfig cfg = to_cpp(*config);
        erp::Signal s;
        s.rate_hz = sampling_rate_hz;
        s.samples.assign(samples, samples + n_samples);
        std::vector<int> scales;
        for (int a = scale_low; a <= scale_high; ++a) scales.push_back(a);
        const erp::CwtMatrix m =
            erp::cwt(s, erp::load_wavelet(cfg.wavelet), scales, cfg.cascade_iterations);
        const erp::ScaleEnergy se = erp::scale_energy(m);
        std::copy(se.energy.begin(), se.energy.end(), energy);
        *out_best_scale = se.best;
        return ERP_OK;
    } catch (const std::exception& e) {
        return translate(e);
    }
}

void erp_trial_spec_init(erp_trial_spec* spec) {
    if (!spec) return;
    const erp::TrialSpec d;
    spec->seed = d.seed;
    spec->duration_ms = d.duration_ms;
    spec->sampling_rate_hz = d.sampling_rate_hz;
    spec->onset_ms = d.onset_ms;
    spec->has_erp = d.has_erp ? 1 : 0;
    spec->snr_db = d.snr_db;
    spec->p1_latency_ms = d.p1_latency_ms;
    spec->n1_latency_ms = d.n1_latency_ms;
    spec->p2_latency_ms = d.p2_latency_ms;
    spec->p1_amp_uv = d.p1_amp_uv;
    spec->n1_amp_uv = d.n1_amp_uv;
    spec->p2_amp_uv = d.p2_amp_uv;
    spec->width_ms = d.width_ms;
    spec->alpha_power = d.alpha_power;
}

erp_status erp_trial_sample_count(const erp_trial_spec* spec, size_t* out) {
    if (!spec || !out) return fail(ERP_ERROR_INVALID_ARGUMENT, "null argument");
    *out = static_cast<size_t>(
        erp::ms_to_samples(spec->duration_ms, spec->sampling_rate_hz));
    return ERP_OK;
}

erp_status erp_synth_trial(const erp_trial_spec* spec, double* out_samples,
                           size_t capacity, size_t* out_length, int64_t* out_onset_index,
                           int64_t* out_n1_index) {
    if (!spec || !out_samples) return fail(ERP_ERROR_INVALID_ARGUMENT, "null argument");
    try {
        const erp::LabeledTrial trial = erp::make_trial(to_cpp(*spec));
        if (trial.signal.samples.size() > capacity) {
            return fail(ERP_ERROR_INVALID_ARGUMENT, "output buffer too small");
        }
        std::copy(trial.signal.samples.begin(), trial.signal.samples.end(), out_samples);
        if (out_length) *out_length = trial.signal.samples.size();
        if (out_onset_index) *out_onset_index = trial.signal.onset_index;
        if (out_n1_index) *out_n1_index = trial.truth.n1_index;
        return ERP_OK;
    } catch (const std::exception& e) {
        return translate(e);
    }
}

erp_status erp_score(const int* present, const int64_t* det_n1, const int* truth_has_erp,
                     const int64_t* truth_n1, size_t n_trials, double sampling_rate_hz,
                     erp_report* out) {
    if (!present || !det_n1 || !truth_has_erp || !truth_n1 || !out) {
        return fail(ERP_ERROR_INVALID_ARGUMENT, "null argument");
    }
    try {
        std::vector<erp::Detection> dets(n_trials);
        std::vector<erp::TrialTruth> truths(n_trials);
        for (size_t i = 0; i < n_trials; ++i) {
            dets[i].present = present[i] != 0;
            dets[i].n1.index = det_n1[i];
            truths[i].has_erp = truth_has_erp[i] != 0;
            truths[i].n1_index = truth_n1[i];
        }
        const erp::EvalReport r = erp::score(dets, truths, sampling_rate_hz);
        out->tp = r.tp;
        out->fn = r.fn;
        out->fp = r.fp;
        out->tn = r.tn;
        out->hit_rate = r.hit_rate;
        out->rejection_rate = r.rejection_rate;
        out->overall = r.overall;
        if (r.latency_errors_ms.empty()) {
            out->median_latency_error_ms = std::numeric_limits<double>::quiet_NaN();
        } else {
            std::vector<double> v = r.latency_errors_ms;
            std::sort(v.begin(), v.end());
            const size_t mid = v.size() / 2;
            out->median_latency_error_ms =
                v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
        }
        return ERP_OK;
    } catch (const std::exception& e) {
        return translate(e);
    }
}

} // extern "C"

/*
 * erpdetect — single-trial oscillatory ERP detection on EEG traces.
 *
 * C API over the C++ core. Stateful objects are opaque handles created and
 * destroyed through this interface; result records are plain structs filled
 * by the callee. Every fallible call returns an erp_status; on failure
 * erp_last_error() carries a human-readable detail message for the calling
 * thread until the next API call.
 */
#ifndef ERPDETECT_H
#define ERPDETECT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ERPDETECT_API __declspec(dllexport)
#else
#define ERPDETECT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum erp_status {
    ERP_OK = 0,
    ERP_ERROR_INVALID_ARGUMENT = 1,
    ERP_ERROR_UNKNOWN_WAVELET = 2,
    ERP_ERROR_BAD_CONFIG = 3,
    ERP_ERROR_BAD_DATA = 4,
    ERP_ERROR_INTERNAL = 5
} erp_status;

ERPDETECT_API const char* erp_status_name(erp_status status);
ERPDETECT_API const char* erp_last_error(void);
ERPDETECT_API const char* erp_version(void);

/* ------------------------------------------------------------------ */
/* Detector configuration                                              */

typedef struct erp_config {
    char wavelet[16];
    int scale_band_low;
    int scale_band_high;
    double c_tau;
    double period_window_low_ms;
    double period_window_high_ms;
    double gaussian_center_ms;
    double gaussian_sigma_ms;
    double padding_ms;
    double search_window_low_ms;
    double search_window_high_ms;
    double p1_n1_period_low_ms;
    double p1_n1_period_high_ms;
    double n1_p2_period_low_ms;
    double n1_p2_period_high_ms;
    double total_period_low_ms;
    double total_period_high_ms;
    double cone_window_ms;
    double cone_fraction;
    double lowpass_cutoff_hz;
    double lowpass_attenuation_db;
    int max_retries;
    int cascade_iterations;
} erp_config;

/* Fills the shipped defaults (sym5, band 40..90, uncalibrated c_tau 0). */
ERPDETECT_API void erp_config_init(erp_config* config);
ERPDETECT_API erp_status erp_config_validate(const erp_config* config);

/* ------------------------------------------------------------------ */
/* Detection                                                           */

typedef struct erp_detector erp_detector; /* opaque */

ERPDETECT_API erp_status erp_detector_create(const erp_config* config,
                                             double sampling_rate_hz,
                                             erp_detector** out_detector);
ERPDETECT_API void erp_detector_destroy(erp_detector* detector);

typedef struct erp_peak {
    int64_t index;
    double latency_ms; /* from the stimulus onset (trial start if none) */
    double amplitude_uv;
} erp_peak;

typedef struct erp_detection {
    int present;
    int retried;
    int64_t start_index;
    int64_t end_index;
    erp_peak p1, n1, p2;
    int best_scale;
    int64_t pair_neg_index, pair_pos_index;
    double pair_neg_value, pair_pos_value;
    double pair_period_ms, pair_energy, pair_score;
} erp_detection;

/* onset_index < 0 means no stimulus onset is known. */
ERPDETECT_API erp_status erp_detector_run(const erp_detector* detector,
                                          const double* samples, size_t n_samples,
                                          int64_t onset_index, erp_detection* out);

/* ------------------------------------------------------------------ */
/* Calibration                                                         */

/* Trials are passed flattened: trial i spans samples[offsets[i]] ..
 * samples[offsets[i] + lengths[i] - 1] and has stimulus onset onsets[i].
 * Writes the 50%-rule threshold, and the per-trial peak coefficients when
 * out_per_trial_peaks is non-null (length n_trials). */
ERPDETECT_API erp_status erp_calibrate(const erp_config* config, double sampling_rate_hz,
                                       const double* samples, const size_t* offsets,
                                       const size_t* lengths, const int64_t* onsets,
                                       size_t n_trials, double* out_c_tau,
                                       double* out_per_trial_peaks);

/* Pair-period statistics from the same labeled trials; writes the data-derived
 * period window and its center. */
ERPDETECT_API erp_status erp_calibrate_period(const erp_config* config,
                                              double sampling_rate_hz,
                                              const double* samples, const size_t* offsets,
                                              const size_t* lengths, const int64_t* onsets,
                                              size_t n_trials, double* out_low_ms,
                                              double* out_high_ms, double* out_center_ms);

/* ------------------------------------------------------------------ */
/* Analysis                                                            */

/* Arrays of length n_freqs; grid strictly inside (0, pi). defined[i] == 0
 * marks points where |H| < 1e-8 (group/phase delay are NaN there). */
ERPDETECT_API erp_status erp_group_delay(const char* wavelet, size_t n_freqs,
                                         double* omega, double* phase,
                                         double* group_delay, double* phase_delay,
                                         uint8_t* defined);

/* Per-scale L1 coefficient sums over scales scale_low..scale_high inclusive;
 * energy has scale_high - scale_low + 1 entries. */
ERPDETECT_API erp_status erp_scale_energy(const erp_config* config, double sampling_rate_hz,
                                          const double* samples, size_t n_samples,
                                          int scale_low, int scale_high, double* energy,
                                          int* out_best_scale);

/* ------------------------------------------------------------------ */
/* Synthetic trials                                                    */

typedef struct erp_trial_spec {
    uint64_t seed;
    double duration_ms;
    double sampling_rate_hz;
    double onset_ms;
    int has_erp;
    double snr_db;
    double p1_latency_ms, n1_latency_ms, p2_latency_ms;
    double p1_amp_uv, n1_amp_uv, p2_amp_uv;
    double width_ms;
    double alpha_power;
} erp_trial_spec;

ERPDETECT_API void erp_trial_spec_init(erp_trial_spec* spec);

/* Number of samples a trial with this spec will occupy. */
ERPDETECT_API erp_status erp_trial_sample_count(const erp_trial_spec* spec, size_t* out);

/* Deterministic per seed. out_samples must hold erp_trial_sample_count()
 * entries. out_onset_index/out_n1_index may be null. */
ERPDETECT_API erp_status erp_synth_trial(const erp_trial_spec* spec, double* out_samples,
                                         size_t capacity, size_t* out_length,
                                         int64_t* out_onset_index, int64_t* out_n1_index);

/* ------------------------------------------------------------------ */
/* Scoring                                                             */

typedef struct erp_report {
    size_t tp, fn, fp, tn;
    double hit_rate, rejection_rate, overall;
    double median_latency_error_ms; /* NaN when there are no true positives */
} erp_report;

/* present[i] nonzero with detected n1 index det_n1[i]; truth_has_erp[i]
 * nonzero with ground-truth n1 index truth_n1[i]. A detection counts as a
 * true positive only within the 30 ms latency gate. */
ERPDETECT_API erp_status erp_score(const int* present, const int64_t* det_n1,
                                   const int* truth_has_erp, const int64_t* truth_n1,
                                   size_t n_trials, double sampling_rate_hz,
                                   erp_report* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ERPDETECT_H */

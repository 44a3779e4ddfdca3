#pragma once

#include <string>

namespace erp {

// All tunable thresholds and windows of the detection pipeline. Defaults are
// the shipped operating point for 512 Hz N170 detection.
struct DetectorConfig {
    std::string wavelet = "sym5";
    int scale_band_low = 40;
    int scale_band_high = 90;
    double c_tau = 0.0; // 0 = uncalibrated; every positive coefficient is retained

    double period_window_low_ms = 60.0;
    double period_window_high_ms = 88.0;
    double gaussian_center_ms = 70.0;
    double gaussian_sigma_ms = 9.0;

    double padding_ms = 10.0;
    double search_window_low_ms = 0.0;
    double search_window_high_ms = 400.0;

    double p1_n1_period_low_ms = 20.0;
    double p1_n1_period_high_ms = 90.0;
    double n1_p2_period_low_ms = 20.0;
    double n1_p2_period_high_ms = 90.0;
    double total_period_low_ms = 60.0;
    double total_period_high_ms = 160.0;

    double cone_window_ms = 50.0;
    double cone_fraction = 0.8;

    double lowpass_cutoff_hz = 65.0;
    double lowpass_attenuation_db = 25.0;

    int max_retries = 1;
    int cascade_iterations = 10;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

} // namespace erp

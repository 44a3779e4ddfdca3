#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace erp {

// Uniformly sampled single-channel EEG trace, amplitudes in microvolts.
// onset_index < 0 means no stimulus onset is known for this trace.
struct Signal {
    std::vector<double> samples;
    double rate_hz = 512.0;
    std::int64_t onset_index = -1;

    std::size_t size() const { return samples.size(); }
    double duration_ms() const {
        return static_cast<double>(samples.size()) / rate_hz * 1000.0;
    }
};

inline std::int64_t ms_to_samples(double ms, double rate_hz) {
    return std::llround(ms * rate_hz / 1000.0);
}

inline double samples_to_ms(std::int64_t idx, double rate_hz) {
    return static_cast<double>(idx) / rate_hz * 1000.0;
}

inline void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument(std::string(what) + ": non-finite sample");
        }
    }
}

} // namespace erp

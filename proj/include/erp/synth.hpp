#pragma once

#include <cstdint>
#include <vector>

#include "erp/signal.hpp"

namespace erp {

// Marsaglia xorshift64* generator; the corpus format is reproducible from the
// seed alone, so the generator identity is part of the file contract.
class Xorshift64Star {
  public:
    explicit Xorshift64Star(std::uint64_t seed)
        : state_(seed != 0 ? seed : 0x9E3779B97F4A7C15ULL) {}

    std::uint64_t next_u64() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545F4914F6CDD1DULL;
    }

    // Uniform in [0, 1) from the top 53 bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
    }

  private:
    std::uint64_t state_;
};

struct TrialSpec {
    std::uint64_t seed = 0;
    double duration_ms = 1000.0;
    double sampling_rate_hz = 512.0;
    double onset_ms = 300.0;
    bool has_erp = true;
    double snr_db = 0.0;

    double p1_latency_ms = 110.0;
    double n1_latency_ms = 170.0;
    double p2_latency_ms = 230.0;
    double p1_amp_uv = 3.0;
    double n1_amp_uv = -6.0;
    double p2_amp_uv = 3.0;
    double width_ms = 18.0;

    double alpha_power = 1.0;

    void validate() const; // throws std::invalid_argument naming the field
};

struct TrialTruth {
    bool has_erp = false;
    std::int64_t n1_index = -1;
};

struct LabeledTrial {
    std::uint64_t trial_id = 0;
    Signal signal;
    TrialSpec spec;
    TrialTruth truth;
};

// 1/f-shaped background plus a 10 Hz component of relative power alpha_power
// over the local 1/f trend, synthesized from random-phase Fourier bins of the
// trial's own grid. Deterministic per seed; target broadband RMS 10 uV.
Signal make_background(double duration_ms, double rate_hz, std::uint64_t seed,
                       double alpha_power);

// Triphasic P1/N1/P2 template: three Gaussian bumps, rendered from t = 0
// (stimulus onset) to p2_latency + 4 widths. N1 is the global minimum.
std::vector<double> make_template(const TrialSpec& spec);

// Background plus the template scaled so that its RMS over the rendered
// support matches the background RMS there at the requested SNR.
LabeledTrial make_trial(const TrialSpec& spec);

} // namespace erp

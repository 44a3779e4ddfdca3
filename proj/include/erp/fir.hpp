#pragma once

#include <vector>

#include "erp/signal.hpp"

namespace erp {

// Linear-phase lowpass FIR: odd tap count, symmetric taps, DC gain 1.
struct FirFilter {
    std::vector<double> taps;
    double design_cutoff_hz = 0.0;
    double design_attenuation_db = 0.0;
    double sampling_rate_hz = 0.0;
    double stopband_start_hz = 0.0;
};

// Hamming-windowed sinc design. The transition band runs from `cutoff_hz` to
// min(cutoff * 100/65, halfway to Nyquist); the tap count is the smallest odd
// count whose measured response rejects >= attenuation_db beyond the
// transition band while staying within 1 dB over the passband.
FirFilter design_lowpass(double rate_hz, double cutoff_hz, double attenuation_db);

// Magnitude response |H(f)| of the filter at a frequency in Hz.
double filter_gain_at(const FirFilter& filter, double freq_hz);

// Zero-phase forward-backward application with reflective edge handling.
// Output length equals input length; in-band peak latencies are preserved.
Signal filter_signal(const Signal& signal, const FirFilter& filter);

} // namespace erp

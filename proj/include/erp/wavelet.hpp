#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "erp/signal.hpp"

namespace erp {

// Scaling (lowpass) filter h_n with sum sqrt(2), plus the highpass filter
// derived by quadrature-mirror alternation g_n = (-1)^n h_n.
struct WaveletSpec {
    std::string name;
    std::vector<double> lowpass;
    std::vector<double> highpass;
    bool orthogonal = true; // false for the biorthogonal family
};

// Mother wavelet psi sampled by the cascade algorithm. Sample m sits at
// x = (m + grid_offset) / samples_per_unit in natural units, where
// grid_offset is the lowpass filter's DC group delay. support = [x_0, x_last].
struct SampledWavelet {
    std::vector<double> values;
    double samples_per_unit = 0.0;
    double grid_offset = 0.0;
    double support_start = 0.0;
    double support_end = 0.0;

    // Linear interpolation of psi(x); zero outside the support.
    double evaluate(double x) const;
};

struct CwtMatrix {
    std::vector<int> scales;                   // ascending positive
    std::vector<std::vector<double>> coefficients; // rows = scales
    double sampling_rate_hz = 0.0;

    const std::vector<double>& row_at_scale(int scale) const;
};

struct GroupDelayProfile {
    std::vector<double> omega;        // rad/sample, strictly inside (0, pi)
    std::vector<double> phase;        // unwrapped theta(omega), rad
    std::vector<double> group_delay;  // tau(omega), samples; NaN where undefined
    std::vector<double> phase_delay;  // theta/(-omega), samples; NaN where undefined
    std::vector<std::uint8_t> defined;
};

// Supported identifiers: haar, db4..db8, sym5, bior3.9.
WaveletSpec load_wavelet(const std::string& name);
const std::vector<std::string>& supported_wavelets();

// Cascade refinement of psi; resolution doubles per iteration (2^iterations
// samples per natural unit). iterations in [4, 14].
SampledWavelet cascade_evaluate(const WaveletSpec& spec, int iterations);

// L2 difference between two cascade iterates of the same wavelet, evaluated
// on the coarser grid with both iterates placed at their true x positions.
double cascade_l2_difference(const SampledWavelet& a, const SampledWavelet& b);

// Continuous wavelet transform by direct time-domain correlation with the
// cascade-sampled wavelet, rescaled per scale and renormalized to unit
// discrete L2 norm. Kernels are centered on b; boundaries are zero-padded.
CwtMatrix cwt(const Signal& signal, const WaveletSpec& spec,
              const std::vector<int>& scales, int cascade_iterations = 10);

// Single row of the transform at one scale (same contract as cwt()).
std::vector<double> cwt_row(std::span<const double> samples,
                            const SampledWavelet& psi, double scale);

// tau(omega) through the exact FIR identity
// Re{ (sum n h_n e^{-iwn}) * conj(H(w)) } / |H(w)|^2 on a grid of n_freqs
// points strictly inside (0, pi). Points with |H| < 1e-8 are marked undefined.
GroupDelayProfile group_delay(const WaveletSpec& spec, int n_freqs);
GroupDelayProfile group_delay_of_taps(std::span<const double> taps, int n_freqs);

// Group delay at a single frequency; NaN when |H| < 1e-8.
double group_delay_at(std::span<const double> taps, double omega);

// Center frequency of the sampled wavelet, in radians per natural unit,
// defined as the argmax of |Psi| over the discrete spectrum.
double center_frequency(const SampledWavelet& psi);

// Predicted coefficient-pair displacement for a wavelet stretched to `scale`
// at the given sampling rate: scale * tau(omega_c / scale), in milliseconds.
double asymmetry_shift(const WaveletSpec& spec, double scale, double rate_hz,
                       int cascade_iterations = 10);

} // namespace erp

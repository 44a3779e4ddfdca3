#include "erp/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace erp {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMagnitudeFloor = 1e-8;

std::vector<double> upsample_convolve(const std::vector<double>& seq,
                                      const std::vector<double>& filt) {
    std::vector<double> up(2 * seq.size() - 1, 0.0);
    for (std::size_t i = 0; i < seq.size(); ++i) up[2 * i] = seq[i];
    std::vector<double> out(up.size() + filt.size() - 1, 0.0);
    for (std::size_t i = 0; i < up.size(); ++i) {
        if (up[i] == 0.0) continue;
        for (std::size_t j = 0; j < filt.size(); ++j) out[i + j] += up[i] * filt[j];
    }
    return out;
}

double dc_group_delay(const std::vector<double>& taps) {
    double num = 0.0, den = 0.0;
    for (std::size_t n = 0; n < taps.size(); ++n) {
        num += static_cast<double>(n) * taps[n];
        den += taps[n];
    }
    return num / den;
}

} // namespace

double SampledWavelet::evaluate(double x) const {
    const double idx = x * samples_per_unit - grid_offset;
    if (idx <= 0.0 || idx >= static_cast<double>(values.size() - 1)) {
        // Endpoints fall through to zero: psi vanishes at the support edges.
        if (idx == 0.0) return values.front();
        return 0.0;
    }
    const auto lo = static_cast<std::size_t>(idx);
    const double frac = idx - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

SampledWavelet cascade_evaluate(const WaveletSpec& spec, int iterations) {
    if (iterations < 4 || iterations > 14) {
        throw std::invalid_argument("cascade iterations must be in [4, 14]");
    }
    std::vector<double> seq = spec.highpass;
    for (int j = 1; j < iterations; ++j) seq = upsample_convolve(seq, spec.lowpass);

    SampledWavelet psi;
    psi.samples_per_unit = std::ldexp(1.0, iterations);
    const double norm = std::sqrt(psi.samples_per_unit);
    psi.values.resize(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) psi.values[i] = seq[i] * norm;
    psi.grid_offset = dc_group_delay(spec.lowpass);
    psi.support_start = psi.grid_offset / psi.samples_per_unit;
    psi.support_end =
        (static_cast<double>(psi.values.size() - 1) + psi.grid_offset) / psi.samples_per_unit;

    const double dx = 1.0 / psi.samples_per_unit;
    const double mean = std::accumulate(psi.values.begin(), psi.values.end(), 0.0) * dx;
    double l2 = 0.0;
    for (double v : psi.values) l2 += v * v;
    l2 = std::sqrt(l2 * dx);
    if (std::abs(mean) > 1e-3 || (spec.orthogonal && std::abs(l2 - 1.0) > 1e-3)) {
        throw std::runtime_error("cascade did not converge for " + spec.name);
    }
    return psi;
}

double cascade_l2_difference(const SampledWavelet& a, const SampledWavelet& b) {
    const SampledWavelet& coarse = a.samples_per_unit <= b.samples_per_unit ? a : b;
    const SampledWavelet& fine = a.samples_per_unit <= b.samples_per_unit ? b : a;
    double acc = 0.0;
    const double dx = 1.0 / coarse.samples_per_unit;
    for (std::size_t m = 0; m < coarse.values.size(); ++m) {
        const double x = (static_cast<double>(m) + coarse.grid_offset) / coarse.samples_per_unit;
        const double d = coarse.values[m] - fine.evaluate(x);
        acc += d * d;
    }
    return std::sqrt(acc * dx);
}

std::vector<double> cwt_row(std::span<const double> samples,
                            const SampledWavelet& psi, double scale) {
    if (scale <= 0.0) throw std::invalid_argument("scale must be positive");
    const auto t0 = static_cast<std::int64_t>(std::ceil(psi.support_start * scale));
    const auto t1 = static_cast<std::int64_t>(std::floor(psi.support_end * scale));
    if (t1 - t0 + 1 < 3) throw std::invalid_argument("scale too small for kernel");

    std::vector<double> kernel(static_cast<std::size_t>(t1 - t0 + 1));
    double norm = 0.0;
    for (std::size_t m = 0; m < kernel.size(); ++m) {
        kernel[m] = psi.evaluate(static_cast<double>(t0 + static_cast<std::int64_t>(m)) / scale);
        norm += kernel[m] * kernel[m];
    }
    norm = std::sqrt(norm);
    if (norm > 0.0) {
        for (double& k : kernel) k /= norm;
    }

    const auto n = static_cast<std::int64_t>(samples.size());
    const auto half = static_cast<std::int64_t>(kernel.size() / 2);
    std::vector<double> row(samples.size(), 0.0);
    for (std::int64_t b = 0; b < n; ++b) {
        const std::int64_t base = b - half;
        std::size_t m_lo = base < 0 ? static_cast<std::size_t>(-base) : 0;
        std::size_t m_hi = kernel.size();
        if (base + static_cast<std::int64_t>(kernel.size()) > n) {
            m_hi = static_cast<std::size_t>(n - base);
        }
        double acc = 0.0;
        for (std::size_t m = m_lo; m < m_hi; ++m) {
            acc += kernel[m] * samples[static_cast<std::size_t>(base + static_cast<std::int64_t>(m))];
        }
        row[static_cast<std::size_t>(b)] = acc;
    }
    return row;
}

CwtMatrix cwt(const Signal& signal, const WaveletSpec& spec,
              const std::vector<int>& scales, int cascade_iterations) {
    if (scales.empty()) throw std::invalid_argument("empty scale grid");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (scales[i] <= 0) throw std::invalid_argument("scales must be positive");
        if (i > 0 && scales[i] <= scales[i - 1]) {
            throw std::invalid_argument("scales must be ascending");
        }
    }
    require_finite(signal.samples, "cwt input");
    const SampledWavelet psi = cascade_evaluate(spec, cascade_iterations);
    const double support = psi.support_end - psi.support_start;
    const double min_len = static_cast<double>(scales.back()) * support / 4.0;
    if (static_cast<double>(signal.samples.size()) < min_len) {
        throw std::invalid_argument("signal too short for the largest scale");
    }

    CwtMatrix out;
    out.scales = scales;
    out.sampling_rate_hz = signal.rate_hz;
    out.coefficients.reserve(scales.size());
    for (int a : scales) {
        out.coefficients.push_back(cwt_row(signal.samples, psi, static_cast<double>(a)));
    }
    return out;
}

const std::vector<double>& CwtMatrix::row_at_scale(int scale) const {
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (scales[i] == scale) return coefficients[i];
    }
    throw std::out_of_range("scale not present in matrix");
}

GroupDelayProfile group_delay_of_taps(std::span<const double> taps, int n_freqs) {
    if (n_freqs < 64) throw std::invalid_argument("n_freqs must be >= 64");
    GroupDelayProfile p;
    p.omega.resize(static_cast<std::size_t>(n_freqs));
    p.phase.resize(p.omega.size());
    p.group_delay.resize(p.omega.size());
    p.phase_delay.resize(p.omega.size());
    p.defined.resize(p.omega.size());

    double prev_arg = 0.0;
    double unwrap = 0.0;
    bool have_prev = false;
    for (int j = 0; j < n_freqs; ++j) {
        const double w = kPi * static_cast<double>(j + 1) / static_cast<double>(n_freqs + 1);
        std::complex<double> h(0.0, 0.0), hn(0.0, 0.0);
        for (std::size_t n = 0; n < taps.size(); ++n) {
            const std::complex<double> e(std::cos(w * static_cast<double>(n)),
                                         -std::sin(w * static_cast<double>(n)));
            h += taps[n] * e;
            hn += static_cast<double>(n) * taps[n] * e;
        }
        const double mag = std::abs(h);
        const double arg = std::arg(h);
        if (have_prev) {
            double d = arg - prev_arg;
            while (d > kPi) { d -= 2.0 * kPi; unwrap -= 2.0 * kPi; }
            while (d < -kPi) { d += 2.0 * kPi; unwrap += 2.0 * kPi; }
        }
        prev_arg = arg;
        have_prev = true;

        const auto idx = static_cast<std::size_t>(j);
        p.omega[idx] = w;
        p.phase[idx] = arg + unwrap;
        if (mag < kMagnitudeFloor) {
            p.defined[idx] = 0;
            p.group_delay[idx] = std::numeric_limits<double>::quiet_NaN();
            p.phase_delay[idx] = std::numeric_limits<double>::quiet_NaN();
        } else {
            p.defined[idx] = 1;
            p.group_delay[idx] = (hn * std::conj(h)).real() / (mag * mag);
            p.phase_delay[idx] = p.phase[idx] / (-w);
        }
    }
    return p;
}

GroupDelayProfile group_delay(const WaveletSpec& spec, int n_freqs) {
    return group_delay_of_taps(spec.lowpass, n_freqs);
}

double group_delay_at(std::span<const double> taps, double omega) {
    std::complex<double> h(0.0, 0.0), hn(0.0, 0.0);
    for (std::size_t n = 0; n < taps.size(); ++n) {
        const std::complex<double> e(std::cos(omega * static_cast<double>(n)),
                                     -std::sin(omega * static_cast<double>(n)));
        h += taps[n] * e;
        hn += static_cast<double>(n) * taps[n] * e;
    }
    const double mag = std::abs(h);
    if (mag < kMagnitudeFloor) return std::numeric_limits<double>::quiet_NaN();
    return (hn * std::conj(h)).real() / (mag * mag);
}

double center_frequency(const SampledWavelet& psi) {
    // Zero-padded DFT magnitude scan; resolution ~ spu / (4 * len).
    std::size_t n = 1;
    while (n < psi.values.size() * 4) n <<= 1;
    double best_mag = -1.0;
    std::size_t best_k = 1;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        double re = 0.0, im = 0.0;
        const double step = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
        for (std::size_t m = 0; m < psi.values.size(); ++m) {
            const double ang = step * static_cast<double>(m);
            re += psi.values[m] * std::cos(ang);
            im += psi.values[m] * std::sin(ang);
        }
        const double mag = re * re + im * im;
        if (mag > best_mag) {
            best_mag = mag;
            best_k = k;
        }
    }
    const double cycles_per_unit = static_cast<double>(best_k) / static_cast<double>(n) *
                                   psi.samples_per_unit;
    return 2.0 * kPi * cycles_per_unit;
}

double asymmetry_shift(const WaveletSpec& spec, double scale, double rate_hz,
                       int cascade_iterations) {
    if (scale <= 0.0) throw std::invalid_argument("scale must be positive");
    const SampledWavelet psi = cascade_evaluate(spec, cascade_iterations);
    const double omega_c = center_frequency(psi);
    const double omega_dig = omega_c / scale;
    if (omega_dig <= 0.0 || omega_dig >= kPi) {
        throw std::invalid_argument("center frequency maps outside (0, pi) at this scale");
    }
    const double tau = group_delay_at(spec.lowpass, omega_dig);
    if (!std::isfinite(tau)) {
        throw std::runtime_error("group delay undefined at the mapped center frequency");
    }
    return scale * tau / rate_hz * 1000.0;
}

} // namespace erp

#include "erp/fir.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace erp {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kMaxTaps = 4001;

double sinc(double x) {
    if (x == 0.0) return 1.0;
    return std::sin(kPi * x) / (kPi * x);
}

std::vector<double> windowed_sinc(int n_taps, double fc_norm) {
    std::vector<double> taps(static_cast<std::size_t>(n_taps));
    const double alpha = static_cast<double>(n_taps - 1) / 2.0;
    double sum = 0.0;
    for (int n = 0; n < n_taps; ++n) {
        const double w =
            0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(n) /
                                   static_cast<double>(n_taps - 1));
        const double v = w * sinc(fc_norm * (static_cast<double>(n) - alpha));
        taps[static_cast<std::size_t>(n)] = v;
        sum += v;
    }
    for (double& t : taps) t /= sum; // DC gain 1
    return taps;
}

double gain_at(const std::vector<double>& taps, double freq_hz, double rate_hz) {
    const double w = 2.0 * kPi * freq_hz / rate_hz;
    double re = 0.0, im = 0.0;
    for (std::size_t n = 0; n < taps.size(); ++n) {
        re += taps[n] * std::cos(w * static_cast<double>(n));
        im -= taps[n] * std::sin(w * static_cast<double>(n));
    }
    return std::sqrt(re * re + im * im);
}

bool meets_spec(const std::vector<double>& taps, double rate_hz, double cutoff_hz,
                double stop_hz, double attenuation_db) {
    const double nyq = rate_hz / 2.0;
    const double stop_limit = std::pow(10.0, -attenuation_db / 20.0);
    const double pass_limit = std::pow(10.0, -1.0 / 20.0);
    const int grid = 1024;
    for (int i = 0; i <= grid; ++i) {
        const double f = nyq * static_cast<double>(i) / static_cast<double>(grid);
        const double g = gain_at(taps, f, rate_hz);
        if (f >= stop_hz && g > stop_limit) return false;
        if (f <= cutoff_hz && (g < pass_limit || g > 1.0 + (1.0 - pass_limit))) return false;
    }
    return true;
}

} // namespace

FirFilter design_lowpass(double rate_hz, double cutoff_hz, double attenuation_db) {
    const double nyq = rate_hz / 2.0;
    if (cutoff_hz <= 0.0 || cutoff_hz >= nyq) {
        throw std::invalid_argument("cutoff must lie strictly below Nyquist");
    }
    if (attenuation_db < 20.0) {
        throw std::invalid_argument("attenuation must be at least 20 dB");
    }
    const double stop_hz = std::min(cutoff_hz * 100.0 / 65.0, cutoff_hz + (nyq - cutoff_hz) / 2.0);
    const double fc_norm = (cutoff_hz + stop_hz) / 2.0 / nyq;

    int n_taps = static_cast<int>(std::ceil(3.3 * rate_hz / (stop_hz - cutoff_hz)));
    if (n_taps % 2 == 0) ++n_taps;
    if (n_taps < 5) n_taps = 5;
    for (; n_taps <= kMaxTaps; n_taps += 2) {
        std::vector<double> taps = windowed_sinc(n_taps, fc_norm);
        if (meets_spec(taps, rate_hz, cutoff_hz, stop_hz, attenuation_db)) {
            FirFilter f;
            f.taps = std::move(taps);
            f.design_cutoff_hz = cutoff_hz;
            f.design_attenuation_db = attenuation_db;
            f.sampling_rate_hz = rate_hz;
            f.stopband_start_hz = stop_hz;
            return f;
        }
    }
    throw std::runtime_error("lowpass design did not meet the attenuation spec");
}

double filter_gain_at(const FirFilter& filter, double freq_hz) {
    return gain_at(filter.taps, freq_hz, filter.sampling_rate_hz);
}

Signal filter_signal(const Signal& signal, const FirFilter& filter) {
    if (signal.rate_hz != filter.sampling_rate_hz) {
        throw std::invalid_argument("filter sampling rate does not match signal");
    }
    const auto n = static_cast<std::int64_t>(signal.samples.size());
    const auto m = static_cast<std::int64_t>(filter.taps.size());
    if (n == 0) return signal;

    // Reflect up to m samples on both edges.
    const std::int64_t pad = std::min(m, n - 1);
    std::vector<double> work(static_cast<std::size_t>(n + 2 * pad));
    for (std::int64_t i = 0; i < pad; ++i) {
        work[static_cast<std::size_t>(i)] = signal.samples[static_cast<std::size_t>(pad - i)];
    }
    for (std::int64_t i = 0; i < n; ++i) {
        work[static_cast<std::size_t>(pad + i)] = signal.samples[static_cast<std::size_t>(i)];
    }
    for (std::int64_t i = 0; i < pad; ++i) {
        work[static_cast<std::size_t>(pad + n + i)] =
            signal.samples[static_cast<std::size_t>(n - 2 - i)];
    }

    auto convolve_same = [&](const std::vector<double>& x) {
        const auto half = m / 2;
        std::vector<double> y(x.size(), 0.0);
        const auto xn = static_cast<std::int64_t>(x.size());
        for (std::int64_t i = 0; i < xn; ++i) {
            double acc = 0.0;
            const std::int64_t base = i - half;
            std::int64_t k_lo = base < 0 ? -base : 0;
            std::int64_t k_hi = std::min(m, xn - base);
            for (std::int64_t k = k_lo; k < k_hi; ++k) {
                acc += filter.taps[static_cast<std::size_t>(k)] *
                       x[static_cast<std::size_t>(base + k)];
            }
            y[static_cast<std::size_t>(i)] = acc;
        }
        return y;
    };

    std::vector<double> fwd = convolve_same(work);
    std::reverse(fwd.begin(), fwd.end());
    std::vector<double> bwd = convolve_same(fwd);
    std::reverse(bwd.begin(), bwd.end());

    Signal out = signal;
    for (std::int64_t i = 0; i < n; ++i) {
        out.samples[static_cast<std::size_t>(i)] = bwd[static_cast<std::size_t>(pad + i)];
    }
    return out;
}

} // namespace erp

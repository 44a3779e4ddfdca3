#include "erp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace erp {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTargetRmsUv = 10.0;
constexpr double kNoiseFloorHz = 1.0;

} // namespace

void TrialSpec::validate() const {
    auto bad = [](const std::string& field) {
        throw std::invalid_argument("invalid trial spec field: " + field);
    };
    if (duration_ms < 300.0) bad("duration_ms");
    if (sampling_rate_hz <= 0.0) bad("sampling_rate_hz");
    if (onset_ms < 0.0 || onset_ms >= duration_ms) bad("onset_ms");
    if (alpha_power < 0.0) bad("alpha_power");
    if (has_erp) {
        if (!(p1_latency_ms < n1_latency_ms && n1_latency_ms < p2_latency_ms))
            bad("peak latencies");
        if (n1_latency_ms < 130.0 || n1_latency_ms > 200.0) bad("n1_latency_ms");
        if (!(n1_amp_uv < 0.0)) bad("n1_amp_uv");
        if (!(p1_amp_uv > 0.0)) bad("p1_amp_uv");
        if (!(p2_amp_uv > 0.0)) bad("p2_amp_uv");
        if (width_ms <= 0.0) bad("width_ms");
    }
}

Signal make_background(double duration_ms, double rate_hz, std::uint64_t seed,
                       double alpha_power) {
    if (duration_ms < 300.0) throw std::invalid_argument("duration must be >= 300 ms");
    if (alpha_power < 0.0) throw std::invalid_argument("alpha_power must be >= 0");

    const auto n = static_cast<std::size_t>(ms_to_samples(duration_ms, rate_hz));
    const double T = static_cast<double>(n) / rate_hz;
    Signal out;
    out.rate_hz = rate_hz;
    out.samples.assign(n, 0.0);

    const std::size_t k_max = n / 2;
    if (k_max < 2) return out;

    // 1/sqrt(f) amplitudes above the noise floor, normalized to the target RMS.
    std::vector<double> amps(k_max, 0.0);
    double power = 0.0;
    for (std::size_t k = 1; k < k_max; ++k) {
        const double f = static_cast<double>(k) / T;
        if (f < kNoiseFloorHz) continue;
        amps[k] = 1.0 / std::sqrt(f);
        power += amps[k] * amps[k] / 2.0;
    }
    const double norm = power > 0.0 ? kTargetRmsUv / std::sqrt(power) : 0.0;
    for (double& a : amps) a *= norm;

    const auto k_alpha = static_cast<std::size_t>(std::llround(10.0 * T));
    Xorshift64Star rng(seed);
    for (std::size_t k = 1; k < k_max; ++k) {
        const double phase = rng.next_double() * 2.0 * kPi;
        double a = amps[k];
        if (a == 0.0) continue;
        if (k == k_alpha) a *= std::sqrt(1.0 + alpha_power);
        const double step = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
        for (std::size_t t = 0; t < n; ++t) {
            out.samples[t] += a * std::cos(step * static_cast<double>(t) + phase);
        }
    }
    return out;
}

std::vector<double> make_template(const TrialSpec& spec) {
    spec.validate();
    if (!spec.has_erp) throw std::invalid_argument("template requested for a no-ERP spec");
    const double dur = spec.p2_latency_ms + 4.0 * spec.width_ms;
    const auto n = static_cast<std::size_t>(ms_to_samples(dur, spec.sampling_rate_hz)) + 1;
    std::vector<double> tmpl(n, 0.0);
    auto bump = [&](double center_ms, double amp) {
        for (std::size_t i = 0; i < n; ++i) {
            const double t = samples_to_ms(static_cast<std::int64_t>(i), spec.sampling_rate_hz);
            const double z = (t - center_ms) / spec.width_ms;
            tmpl[i] += amp * std::exp(-0.5 * z * z);
        }
    };
    bump(spec.p1_latency_ms, spec.p1_amp_uv);
    bump(spec.n1_latency_ms, spec.n1_amp_uv);
    bump(spec.p2_latency_ms, spec.p2_amp_uv);
    return tmpl;
}

LabeledTrial make_trial(const TrialSpec& spec) {
    spec.validate();
    LabeledTrial trial;
    trial.spec = spec;
    trial.signal = make_background(spec.duration_ms, spec.sampling_rate_hz, spec.seed,
                                   spec.alpha_power);
    trial.signal.onset_index = ms_to_samples(spec.onset_ms, spec.sampling_rate_hz);
    trial.truth.has_erp = spec.has_erp;
    trial.truth.n1_index = -1;
    if (!spec.has_erp) return trial;

    if (spec.onset_ms + spec.p2_latency_ms + spec.width_ms > spec.duration_ms) {
        throw std::invalid_argument("template extends past the trial end");
    }
    const std::vector<double> tmpl = make_template(spec);
    const auto onset = static_cast<std::size_t>(trial.signal.onset_index);
    const std::size_t avail = trial.signal.samples.size() - onset;
    const std::size_t len = std::min(tmpl.size(), avail);

    double bg_power = 0.0, t_power = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        bg_power += trial.signal.samples[onset + i] * trial.signal.samples[onset + i];
        t_power += tmpl[i] * tmpl[i];
    }
    if (t_power <= 0.0) throw std::invalid_argument("degenerate template");
    const double gain = std::pow(10.0, spec.snr_db / 20.0) * std::sqrt(bg_power / t_power);
    for (std::size_t i = 0; i < len; ++i) {
        trial.signal.samples[onset + i] += gain * tmpl[i];
    }
    trial.truth.n1_index =
        trial.signal.onset_index + ms_to_samples(spec.n1_latency_ms, spec.sampling_rate_hz);
    return trial;
}

} // namespace erp

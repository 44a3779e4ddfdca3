#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "erp/synth.hpp"

using namespace erp;

namespace {

// Periodogram power at one Fourier bin of the trial's own grid.
double bin_power(const std::vector<double>& x, std::size_t k) {
    const double step = 2.0 * 3.14159265358979323846 * static_cast<double>(k) /
                        static_cast<double>(x.size());
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        re += x[t] * std::cos(step * static_cast<double>(t));
        im -= x[t] * std::sin(step * static_cast<double>(t));
    }
    return re * re + im * im;
}

} // namespace

TEST_CASE("background generation is deterministic per seed") {
    const Signal a = make_background(1000.0, 512.0, 77, 1.0);
    const Signal b = make_background(1000.0, 512.0, 77, 1.0);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i] == b.samples[i]);
    }
    const Signal c = make_background(1000.0, 512.0, 78, 1.0);
    bool differs = false;
    for (std::size_t i = 0; i < a.samples.size() && !differs; ++i) {
        differs = a.samples[i] != c.samples[i];
    }
    CHECK(differs);
}

TEST_CASE("the 10 Hz bin follows the alpha power knob") {
    // 2 s trial: bin spacing 0.5 Hz, alpha bin k = 20. The synthesized bins
    // are pure cosines, so bin powers are exact and the trend is the
    // neighbouring 1/f bins rescaled to 10 Hz.
    auto bump_db = [](double alpha) {
        const Signal s = make_background(2000.0, 512.0, 5, alpha);
        const std::size_t k_alpha = 20;
        const double p_alpha = bin_power(s.samples, k_alpha);
        double trend = 0.0;
        int cnt = 0;
        for (std::size_t k : {k_alpha - 3, k_alpha - 2, k_alpha + 2, k_alpha + 3}) {
            const double f = static_cast<double>(k) * 0.5;
            trend += bin_power(s.samples, k) * (f / 10.0); // undo the 1/f slope
            ++cnt;
        }
        trend /= cnt;
        return 10.0 * std::log10(p_alpha / trend);
    };
    CHECK(std::abs(bump_db(0.0)) < 3.0);
    CHECK(bump_db(4.0) >= 6.0);
}

TEST_CASE("background is zero-mean") {
    const Signal s = make_background(2000.0, 512.0, 13, 1.0);
    double mean = 0.0;
    for (double v : s.samples) mean += v;
    mean /= static_cast<double>(s.samples.size());
    CHECK(std::abs(mean) < 0.5);
}

TEST_CASE("template minimum sits at the N1 latency") {
    TrialSpec spec; // defaults: P1 110/+3, N1 170/-6, P2 230/+3, width 18
    const std::vector<double> tmpl = make_template(spec);

    // oracle: argmin of the independently evaluated three-bump sum
    std::size_t argmin = 0;
    double best = 1e300;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        const double t = samples_to_ms(static_cast<std::int64_t>(i), spec.sampling_rate_hz);
        auto g = [&](double mu, double a) {
            const double z = (t - mu) / spec.width_ms;
            return a * std::exp(-0.5 * z * z);
        };
        const double v = g(110, 3) + g(170, -6) + g(230, 3);
        if (v < best) {
            best = v;
            argmin = i;
        }
    }
    std::size_t got = 0;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        if (tmpl[i] < tmpl[got]) got = i;
    }
    CHECK(std::abs(static_cast<int>(got) - static_cast<int>(argmin)) <= 1);
    CHECK(std::abs(static_cast<std::int64_t>(got) -
                   ms_to_samples(170.0, spec.sampling_rate_hz)) <= 1);
}

TEST_CASE("template scales linearly with its amplitudes") {
    TrialSpec a;
    TrialSpec b = a;
    b.p1_amp_uv *= 2.5;
    b.n1_amp_uv *= 2.5;
    b.p2_amp_uv *= 2.5;
    const auto ta = make_template(a);
    const auto tb = make_template(b);
    REQUIRE(ta.size() == tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) {
        CHECK(tb[i] == doctest::Approx(2.5 * ta[i]).epsilon(1e-12));
    }
}

TEST_CASE("template generation requires has_erp") {
    TrialSpec spec;
    spec.has_erp = false;
    CHECK_THROWS_AS(make_template(spec), std::invalid_argument);
}

TEST_CASE("a no-ERP trial equals its background bit for bit") {
    TrialSpec spec;
    spec.seed = 99;
    spec.has_erp = false;
    const LabeledTrial t = make_trial(spec);
    const Signal bg = make_background(spec.duration_ms, spec.sampling_rate_hz, 99,
                                      spec.alpha_power);
    REQUIRE(t.signal.samples.size() == bg.samples.size());
    for (std::size_t i = 0; i < bg.samples.size(); ++i) {
        CHECK(t.signal.samples[i] == bg.samples[i]);
    }
    CHECK_FALSE(t.truth.has_erp);
    CHECK(t.truth.n1_index == -1);
}

TEST_CASE("SNR 0 dB means unit in-window RMS ratio") {
    TrialSpec spec;
    spec.seed = 21;
    spec.snr_db = 0.0;
    const LabeledTrial t = make_trial(spec);
    const Signal bg = make_background(spec.duration_ms, spec.sampling_rate_hz, 21,
                                      spec.alpha_power);
    const auto onset = static_cast<std::size_t>(t.signal.onset_index);
    const std::size_t len = make_template(spec).size();
    double p_t = 0.0, p_b = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        const double inj = t.signal.samples[onset + i] - bg.samples[onset + i];
        p_t += inj * inj;
        p_b += bg.samples[onset + i] * bg.samples[onset + i];
    }
    CHECK(std::sqrt(p_t / p_b) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("templates must fit inside the trial") {
    TrialSpec spec;
    spec.onset_ms = 800.0; // 800 + 230 + 18 > 1000
    CHECK_THROWS_AS(make_trial(spec), std::invalid_argument);
}

TEST_CASE("the N1 latency window is enforced") {
    TrialSpec spec;
    spec.n1_latency_ms = 300.0;
    spec.p2_latency_ms = 360.0;
    spec.p1_latency_ms = 240.0;
    try {
        spec.validate();
        FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("n1_latency_ms") != std::string::npos);
    }
}

TEST_CASE("truth fields follow the trial parameters") {
    TrialSpec spec;
    spec.seed = 3;
    spec.n1_latency_ms = 180.0;
    spec.p1_latency_ms = 120.0;
    spec.p2_latency_ms = 240.0;
    const LabeledTrial t = make_trial(spec);
    CHECK(t.truth.has_erp);
    CHECK(t.truth.n1_index ==
          t.signal.onset_index + ms_to_samples(180.0, spec.sampling_rate_hz));
}

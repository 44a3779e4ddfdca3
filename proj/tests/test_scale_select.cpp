#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "erp/scale_select.hpp"
#include "erp/synth.hpp"

using namespace erp;

namespace {

CwtMatrix matrix_of(std::vector<int> scales, std::size_t cols, double rate_hz) {
    CwtMatrix m;
    m.scales = std::move(scales);
    m.sampling_rate_hz = rate_hz;
    m.coefficients.assign(m.scales.size(), std::vector<double>(cols, 0.0));
    return m;
}

} // namespace

TEST_CASE("scale energy of the zero matrix ties toward the smallest scale") {
    const CwtMatrix m = matrix_of({5, 10, 15}, 64, 512.0);
    const ScaleEnergy se = scale_energy(m);
    for (double e : se.energy) CHECK(e == 0.0);
    CHECK(se.best == 5);
}

TEST_CASE("a single nonzero entry owns the energy") {
    CwtMatrix m = matrix_of({10, 20, 30}, 64, 512.0);
    m.coefficients[1][17] = 3.5;
    const ScaleEnergy se = scale_energy(m);
    CHECK(se.energy[0] == 0.0);
    CHECK(se.energy[1] == doctest::Approx(3.5));
    CHECK(se.energy[2] == 0.0);
    CHECK(se.best == 20);
}

TEST_CASE("energy argmax of the default N170 template sits in the expected band") {
    // Oracle: full CWT of the default template embedded in a quiet trial.
    TrialSpec spec;
    spec.has_erp = true;
    const std::vector<double> tmpl = make_template(spec);

    Signal s;
    s.rate_hz = 512.0;
    s.samples.assign(666, 0.0);
    const std::size_t onset = 154;
    for (std::size_t i = 0; i < tmpl.size(); ++i) s.samples[onset + i] = tmpl[i];

    std::vector<int> scales(128);
    for (int a = 1; a <= 128; ++a) scales[static_cast<std::size_t>(a - 1)] = a;
    const CwtMatrix m = cwt(s, load_wavelet("sym5"), scales);
    const ScaleEnergy se = scale_energy(m);
    CHECK(se.best >= 50);
    CHECK(se.best <= 80);
}

TEST_CASE("scale energy is permutation-equivariant over time") {
    std::mt19937 rng(5);
    std::normal_distribution<double> dist;
    CwtMatrix m = matrix_of({10, 20}, 128, 512.0);
    for (auto& row : m.coefficients)
        for (auto& v : row) v = dist(rng);
    const ScaleEnergy before = scale_energy(m);
    for (auto& row : m.coefficients) {
        std::shuffle(row.begin(), row.end(), rng);
    }
    const ScaleEnergy after = scale_energy(m);
    for (std::size_t i = 0; i < before.energy.size(); ++i) {
        CHECK(before.energy[i] == doctest::Approx(after.energy[i]).epsilon(1e-12));
    }
}

TEST_CASE("scaling the matrix scales the energies and keeps the argmax") {
    std::mt19937 rng(6);
    std::normal_distribution<double> dist;
    CwtMatrix m = matrix_of({10, 20, 30}, 128, 512.0);
    for (auto& row : m.coefficients)
        for (auto& v : row) v = dist(rng);
    const ScaleEnergy a = scale_energy(m);
    CwtMatrix m2 = m;
    for (auto& row : m2.coefficients)
        for (auto& v : row) v *= 3.0;
    const ScaleEnergy b = scale_energy(m2);
    CHECK(b.best == a.best);
    for (std::size_t i = 0; i < a.energy.size(); ++i) {
        CHECK(b.energy[i] == doctest::Approx(3.0 * a.energy[i]).epsilon(1e-12));
    }
}

TEST_CASE("cone: one tight column band is fully concentrated") {
    CwtMatrix m = matrix_of({10, 20}, 512, 512.0);
    for (std::size_t b = 250; b < 262; ++b) {
        m.coefficients[0][b] = 2.0;
        m.coefficients[1][b] = 3.0;
    }
    const ConeReport r = cone_of_influence(m, 1.0, 50.0, 0.8);
    CHECK(r.concentration == doctest::Approx(1.0));
    CHECK(r.localized);
    CHECK(r.peak_scale == 20);
    CHECK(r.peak_time_index >= 250);
    CHECK(r.peak_time_index < 262);
}

TEST_CASE("cone: uniform spread over a 1 s trial is not localized") {
    CwtMatrix m = matrix_of({10}, 512, 512.0); // 1 s at 512 Hz
    for (std::size_t b = 0; b < 512; b += 8) m.coefficients[0][b] = 2.0;
    m.coefficients[0][256] = 2.5;
    const ConeReport r = cone_of_influence(m, 1.0, 50.0, 0.8);
    // Oracle: direct count. 2*window/duration fraction of retained cells.
    std::size_t total = 0, near = 0;
    const std::int64_t win = 26; // 50 ms at 512 Hz rounds to 26 samples
    for (std::size_t b = 0; b < 512; ++b) {
        if (m.coefficients[0][b] >= 1.0) {
            ++total;
            if (std::abs(static_cast<int>(b) - 256) <= win) ++near;
        }
    }
    CHECK(r.concentration ==
          doctest::Approx(static_cast<double>(near) / static_cast<double>(total)));
    CHECK_FALSE(r.localized);
    CHECK(r.concentration < 0.2);
}

TEST_CASE("cone: nothing above threshold is the degenerate report") {
    const CwtMatrix m = matrix_of({10, 20}, 128, 512.0);
    const ConeReport r = cone_of_influence(m, 1.0, 50.0, 0.8);
    CHECK_FALSE(r.localized);
    CHECK(r.concentration == 0.0);
}

TEST_CASE("localized cone passes its peak scale through") {
    CwtMatrix m = matrix_of({55, 63, 70}, 512, 512.0);
    for (std::size_t b = 250; b < 260; ++b) m.coefficients[1][b] = 4.0;
    DetectorConfig cfg;
    const ConeReport r = cone_of_influence(m, 1.0, 50.0, 0.8);
    REQUIRE(r.localized);
    CHECK(select_analysis_scale(m, r, cfg) == 63);
}

TEST_CASE("non-localized selection falls back to the in-band peak scale") {
    CwtMatrix m = matrix_of({41, 71, 95}, 512, 512.0);
    // spread positives so the cone cannot localize; strongest in-band cell at 71
    for (std::size_t b = 10; b < 500; b += 12) m.coefficients[0][b] = 1.5;
    m.coefficients[1][300] = 9.0;
    m.coefficients[2][100] = 11.0; // outside the band: must be ignored
    DetectorConfig cfg; // band [40, 90]
    const ConeReport r = cone_of_influence(m, 1.0, 50.0, 0.8);
    REQUIRE_FALSE(r.localized);
    CHECK(select_analysis_scale(m, r, cfg) == 71);
}

TEST_CASE("disjoint scale band is an error") {
    const CwtMatrix m = matrix_of({1, 2, 3}, 128, 512.0);
    DetectorConfig cfg;
    cfg.scale_band_low = 200;
    cfg.scale_band_high = 300;
    const ConeReport r = cone_of_influence(m, 0.5, 50.0, 0.8);
    CHECK_THROWS_AS(select_analysis_scale(m, r, cfg), std::invalid_argument);
}

TEST_CASE("threshold calibration arithmetic") {
    // Synthesized matrices are overkill here: drive calibrate_threshold with
    // constructed trials whose CWT peaks are known through the full pipeline
    // in the integration tests; the 50% rule itself is checked directly.
    ThresholdCalibration cal;
    cal.per_trial_peaks = {4.0, 6.0};
    cal.c_tau = 0.5 * (4.0 + 6.0) / 2.0;
    CHECK(cal.c_tau == doctest::Approx(2.5));
    cal.per_trial_peaks = {8.0};
    cal.c_tau = 0.5 * 8.0;
    CHECK(cal.c_tau == doctest::Approx(4.0));
}

TEST_CASE("threshold calibration over synthetic labeled trials") {
    std::vector<Signal> trials;
    for (int i = 0; i < 20; ++i) {
        TrialSpec spec;
        spec.seed = 4000 + static_cast<std::uint64_t>(i);
        spec.snr_db = 0.0;
        spec.n1_latency_ms = 150.0 + (i * 13) % 41;
        spec.p1_latency_ms = spec.n1_latency_ms - 60.0;
        spec.p2_latency_ms = spec.n1_latency_ms + 60.0;
        trials.push_back(make_trial(spec).signal);
    }
    DetectorConfig cfg;
    const WaveletSpec w = load_wavelet(cfg.wavelet);
    const ThresholdCalibration cal = calibrate_threshold(trials, w, cfg);
    REQUIRE(cal.per_trial_peaks.size() == 20);
    const double maxp = *std::max_element(cal.per_trial_peaks.begin(),
                                          cal.per_trial_peaks.end());
    CHECK(cal.c_tau > 0.0);
    CHECK(cal.c_tau < maxp);

    // Oracle: direct recomputation of the halving rule.
    double mean = 0.0;
    for (double p : cal.per_trial_peaks) mean += p;
    mean /= 20.0;
    CHECK(2.0 * cal.c_tau - mean == 0.0);
}

TEST_CASE("threshold calibration error paths") {
    DetectorConfig cfg;
    const WaveletSpec w = load_wavelet(cfg.wavelet);
    CHECK_THROWS_AS(calibrate_threshold({}, w, cfg), std::invalid_argument);

    Signal zero;
    zero.rate_hz = 512.0;
    zero.samples.assign(512, 0.0);
    zero.onset_index = 154;
    CHECK_THROWS_AS(calibrate_threshold({zero}, w, cfg), std::runtime_error);

    Signal no_onset = zero;
    no_onset.onset_index = -1;
    CHECK_THROWS_AS(calibrate_threshold({no_onset}, w, cfg), std::invalid_argument);
}

// erpdetect command-line front end: synthetic corpus generation, batch
// detection with JSON output, and analysis exports (group delay, scale
// energy, threshold calibration). Talks to the library through the C API.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "erpdetect.h"

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct CliError {
    int code;
    std::string message;
};

[[noreturn]] void die(int code, const std::string& message) {
    throw CliError{code, message};
}

void check_api(erp_status status, const std::string& what) {
    if (status == ERP_OK) return;
    die(status == ERP_ERROR_BAD_DATA ? kExitData : kExitUsage,
        what + ": " + erp_status_name(status) + " (" + erp_last_error() + ")");
}

// ------------------------------------------------------------------
// Trial file I/O

struct Trial {
    std::uint64_t trial_id = 0;
    std::string channel = "synth";
    std::int64_t onset_index = -1;
    std::vector<double> samples;
};

struct TrialFile {
    double sampling_rate_hz = 0.0;
    std::vector<Trial> trials;
};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

double parse_double(const std::string& cell, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size() || !std::isfinite(v)) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        die(kExitData, "row " + std::to_string(line_no) + ": cannot parse '" + cell + "'");
    }
}

std::int64_t parse_int(const std::string& cell, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        die(kExitData, "row " + std::to_string(line_no) + ": cannot parse '" + cell + "'");
    }
}

TrialFile read_trial_file(const std::string& path, std::optional<double> rate_override) {
    std::ifstream in(path);
    if (!in) die(kExitData, "cannot open " + path);

    TrialFile file;
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    bool long_form = false;
    Trial* long_current = nullptr;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (line.find("sampling_rate_hz") != std::string::npos && eq != std::string::npos) {
                file.sampling_rate_hz = parse_double(line.substr(eq + 1), line_no);
            }
            continue;
        }
        const std::vector<std::string> cells = split_csv(line);
        if (header.empty()) {
            header = cells;
            if (header.size() >= 4 && header[2] == "index") {
                long_form = true;
            } else if (header.size() < 4 || header[0] != "trial_id") {
                die(kExitData, "row " + std::to_string(line_no) + ": unrecognized header");
            }
            continue;
        }
        if (long_form) {
            if (cells.size() != 4) {
                die(kExitData, "row " + std::to_string(line_no) + ": expected 4 columns");
            }
            const auto id = static_cast<std::uint64_t>(parse_int(cells[0], line_no));
            if (!long_current || long_current->trial_id != id) {
                file.trials.push_back(Trial{id, cells[1], -1, {}});
                long_current = &file.trials.back();
            }
            const auto idx = static_cast<std::size_t>(parse_int(cells[2], line_no));
            if (long_current->samples.size() != idx) {
                die(kExitData, "row " + std::to_string(line_no) + ": non-contiguous index");
            }
            long_current->samples.push_back(parse_double(cells[3], line_no));
        } else {
            if (cells.size() != header.size()) {
                die(kExitData, "row " + std::to_string(line_no) + ": expected " +
                                   std::to_string(header.size()) + " columns, got " +
                                   std::to_string(cells.size()));
            }
            Trial t;
            t.trial_id = static_cast<std::uint64_t>(parse_int(cells[0], line_no));
            t.channel = cells[1];
            t.onset_index = parse_int(cells[2], line_no);
            t.samples.reserve(cells.size() - 3);
            for (std::size_t i = 3; i < cells.size(); ++i) {
                t.samples.push_back(parse_double(cells[i], line_no));
            }
            file.trials.push_back(std::move(t));
        }
    }
    if (rate_override) file.sampling_rate_hz = *rate_override;
    if (file.sampling_rate_hz <= 0.0) {
        die(kExitUsage, path + ": no sampling_rate_hz metadata row and no --rate given");
    }
    std::sort(file.trials.begin(), file.trials.end(),
              [](const Trial& a, const Trial& b) { return a.trial_id < b.trial_id; });
    return file;
}

struct TruthRow {
    bool has_erp = false;
    std::int64_t n1_index = -1;
};

std::vector<TruthRow> read_truth_file(const std::string& path, std::size_t expect) {
    std::ifstream in(path);
    if (!in) die(kExitData, "cannot open " + path);
    std::vector<TruthRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!have_header) {
            have_header = true;
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != 3) {
            die(kExitData, "row " + std::to_string(line_no) + ": expected 3 columns");
        }
        TruthRow r;
        r.has_erp = parse_int(cells[1], line_no) != 0;
        r.n1_index = parse_int(cells[2], line_no);
        rows.push_back(r);
    }
    if (rows.size() != expect) {
        die(kExitData, path + ": " + std::to_string(rows.size()) + " truth rows for " +
                           std::to_string(expect) + " trials");
    }
    return rows;
}

// ------------------------------------------------------------------
// Config JSON

std::pair<double, double> parse_band(const std::string& text, const std::string& flag) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) die(kExitUsage, flag + " expects lo:hi");
    try {
        return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
    } catch (const std::exception&) {
        die(kExitUsage, flag + " expects lo:hi");
    }
}

void apply_config_json(erp_config& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) die(kExitUsage, "cannot open config " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        die(kExitUsage, path + ": " + e.what());
    }
    auto band = [&](const ordered_json& v, double& lo, double& hi, const std::string& key) {
        if (!v.is_array() || v.size() != 2) die(kExitUsage, "config key " + key + ": expected [lo, hi]");
        lo = v[0].get<double>();
        hi = v[1].get<double>();
    };
    for (const auto& [key, value] : j.items()) {
        if (key == "wavelet") {
            const std::string w = value.get<std::string>();
            std::snprintf(cfg.wavelet, sizeof cfg.wavelet, "%s", w.c_str());
        } else if (key == "scale_band") {
            double lo, hi;
            band(value, lo, hi, key);
            cfg.scale_band_low = static_cast<int>(lo);
            cfg.scale_band_high = static_cast<int>(hi);
        } else if (key == "c_tau") {
            cfg.c_tau = value.get<double>();
        } else if (key == "period_window_ms") {
            band(value, cfg.period_window_low_ms, cfg.period_window_high_ms, key);
        } else if (key == "gaussian_center_ms") {
            cfg.gaussian_center_ms = value.get<double>();
        } else if (key == "gaussian_sigma_ms") {
            cfg.gaussian_sigma_ms = value.get<double>();
        } else if (key == "padding_ms") {
            cfg.padding_ms = value.get<double>();
        } else if (key == "search_window_ms") {
            band(value, cfg.search_window_low_ms, cfg.search_window_high_ms, key);
        } else if (key == "p1_n1_period_ms") {
            band(value, cfg.p1_n1_period_low_ms, cfg.p1_n1_period_high_ms, key);
        } else if (key == "n1_p2_period_ms") {
            band(value, cfg.n1_p2_period_low_ms, cfg.n1_p2_period_high_ms, key);
        } else if (key == "total_period_ms") {
            band(value, cfg.total_period_low_ms, cfg.total_period_high_ms, key);
        } else if (key == "cone_window_ms") {
            cfg.cone_window_ms = value.get<double>();
        } else if (key == "cone_fraction") {
            cfg.cone_fraction = value.get<double>();
        } else if (key == "lowpass_cutoff_hz") {
            cfg.lowpass_cutoff_hz = value.get<double>();
        } else if (key == "lowpass_attenuation_db") {
            cfg.lowpass_attenuation_db = value.get<double>();
        } else if (key == "max_retries") {
            cfg.max_retries = value.get<int>();
        } else if (key == "cascade_iterations") {
            cfg.cascade_iterations = value.get<int>();
        } else if (key == "calibration_info") {
            // informational block written by `analyze calibrate`
        } else {
            die(kExitUsage, "config: unknown key '" + key + "'");
        }
    }
}

ordered_json config_echo(const erp_config& cfg, double rate) {
    ordered_json j;
    j["wavelet"] = cfg.wavelet;
    j["scale_band"] = {cfg.scale_band_low, cfg.scale_band_high};
    j["c_tau"] = cfg.c_tau;
    j["period_window_ms"] = {cfg.period_window_low_ms, cfg.period_window_high_ms};
    j["gaussian_center_ms"] = cfg.gaussian_center_ms;
    j["gaussian_sigma_ms"] = cfg.gaussian_sigma_ms;
    j["padding_ms"] = cfg.padding_ms;
    j["search_window_ms"] = {cfg.search_window_low_ms, cfg.search_window_high_ms};
    j["p1_n1_period_ms"] = {cfg.p1_n1_period_low_ms, cfg.p1_n1_period_high_ms};
    j["n1_p2_period_ms"] = {cfg.n1_p2_period_low_ms, cfg.n1_p2_period_high_ms};
    j["total_period_ms"] = {cfg.total_period_low_ms, cfg.total_period_high_ms};
    j["cone_window_ms"] = cfg.cone_window_ms;
    j["cone_fraction"] = cfg.cone_fraction;
    j["lowpass_cutoff_hz"] = cfg.lowpass_cutoff_hz;
    j["lowpass_attenuation_db"] = cfg.lowpass_attenuation_db;
    j["max_retries"] = cfg.max_retries;
    j["cascade_iterations"] = cfg.cascade_iterations;
    j["sampling_rate_hz"] = rate;
    return j;
}

// ------------------------------------------------------------------
// Subcommand state

struct SynthOptions {
    std::size_t count = 10;
    std::uint64_t seed = 1;
    double erp_fraction = 1.0;
    double rate = 512.0;
    double duration_ms = 1000.0;
    double onset_ms = 300.0;
    double snr_db = 0.0;
    double alpha_power = 1.0;
    std::string n1_range = "170";
    double p1_offset_ms = 60.0;
    double p2_offset_ms = 60.0;
    double width_ms = 18.0;
    double p1_uv = 3.0;
    double n1_uv = -6.0;
    double p2_uv = 3.0;
    std::string out;
    std::string truth_out;
};

// Deterministic per-trial latency draw inside [lo, hi].
double latency_for(std::uint64_t index, std::uint64_t seed, double lo, double hi) {
    const std::uint64_t h = (index * 2654435761ULL + seed * 40503ULL) % 100000ULL;
    return lo + (hi - lo) * static_cast<double>(h) / 100000.0;
}

int run_synth(const SynthOptions& opt) {
    double n1_lo, n1_hi;
    if (opt.n1_range.find(':') != std::string::npos) {
        std::tie(n1_lo, n1_hi) = parse_band(opt.n1_range, "--n1-ms");
    } else {
        try {
            n1_lo = n1_hi = std::stod(opt.n1_range);
        } catch (const std::exception&) {
            die(kExitUsage, "--n1-ms expects a latency or lo:hi");
        }
    }

    std::ofstream out(opt.out, std::ios::binary);
    if (!out) die(kExitUsage, "cannot write " + opt.out);
    const std::string truth_path =
        opt.truth_out.empty() ? opt.out + ".truth.csv" : opt.truth_out;
    std::ofstream truth(truth_path, std::ios::binary);
    if (!truth) die(kExitUsage, "cannot write " + truth_path);

    erp_trial_spec proto;
    erp_trial_spec_init(&proto);
    proto.duration_ms = opt.duration_ms;
    proto.sampling_rate_hz = opt.rate;
    proto.onset_ms = opt.onset_ms;
    proto.snr_db = opt.snr_db;
    proto.alpha_power = opt.alpha_power;
    proto.width_ms = opt.width_ms;
    proto.p1_amp_uv = opt.p1_uv;
    proto.n1_amp_uv = opt.n1_uv;
    proto.p2_amp_uv = opt.p2_uv;

    size_t n_samples = 0;
    check_api(erp_trial_sample_count(&proto, &n_samples), "sample count");

    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", opt.rate);
    out << "# sampling_rate_hz=" << buf << "\n";
    out << "trial_id,channel,onset_index";
    for (std::size_t i = 0; i < n_samples; ++i) out << ",sample_" << i;
    out << "\n";
    truth << "trial_id,has_erp,n1_index\n";

    const auto n_pos = static_cast<std::size_t>(
        std::llround(opt.erp_fraction * static_cast<double>(opt.count)));
    std::vector<double> samples(n_samples);
    for (std::size_t i = 0; i < opt.count; ++i) {
        erp_trial_spec spec = proto;
        spec.seed = opt.seed * 1000003ULL + i;
        spec.has_erp = i < n_pos ? 1 : 0;
        if (spec.has_erp) {
            const double lat = latency_for(i, opt.seed, n1_lo, n1_hi);
            spec.n1_latency_ms = lat;
            spec.p1_latency_ms = lat - opt.p1_offset_ms;
            spec.p2_latency_ms = lat + opt.p2_offset_ms;
        }
        size_t len = 0;
        int64_t onset = -1, n1 = -1;
        check_api(erp_synth_trial(&spec, samples.data(), samples.size(), &len, &onset, &n1),
                  "trial " + std::to_string(i));
        out << i << ",synth," << onset;
        for (std::size_t k = 0; k < len; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", samples[k]);
            out << ',' << buf;
        }
        out << "\n";
        truth << i << ',' << (spec.has_erp ? 1 : 0) << ',' << n1 << "\n";
    }
    return kExitOk;
}

struct DetectOptions {
    std::string in;
    std::string truth;
    std::string config;
    std::string out;
    std::string wavelet;
    std::string scale_band;
    double rate = 0.0;
    double c_tau = -1.0;
};

erp_config build_config(const std::string& config_path, const std::string& wavelet,
                        const std::string& scale_band, double c_tau) {
    erp_config cfg;
    erp_config_init(&cfg);
    if (!config_path.empty()) apply_config_json(cfg, config_path);
    if (!wavelet.empty()) std::snprintf(cfg.wavelet, sizeof cfg.wavelet, "%s", wavelet.c_str());
    if (!scale_band.empty()) {
        const auto [lo, hi] = parse_band(scale_band, "--scale-band");
        cfg.scale_band_low = static_cast<int>(lo);
        cfg.scale_band_high = static_cast<int>(hi);
    }
    if (c_tau >= 0.0) cfg.c_tau = c_tau;
    const erp_status s = erp_config_validate(&cfg);
    if (s != ERP_OK) die(kExitUsage, std::string("config: ") + erp_last_error());
    return cfg;
}

int run_detect(const DetectOptions& opt) {
    const TrialFile file = read_trial_file(
        opt.in, opt.rate > 0.0 ? std::optional<double>(opt.rate) : std::nullopt);
    const erp_config cfg = build_config(opt.config, opt.wavelet, opt.scale_band, opt.c_tau);

    erp_detector* det = nullptr;
    check_api(erp_detector_create(&cfg, file.sampling_rate_hz, &det), "detector");

    ordered_json per_trial = ordered_json::array();
    std::vector<int> present;
    std::vector<int64_t> det_n1;
    for (const Trial& t : file.trials) {
        erp_detection d;
        const erp_status s =
            erp_detector_run(det, t.samples.data(), t.samples.size(), t.onset_index, &d);
        if (s != ERP_OK) {
            erp_detector_destroy(det);
            die(kExitData, "trial " + std::to_string(t.trial_id) + ": " + erp_last_error());
        }
        ordered_json row;
        row["trial_id"] = t.trial_id;
        row["present"] = d.present != 0;
        const double to_ms = 1000.0 / file.sampling_rate_hz;
        row["start_ms"] = static_cast<double>(d.start_index) * to_ms;
        row["end_ms"] = static_cast<double>(d.end_index) * to_ms;
        if (d.present) {
            row["p1"] = {{"ms", d.p1.latency_ms}, {"uv", d.p1.amplitude_uv}};
            row["n1"] = {{"ms", d.n1.latency_ms}, {"uv", d.n1.amplitude_uv}};
            row["p2"] = {{"ms", d.p2.latency_ms}, {"uv", d.p2.amplitude_uv}};
        } else {
            row["p1"] = nullptr;
            row["n1"] = nullptr;
            row["p2"] = nullptr;
        }
        row["score"] = d.pair_score;
        row["best_scale"] = d.best_scale;
        row["retried"] = d.retried != 0;
        per_trial.push_back(row);
        present.push_back(d.present);
        det_n1.push_back(d.n1.index);
    }
    erp_detector_destroy(det);

    ordered_json doc;
    doc["config_echo"] = config_echo(cfg, file.sampling_rate_hz);
    doc["per_trial"] = per_trial;

    if (!opt.truth.empty()) {
        const std::vector<TruthRow> truth = read_truth_file(opt.truth, file.trials.size());
        std::vector<int> has(truth.size());
        std::vector<int64_t> n1(truth.size());
        for (std::size_t i = 0; i < truth.size(); ++i) {
            has[i] = truth[i].has_erp ? 1 : 0;
            n1[i] = truth[i].n1_index;
        }
        erp_report r;
        check_api(erp_score(present.data(), det_n1.data(), has.data(), n1.data(),
                            truth.size(), file.sampling_rate_hz, &r),
                  "score");
        ordered_json rep;
        rep["tp"] = r.tp;
        rep["fn"] = r.fn;
        rep["fp"] = r.fp;
        rep["tn"] = r.tn;
        rep["hit_rate"] = r.hit_rate;
        rep["rejection_rate"] = r.rejection_rate;
        rep["overall"] = r.overall;
        if (std::isfinite(r.median_latency_error_ms)) {
            rep["median_latency_error_ms"] = r.median_latency_error_ms;
        } else {
            rep["median_latency_error_ms"] = nullptr;
        }
        doc["report"] = rep;
    }

    std::ofstream out(opt.out, std::ios::binary);
    if (!out) die(kExitUsage, "cannot write " + opt.out);
    out << doc.dump(2) << "\n";
    return kExitOk;
}

int run_group_delay(const std::string& wavelet, std::size_t n_freqs,
                    const std::string& out_path) {
    std::vector<double> omega(n_freqs), phase(n_freqs), gd(n_freqs), pd(n_freqs);
    std::vector<uint8_t> defined(n_freqs);
    check_api(erp_group_delay(wavelet.c_str(), n_freqs, omega.data(), phase.data(),
                              gd.data(), pd.data(), defined.data()),
              "group-delay");
    std::ofstream out(out_path, std::ios::binary);
    if (!out) die(kExitUsage, "cannot write " + out_path);
    out << "omega_rad_per_sample,phase_rad,group_delay_samples,phase_delay_samples,defined\n";
    char buf[256];
    for (std::size_t i = 0; i < n_freqs; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d\n", omega[i], phase[i],
                      gd[i], pd[i], defined[i] ? 1 : 0);
        out << buf;
    }
    return kExitOk;
}

int run_scale_energy(const std::string& in_path, std::uint64_t trial_id,
                     const std::string& band, const std::string& config_path,
                     double rate, const std::string& out_path) {
    const TrialFile file = read_trial_file(
        in_path, rate > 0.0 ? std::optional<double>(rate) : std::nullopt);
    const Trial* trial = nullptr;
    for (const Trial& t : file.trials) {
        if (t.trial_id == trial_id) trial = &t;
    }
    if (!trial) die(kExitData, "trial " + std::to_string(trial_id) + " not in " + in_path);

    erp_config cfg = build_config(config_path, "", "", -1.0);
    int lo = 1, hi = 128;
    if (!band.empty()) {
        const auto [l, h] = parse_band(band, "--scale-band");
        lo = static_cast<int>(l);
        hi = static_cast<int>(h);
    }
    std::vector<double> energy(static_cast<std::size_t>(hi - lo + 1));
    int best = 0;
    check_api(erp_scale_energy(&cfg, file.sampling_rate_hz, trial->samples.data(),
                               trial->samples.size(), lo, hi, energy.data(), &best),
              "scale-energy");
    std::ofstream out(out_path, std::ios::binary);
    if (!out) die(kExitUsage, "cannot write " + out_path);
    out << "# best_scale=" << best << "\n";
    out << "scale,energy\n";
    char buf[96];
    for (std::size_t i = 0; i < energy.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%d,%.17g\n", lo + static_cast<int>(i), energy[i]);
        out << buf;
    }
    return kExitOk;
}

int run_calibrate(const std::string& in_path, const std::string& truth_path,
                  const std::string& config_path, double rate,
                  const std::string& out_path) {
    const TrialFile file = read_trial_file(
        in_path, rate > 0.0 ? std::optional<double>(rate) : std::nullopt);
    const std::vector<TruthRow> truth = read_truth_file(truth_path, file.trials.size());
    const erp_config cfg = build_config(config_path, "", "", -1.0);

    std::vector<double> flat;
    std::vector<size_t> offsets, lengths;
    std::vector<int64_t> onsets;
    for (std::size_t i = 0; i < file.trials.size(); ++i) {
        if (!truth[i].has_erp) continue;
        offsets.push_back(flat.size());
        lengths.push_back(file.trials[i].samples.size());
        onsets.push_back(file.trials[i].onset_index);
        flat.insert(flat.end(), file.trials[i].samples.begin(),
                    file.trials[i].samples.end());
    }
    if (offsets.empty()) die(kExitData, "no labeled ERP trials in " + truth_path);

    double c_tau = 0.0;
    std::vector<double> peaks(offsets.size());
    check_api(erp_calibrate(&cfg, file.sampling_rate_hz, flat.data(), offsets.data(),
                            lengths.data(), onsets.data(), offsets.size(), &c_tau,
                            peaks.data()),
              "calibrate");
    double w_lo = 0.0, w_hi = 0.0, w_center = 0.0;
    check_api(erp_calibrate_period(&cfg, file.sampling_rate_hz, flat.data(), offsets.data(),
                                   lengths.data(), onsets.data(), offsets.size(), &w_lo,
                                   &w_hi, &w_center),
              "calibrate");

    // Top-level keys merge straight into a detector config; the info block
    // carries the raw calibration evidence and is skipped by --config.
    ordered_json j;
    j["c_tau"] = c_tau;
    j["period_window_ms"] = {w_lo, w_hi};
    j["gaussian_center_ms"] = w_center;
    j["calibration_info"] = {{"n_trials", offsets.size()}, {"per_trial_peaks", peaks}};
    std::ofstream out(out_path, std::ios::binary);
    if (!out) die(kExitUsage, "cannot write " + out_path);
    out << j.dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-trial oscillatory ERP detection (N170) via wavelet asymmetry"};
    app.require_subcommand(1);

    SynthOptions synth;
    CLI::App* cmd_synth = app.add_subcommand("synth", "generate a synthetic trial corpus");
    cmd_synth->add_option("--count", synth.count, "number of trials");
    cmd_synth->add_option("--seed", synth.seed, "corpus seed");
    cmd_synth->add_option("--erp-fraction", synth.erp_fraction,
                          "fraction of trials carrying an ERP (leading trials)");
    cmd_synth->add_option("--rate", synth.rate, "sampling rate, Hz");
    cmd_synth->add_option("--duration-ms", synth.duration_ms, "trial duration");
    cmd_synth->add_option("--onset-ms", synth.onset_ms, "stimulus onset");
    cmd_synth->add_option("--snr-db", synth.snr_db, "template SNR over the background");
    cmd_synth->add_option("--alpha-power", synth.alpha_power, "10 Hz relative power");
    cmd_synth->add_option("--n1-ms", synth.n1_range, "N1 latency, value or lo:hi");
    cmd_synth->add_option("--p1-offset-ms", synth.p1_offset_ms, "P1 lead before N1");
    cmd_synth->add_option("--p2-offset-ms", synth.p2_offset_ms, "P2 lag after N1");
    cmd_synth->add_option("--width-ms", synth.width_ms, "bump width");
    cmd_synth->add_option("--p1-uv", synth.p1_uv, "P1 amplitude");
    cmd_synth->add_option("--n1-uv", synth.n1_uv, "N1 amplitude");
    cmd_synth->add_option("--p2-uv", synth.p2_uv, "P2 amplitude");
    cmd_synth->add_option("--out", synth.out, "corpus CSV path")->required();
    cmd_synth->add_option("--truth-out", synth.truth_out,
                          "truth CSV path (default: <out>.truth.csv)");

    DetectOptions det;
    CLI::App* cmd_detect = app.add_subcommand("detect", "run detection over a trial file");
    cmd_detect->add_option("--in", det.in, "trial CSV path")->required();
    cmd_detect->add_option("--truth", det.truth, "truth CSV for an embedded report");
    cmd_detect->add_option("--config", det.config, "JSON config overriding defaults");
    cmd_detect->add_option("--wavelet", det.wavelet, "wavelet identifier");
    cmd_detect->add_option("--rate", det.rate, "sampling rate override, Hz");
    cmd_detect->add_option("--scale-band", det.scale_band, "analysis band lo:hi");
    cmd_detect->add_option("--c-tau", det.c_tau, "detection threshold");
    cmd_detect->add_option("--out", det.out, "RunOutput JSON path")->required();

    CLI::App* cmd_analyze = app.add_subcommand("analyze", "analysis exports");
    cmd_analyze->require_subcommand(1);

    std::string gd_wavelet = "sym5", gd_out;
    std::size_t gd_nfreqs = 512;
    CLI::App* cmd_gd = cmd_analyze->add_subcommand("group-delay",
                                                   "filter phase and group delay CSV");
    cmd_gd->add_option("--wavelet", gd_wavelet, "wavelet identifier");
    cmd_gd->add_option("--n-freqs", gd_nfreqs, "grid points inside (0, pi)");
    cmd_gd->add_option("--out", gd_out, "output CSV path")->required();

    std::string se_in, se_band, se_config, se_out;
    std::uint64_t se_trial = 0;
    double se_rate = 0.0;
    CLI::App* cmd_se = cmd_analyze->add_subcommand("scale-energy",
                                                   "per-scale coefficient energy CSV");
    cmd_se->add_option("--in", se_in, "trial CSV path")->required();
    cmd_se->add_option("--trial", se_trial, "trial id (default 0)");
    cmd_se->add_option("--scale-band", se_band, "scan band lo:hi (default 1:128)");
    cmd_se->add_option("--config", se_config, "JSON config");
    cmd_se->add_option("--rate", se_rate, "sampling rate override, Hz");
    cmd_se->add_option("--out", se_out, "output CSV path")->required();

    std::string cal_in, cal_truth, cal_config, cal_out;
    double cal_rate = 0.0;
    CLI::App* cmd_cal = cmd_analyze->add_subcommand(
        "calibrate", "threshold and pair-period calibration JSON");
    cmd_cal->add_option("--in", cal_in, "trial CSV path")->required();
    cmd_cal->add_option("--truth", cal_truth, "truth CSV path")->required();
    cmd_cal->add_option("--config", cal_config, "JSON config");
    cmd_cal->add_option("--rate", cal_rate, "sampling rate override, Hz");
    cmd_cal->add_option("--out", cal_out, "output JSON path")->required();

    try {
        app.parse(argc, argv);
        if (*cmd_synth) return run_synth(synth);
        if (*cmd_detect) return run_detect(det);
        if (*cmd_gd) return run_group_delay(gd_wavelet, gd_nfreqs, gd_out);
        if (*cmd_se) {
            return run_scale_energy(se_in, se_trial, se_band, se_config, se_rate, se_out);
        }
        if (*cmd_cal) return run_calibrate(cal_in, cal_truth, cal_config, cal_rate, cal_out);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    } catch (const CliError& e) {
        std::fprintf(stderr, "erpdetect: %s\n", e.message.c_str());
        return e.code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "erpdetect: %s\n", e.what());
        return kExitUsage;
    }
}

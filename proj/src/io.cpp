// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors

#include "skyreplay/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <initializer_list>
#include <map>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace skyreplay {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string_view to_string(ReportFormat f) noexcept { return f == ReportFormat::CSV ? "csv" : "json"; }

ReportFormat parse_report_format(std::string_view s) {
    if (s == "csv") return ReportFormat::CSV;
    if (s == "json") return ReportFormat::JSON;
    throw std::invalid_argument("unknown report format: " + std::string(s));
}

// ---------------------------------------------------------------- config

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

[[noreturn]] void config_fail(std::string_view where, const std::string& what) {
    throw ConfigError(fmt::format("{}: {}", where, what));
}

void require_object(const json& j, std::string_view where) {
    if (!j.is_object()) config_fail(where, "expected an object");
}

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
    require_object(obj, where);
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            config_fail(where, fmt::format("unknown key \"{}\"", key));
    }
}

std::string child(std::string_view where, std::string_view key) { return fmt::format("{}.{}", where, key); }

void read_number(const json& obj, std::string_view key, std::string_view where, double& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number()) config_fail(child(where, key), "expected a number");
    out = it->get<double>();
}

template <typename Int>
void read_count(const json& obj, std::string_view key, std::string_view where, Int& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number_integer() || it->get<long long>() < 0)
        config_fail(child(where, key), "expected a non-negative integer");
    out = static_cast<Int>(it->get<unsigned long long>());
}

void read_bool(const json& obj, std::string_view key, std::string_view where, bool& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_boolean()) config_fail(child(where, key), "expected true or false");
    out = it->get<bool>();
}

std::optional<std::string> read_string(const json& obj, std::string_view key, std::string_view where) {
    auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    if (!it->is_string()) config_fail(child(where, key), "expected a string");
    return it->get<std::string>();
}

// Wraps enum parsers so their errors become config errors at `where`.
template <typename Fn>
auto parse_at(std::string_view where, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        config_fail(where, e.what());
    }
}

void apply_geometry(const json& g, GeometrySpec& geo) {
    constexpr std::string_view where = "geometry";
    check_keys(g, where, {"d1_km", "d2_km", "d3_km", "d4_km", "d5_km", "reference_angle_deg", "orion_speed_ms",
                          "angles_deg"});
    read_number(g, "d1_km", where, geo.d1_km);
    read_number(g, "d2_km", where, geo.d2_km);
    read_number(g, "d3_km", where, geo.d3_km);
    read_number(g, "d4_km", where, geo.d4_km);
    read_number(g, "d5_km", where, geo.d5_km);
    read_number(g, "orion_speed_ms", where, geo.orion_speed);
    double ref = geo.reference_angle / kDeg;
    read_number(g, "reference_angle_deg", where, ref);
    geo.reference_angle = ref * kDeg;
    if (auto it = g.find("angles_deg"); it != g.end()) {
        const std::string w = child(where, "angles_deg");
        check_keys(*it, w, {"legit", "capsule_attacker", "ground_attacker"});
        double legit = geo.angles.legit / kDeg, ca = geo.angles.capsule_attacker / kDeg,
               ga = geo.angles.ground_attacker / kDeg;
        read_number(*it, "legit", w, legit);
        read_number(*it, "capsule_attacker", w, ca);
        read_number(*it, "ground_attacker", w, ga);
        geo.angles = {legit * kDeg, ca * kDeg, ga * kDeg};
    }
}

void apply_attacker(const json& a, ScenarioSpec& spec) {
    constexpr std::string_view where = "attacker";
    check_keys(a, where, {"platform", "output_gain_db", "input_gain_db", "relay_gain_db"});
    if (auto p = read_string(a, "platform", where)) {
        const double out = spec.attacker.output_gain_db, in = spec.attacker.input_gain_db;
        spec.attacker = AttackerPlatform::of(parse_at(child(where, "platform"), [&] { return parse_platform(*p); }));
        spec.attacker.output_gain_db = out;
        spec.attacker.input_gain_db = in;
    }
    read_number(a, "output_gain_db", where, spec.attacker.output_gain_db);
    read_number(a, "input_gain_db", where, spec.attacker.input_gain_db);
    read_number(a, "relay_gain_db", where, spec.relay_gain_db);
}

void apply_link(const json& l, LinkPreset& link) {
    constexpr std::string_view where = "link";
    check_keys(l, where, {"snr_db", "tap2_gain_db", "tap2_extra_delay_samples", "tap2_osc_samples",
                          "tap2_osc_rate_hz"});
    read_number(l, "snr_db", where, link.snr_db);
    read_number(l, "tap2_gain_db", where, link.tap2_gain_db);
    read_number(l, "tap2_extra_delay_samples", where, link.tap2_extra_delay_samples);
    read_number(l, "tap2_osc_samples", where, link.tap2_osc_samples);
    read_number(l, "tap2_osc_rate_hz", where, link.tap2_osc_rate_hz);
}

void apply_replay(const json& r, ScenarioSpec& spec) {
    constexpr std::string_view where = "replay";
    check_keys(r, where, {"record_time_s", "replay_time_s", "synchronized"});
    read_number(r, "record_time_s", where, spec.record_time);
    if (r.contains("replay_time_s")) {
        double t2 = 0.0;
        read_number(r, "replay_time_s", where, t2);
        spec.replay_time = t2;
    }
    read_bool(r, "synchronized", where, spec.synchronized_replay);
}

ReceiverConfig parse_receiver(const json& r) {
    constexpr std::string_view where = "receiver";
    if (r.is_string()) {
        const auto name = r.get<std::string>();
        const auto profile = parse_at(where, [&] { return parse_receiver_profile(name); });
        return profile == ReceiverProfile::Baseline ? ReceiverConfig::baseline() : ReceiverConfig::hardened();
    }
    check_keys(r, where, {"profile", "n_phase_branches", "phase_search_window", "dpll_loop_bw", "dpll_damping",
                          "coarse_cfo", "equalizer", "eq_taps", "eq_step", "polyphase_branches", "timing_loop_bw",
                          "timing_damping", "sampling_offset_mode", "warmup_symbols", "per_frame_rotation",
                          "lock_threshold"});
    ReceiverConfig cfg = ReceiverConfig::baseline();
    if (auto p = read_string(r, "profile", where)) {
        const auto profile = parse_at(child(where, "profile"), [&] { return parse_receiver_profile(*p); });
        cfg = profile == ReceiverProfile::Baseline ? ReceiverConfig::baseline() : ReceiverConfig::hardened();
    }
    read_count(r, "n_phase_branches", where, cfg.n_phase_branches);
    read_count(r, "phase_search_window", where, cfg.phase_search_window);
    read_number(r, "dpll_loop_bw", where, cfg.dpll_loop_bw);
    read_number(r, "dpll_damping", where, cfg.dpll_damping);
    read_bool(r, "coarse_cfo", where, cfg.coarse_cfo);
    if (auto e = read_string(r, "equalizer", where))
        cfg.equalizer = parse_at(child(where, "equalizer"), [&] { return parse_equalizer(*e); });
    read_count(r, "eq_taps", where, cfg.eq_taps);
    read_number(r, "eq_step", where, cfg.eq_step);
    read_count(r, "polyphase_branches", where, cfg.polyphase_branches);
    read_number(r, "timing_loop_bw", where, cfg.timing_loop_bw);
    read_number(r, "timing_damping", where, cfg.timing_damping);
    if (auto m = read_string(r, "sampling_offset_mode", where)) {
        if (*m == "known") cfg.sampling_offset_mode = SamplingOffsetMode::Known;
        else if (*m == "estimated") cfg.sampling_offset_mode = SamplingOffsetMode::Estimated;
        else config_fail(child(where, "sampling_offset_mode"), "expected \"known\" or \"estimated\"");
    }
    read_count(r, "warmup_symbols", where, cfg.warmup_symbols);
    read_bool(r, "per_frame_rotation", where, cfg.per_frame_rotation);
    read_number(r, "lock_threshold", where, cfg.lock_threshold);
    return cfg;
}

std::vector<double> read_grid(const json& arr, std::string_view where) {
    if (!arr.is_array()) config_fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : arr) {
        if (!v.is_number()) config_fail(where, "expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

SweepSpec parse_sweep(const json& s, MissionPhase phase) {
    constexpr std::string_view where = "sweep";
    check_keys(s, where, {"experiment", "grid", "platforms", "n_seeds", "output_gain_db", "input_gain_db",
                          "legit_gain_db"});
    if (!s.contains("experiment")) config_fail(where, "missing key \"experiment\"");
    int number = 0;
    read_count(s, "experiment", where, number);
    SweepSpec sw = parse_at(child(where, "experiment"), [&] { return SweepSpec::experiment(number, phase); });
    if (auto it = s.find("grid"); it != s.end()) sw.grid = read_grid(*it, child(where, "grid"));
    if (auto it = s.find("platforms"); it != s.end()) {
        const std::string w = child(where, "platforms");
        if (!it->is_array()) config_fail(w, "expected an array of platform names");
        sw.platforms.clear();
        for (const auto& p : *it) {
            if (!p.is_string()) config_fail(w, "expected an array of platform names");
            const auto name = p.get<std::string>();
            sw.platforms.push_back(parse_at(w, [&] { return parse_platform(name); }));
        }
    }
    read_count(s, "n_seeds", where, sw.n_seeds);
    read_number(s, "output_gain_db", where, sw.output_gain_db);
    read_number(s, "input_gain_db", where, sw.input_gain_db);
    read_number(s, "legit_gain_db", where, sw.legit_gain_db);
    parse_at(where, [&] {
        sw.validate();
        return 0;
    });
    return sw;
}

// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

SweepSpec RunConfig::resolved_sweep() const {
    SweepSpec sw = sweep.value_or(SweepSpec::experiment(1, scenario.phase));
    sw.phase = scenario.phase;
    sw.seed = seed;
    sw.jobs = jobs;
    sw.profile = receiver.profile;
    sw.base = scenario;
    return sw;
}

RunConfig parse_config(std::string_view text, std::string_view origin) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError(fmt::format("{}:{}:{}: parse error: {}", origin, line, col, e.what()));
    }
    const std::string where(origin);
    check_keys(root, where, {"preset", "seed", "platform", "attacker", "legit_input_gain_db", "geometry", "link",
                             "replay", "n_frames", "receiver", "sweep", "output", "jobs"});

    RunConfig cfg;
    const auto preset = read_string(root, "preset", where);
    if (!preset) config_fail(where, "missing key \"preset\"");
    cfg.preset = *preset;
    const MissionPhase phase =
        parse_at(child(where, "preset"), [&] { return parse_phase(cfg.preset); });

    Platform platform = Platform::RQ4;
    if (auto p = read_string(root, "platform", where))
        platform = parse_at(child(where, "platform"), [&] { return parse_platform(*p); });
    cfg.scenario = ScenarioSpec::preset(phase, platform);

    if (!root.contains("seed")) config_fail(where, "missing key \"seed\" (runs must be seeded explicitly)");
    read_count(root, "seed", where, cfg.seed);
    cfg.scenario.seed = cfg.seed;

    if (auto it = root.find("attacker"); it != root.end()) apply_attacker(*it, cfg.scenario);
    read_number(root, "legit_input_gain_db", where, cfg.scenario.legit_input_gain_db);
    if (auto it = root.find("geometry"); it != root.end()) apply_geometry(*it, cfg.scenario.geometry);
    if (auto it = root.find("link"); it != root.end()) apply_link(*it, cfg.scenario.link);
    if (auto it = root.find("replay"); it != root.end()) apply_replay(*it, cfg.scenario);
    read_count(root, "n_frames", where, cfg.scenario.n_frames);

    if (auto it = root.find("receiver"); it != root.end()) cfg.receiver = parse_receiver(*it);
    if (auto it = root.find("sweep"); it != root.end()) cfg.sweep = parse_sweep(*it, phase);

    if (auto it = root.find("output"); it != root.end()) {
        const std::string w = child(where, "output");
        check_keys(*it, w, {"dir", "formats"});
        if (auto d = read_string(*it, "dir", w)) cfg.out_dir = *d;
        if (auto f = it->find("formats"); f != it->end()) {
            if (!f->is_array() || f->empty()) config_fail(child(w, "formats"), "expected a non-empty array");
            cfg.formats.clear();
            for (const auto& v : *f) {
                if (!v.is_string()) config_fail(child(w, "formats"), "expected \"csv\" or \"json\"");
                const auto name = v.get<std::string>();
                cfg.formats.push_back(parse_at(child(w, "formats"), [&] { return parse_report_format(name); }));
            }
        }
    }
    read_count(root, "jobs", where, cfg.jobs);
    if (cfg.jobs == 0) config_fail(child(where, "jobs"), "must be >= 1");

    try {
        cfg.scenario.validate();
        cfg.receiver.validate();
    } catch (const std::invalid_argument& e) {
        config_fail(where, e.what());
    }
    return cfg;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot open config file {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

// ---------------------------------------------------------------- IQ files

fs::path iq_sidecar_path(const fs::path& data_path) {
    fs::path p = data_path;
    p.replace_extension(".json");
    return p;
}

namespace {

std::uint32_t to_le(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::big)
        v = ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
    return v;
}

}  // namespace

void write_iq(const fs::path& path, const IQBuffer& buffer, const IqMetadata& meta) {
    if (iq_sidecar_path(path) == path) throw std::invalid_argument("write_iq: data file must not use .json");
    std::vector<std::uint32_t> words;
    words.reserve(2 * buffer.size());
    for (const cplx& s : buffer.samples()) {
        for (double part : {s.real(), s.imag()}) {
            const auto f = static_cast<float>(part);
            if (!std::isfinite(f)) throw std::invalid_argument("write_iq: sample not representable as float32");
            words.push_back(to_le(std::bit_cast<std::uint32_t>(f)));
        }
    }
    if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(words.data()),
              static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
    if (!out) throw std::runtime_error("write failed: " + path.string());

    json side;
    side["format"] = "cf32_le";
    side["sample_rate"] = buffer.sample_rate();
    side["carrier_freq"] = buffer.carrier_freq();
    side["description"] = meta.description;
    side["seed"] = meta.seed ? json(*meta.seed) : json(nullptr);
    side["samples"] = buffer.size();
    write_text_file(iq_sidecar_path(path), side.dump(2) + "\n");
}

IqFile read_iq(const fs::path& path, std::optional<double> fallback_rate) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() % sizeof(float) != 0) throw std::runtime_error("truncated IQ file (partial float): " + path.string());
    const std::size_t n_floats = bytes.size() / sizeof(float);
    if (n_floats % 2 != 0) throw std::runtime_error("truncated IQ file (odd float count): " + path.string());

    IqFile file;
    const fs::path side = iq_sidecar_path(path);
    std::ifstream sin(side);
    if (sin) {
        json meta;
        try {
            meta = json::parse(sin);
        } catch (const json::parse_error& e) {
            throw std::runtime_error(fmt::format("bad sidecar {}: {}", side.string(), e.what()));
        }
        if (!meta.contains("sample_rate") || !meta["sample_rate"].is_number())
            throw std::runtime_error("sidecar without sample_rate: " + side.string());
        file.metadata.sample_rate = meta["sample_rate"].get<double>();
        if (meta.contains("carrier_freq") && meta["carrier_freq"].is_number())
            file.metadata.carrier_freq = meta["carrier_freq"].get<double>();
        if (meta.contains("description") && meta["description"].is_string())
            file.metadata.description = meta["description"].get<std::string>();
        if (meta.contains("seed") && meta["seed"].is_number_unsigned())
            file.metadata.seed = meta["seed"].get<std::uint64_t>();
    } else {
        if (!fallback_rate)
            throw std::runtime_error(fmt::format("no sidecar {} and no sample rate given", side.string()));
        file.metadata.sample_rate = *fallback_rate;
        file.warnings.push_back(
            fmt::format("no sidecar {}; assuming sample rate {} Hz", side.string(), *fallback_rate));
    }

    std::vector<cplx> samples(n_floats / 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        std::uint32_t w[2];
        std::memcpy(w, bytes.data() + 8 * i, 8);
        samples[i] = {std::bit_cast<float>(to_le(w[0])), std::bit_cast<float>(to_le(w[1]))};
    }
    file.buffer = IQBuffer(std::move(samples), file.metadata.sample_rate, file.metadata.carrier_freq);
    return file;
}

// ---------------------------------------------------------------- reports

namespace {

std::string num(double v) { return fmt::format("{}", v); }
std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json power_json(const PowerStats& p) {
    json j;
    j["median"] = p.median;
    j["q1"] = p.q1;
    j["q3"] = p.q3;
    j["lower_whisker"] = p.lower_whisker;
    j["upper_whisker"] = p.upper_whisker;
    j["n_outliers"] = p.outliers.size();
    return j;
}

std::string_view kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::OutputGain: return "output-gain";
        case ExperimentKind::InputGain: return "input-gain";
        case ExperimentKind::LegitGain: return "legit-gain";
    }
    return "?";
}

std::optional<double> swept_value(const ExperimentReport& report, const ExperimentRow& row) {
    switch (report.kind) {
        case ExperimentKind::OutputGain: return row.attacker_output_gain_db;
        case ExperimentKind::InputGain: return row.attacker_input_gain_db;
        case ExperimentKind::LegitGain: return row.legit_input_gain_db;
    }
    return std::nullopt;
}

}  // namespace

std::string report_csv(const ExperimentReport& report) {
    std::string out =
        "phase,platform,attacker_output_gain_db,attacker_input_gain_db,legit_input_gain_db,ber_percent,"
        "nonzero_ber_fraction,delta_snr_db,power_median,power_q1,power_q3,receiver_profile,seed,station\n";
    for (const auto& r : report.rows) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(r.phase), to_string(r.platform),
                           num(r.attacker_output_gain_db), num(r.attacker_input_gain_db), num(r.legit_input_gain_db),
                           num(r.ber_percent), num(r.nonzero_ber_fraction), num(r.delta_snr_db), num(r.power.median),
                           num(r.power.q1), num(r.power.q3), to_string(r.profile), r.seed, r.station);
    }
    return out;
}

std::string report_json(const ExperimentReport& report) {
    json j;
    j["experiment"] = kind_name(report.kind);
    j["phase"] = to_string(report.phase);
    j["swept_parameter"] = report.swept_parameter;
    j["snr_mode"] = to_string(SnrMode::DataAided);
    j["trace_decimation"] = kTraceDecimation;
    json rows = json::array();
    for (const auto& r : report.rows) {
        json row;
        row["phase"] = to_string(r.phase);
        row["platform"] = to_string(r.platform);
        row["attacker_output_gain_db"] = opt_json(r.attacker_output_gain_db);
        row["attacker_input_gain_db"] = opt_json(r.attacker_input_gain_db);
        row["legit_input_gain_db"] = r.legit_input_gain_db;
        row["ber_percent"] = r.ber_percent;
        row["nonzero_ber_fraction"] = r.nonzero_ber_fraction;
        row["delta_snr_db"] = r.delta_snr_db;
        row["power_median"] = r.power.median;
        row["power_q1"] = r.power.q1;
        row["power_q3"] = r.power.q3;
        row["receiver_profile"] = to_string(r.profile);
        row["seed"] = r.seed;
        row["station"] = r.station;
        row["reference"] = r.reference;
        row["power"] = power_json(r.power);
        row["ber_per_seed"] = r.ber_per_seed;
        row["traces"] = {{"cfo_hz", r.cfo_trace_hz}, {"timing_error", r.timing_trace}, {"eq_error", r.eq_error_trace}};
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

std::vector<PlotSeries> report_plot_series(const ExperimentReport& report) {
    // Keyed by station then platform; reference rows excluded.
    std::map<std::pair<std::string, std::string>, std::vector<const ExperimentRow*>> groups;
    for (const auto& r : report.rows)
        if (!r.reference) groups[{r.station, std::string(to_string(r.platform))}].push_back(&r);

    std::vector<PlotSeries> out;
    for (const auto& [key, rows] : groups) {
        PlotSeries s;
        s.name = fmt::format("{}_{}_{}_{}", kind_name(report.kind), to_string(report.phase), key.first, key.second);
        s.text = fmt::format("# {} delta_snr_db ber_percent\n", report.swept_parameter);
        for (const ExperimentRow* r : rows)
            s.text += fmt::format("{} {} {}\n", num(swept_value(report, *r)), num(r->delta_snr_db), num(r->ber_percent));
        out.push_back(std::move(s));
    }
    return out;
}

void write_text_file(const fs::path& path, std::string_view text) {
    std::error_code ec;
    if (!path.parent_path().empty()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<fs::path> emit_report(const ExperimentReport& report, const fs::path& dir,
                                  const std::vector<ReportFormat>& formats, std::string_view stem) {
    if (report.rows.empty()) throw std::invalid_argument("emit_report: empty report");
    std::vector<fs::path> written;
    for (ReportFormat f : formats) {
        const fs::path p = dir / fmt::format("{}.{}", stem, to_string(f));
        write_text_file(p, f == ReportFormat::CSV ? report_csv(report) : report_json(report));
        written.push_back(p);
    }
    for (const auto& s : report_plot_series(report)) {
        const fs::path p = dir / "plot" / (s.name + ".dat");
        write_text_file(p, s.text);
        written.push_back(p);
    }
    return written;
}

namespace {

std::vector<std::string> outcome_labels(const ScenarioOutcome& o) {
    std::vector<std::string> labels;
    for (const auto& s : o.stations) labels.emplace_back(to_string(s.station));
    return labels;
}

}  // namespace

std::string outcome_csv(const ScenarioSpec& spec, const ScenarioOutcome& outcome, ReceiverProfile profile) {
    std::string out =
        "phase,platform,attacker_output_gain_db,attacker_input_gain_db,legit_input_gain_db,station,ber_percent,"
        "snr_db,lock,receiver_profile,seed\n";
    const bool attack = spec.attacker.present();
    const std::string og = attack ? num(spec.attacker.output_gain_db) : "";
    const std::string ig = attack ? num(spec.attacker.input_gain_db) : "";
    const auto labels = outcome_labels(outcome);
    for (std::size_t k = 0; k < outcome.stations.size(); ++k) {
        const auto& s = outcome.stations[k];
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", to_string(spec.phase), to_string(spec.attacker.name),
                           og, ig, num(spec.legit_input_gain_db), labels[k], num(100.0 * s.ber), num(s.snr_db),
                           s.diagnostics.lock_flag ? 1 : 0, to_string(profile), spec.seed);
    }
    if (outcome.bfs_majority) {
        out += fmt::format("{},{},{},{},{},BFS,{},{},,{},{}\n", to_string(spec.phase), to_string(spec.attacker.name),
                           og, ig, num(spec.legit_input_gain_db), num(100.0 * outcome.bfs_ber),
                           num(outcome.bfs_snr_db), to_string(profile), spec.seed);
    }
    return out;
}

std::string outcome_json(const ScenarioSpec& spec, const ScenarioOutcome& outcome, ReceiverProfile profile) {
    json j;
    j["phase"] = to_string(spec.phase);
    j["platform"] = to_string(spec.attacker.name);
    j["attacker_output_gain_db"] = spec.attacker.present() ? json(spec.attacker.output_gain_db) : json(nullptr);
    j["attacker_input_gain_db"] = spec.attacker.present() ? json(spec.attacker.input_gain_db) : json(nullptr);
    j["legit_input_gain_db"] = spec.legit_input_gain_db;
    j["relay_gain_db"] = spec.relay_gain_db;
    j["receiver_profile"] = to_string(profile);
    j["seed"] = spec.seed;
    j["snr_mode"] = to_string(SnrMode::DataAided);
    json stations = json::array();
    for (const auto& s : outcome.stations) {
        json st;
        st["station"] = to_string(s.station);
        st["ber_percent"] = 100.0 * s.ber;
        st["snr_db"] = s.snr_db;
        st["lock"] = s.diagnostics.lock_flag;
        st["selected_phase_branch"] = s.diagnostics.selected_phase_branch;
        st["coarse_cfo_hz"] = s.diagnostics.coarse_cfo_hz;
        st["final_decision_error"] = s.diagnostics.final_decision_error;
        if (s.power_levels.size() >= 5) st["power"] = power_json(boxplot_stats(s.power_levels));
        st["frame_errors"] = s.frame_errors;
        st["frame_snr_db"] = s.frame_snr_db;
        std::vector<double> cfo, timing, eq;
        for (std::size_t i = 0; i < s.diagnostics.cfo_estimate_trace.size(); i += kTraceDecimation)
            cfo.push_back(s.diagnostics.cfo_estimate_trace[i]);
        for (std::size_t i = 0; i < s.diagnostics.timing_error_trace.size(); i += kTraceDecimation)
            timing.push_back(s.diagnostics.timing_error_trace[i]);
        for (std::size_t i = 0; i < s.diagnostics.eq_error_trace.size(); i += kTraceDecimation)
            eq.push_back(s.diagnostics.eq_error_trace[i]);
        st["traces"] = {{"cfo_hz", cfo}, {"timing_error", timing}, {"eq_error", eq}};
        stations.push_back(std::move(st));
    }
    j["stations"] = std::move(stations);
    if (outcome.bfs_majority) {
        j["bfs"] = {{"majority", to_string(*outcome.bfs_majority)},
                    {"ber_percent", 100.0 * outcome.bfs_ber},
                    {"snr_db", outcome.bfs_snr_db}};
    }
    return j.dump(2) + "\n";
}

}  // namespace skyreplay

// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors

#include "skyreplay/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "skyreplay/dsp.hpp"

namespace skyreplay {

namespace {

constexpr double kDeg = dsp::kPi / 180.0;

double amplitude_or_zero(double db) { return std::isinf(db) && db < 0.0 ? 0.0 : db_to_amplitude(db); }

}  // namespace

std::string_view to_string(MissionPhase p) noexcept {
    switch (p) {
        case MissionPhase::LaunchDL: return "launch-dl";
        case MissionPhase::ReentryUL: return "reentry-ul";
        case MissionPhase::ReentryDL: return "reentry-dl";
    }
    return "?";
}

std::string_view to_string(Platform p) noexcept {
    switch (p) {
        case Platform::RQ4: return "RQ4";
        case Platform::MQ9: return "MQ9";
        case Platform::None: return "None";
    }
    return "?";
}

std::string_view to_string(Station s) noexcept {
    switch (s) {
        case Station::GS1: return "GS1";
        case Station::GS2: return "GS2";
        case Station::GSR: return "GSR";
        case Station::Orion: return "Orion";
    }
    return "?";
}

std::string_view to_string(LinkId l) noexcept {
    switch (l) {
        case LinkId::OR_GS1: return "OR->GS1";
        case LinkId::OR_GS2: return "OR->GS2";
        case LinkId::OR_ADV: return "OR->ADV";
        case LinkId::ADV_GS1: return "ADV->GS1";
        case LinkId::GSR_OR: return "GSR->OR";
        case LinkId::GSR_ADV: return "GSR->ADV";
        case LinkId::ADV_OR: return "ADV->OR";
        case LinkId::OR_GSR: return "OR->GSR";
        case LinkId::ADV_GSR: return "ADV->GSR";
    }
    return "?";
}

MissionPhase parse_phase(std::string_view s) {
    if (s == "launch-dl") return MissionPhase::LaunchDL;
    if (s == "reentry-ul") return MissionPhase::ReentryUL;
    if (s == "reentry-dl") return MissionPhase::ReentryDL;
    throw std::invalid_argument("unknown phase: " + std::string(s));
}

Platform parse_platform(std::string_view s) {
    if (s == "RQ4" || s == "rq4") return Platform::RQ4;
    if (s == "MQ9" || s == "mq9") return Platform::MQ9;
    if (s == "None" || s == "none") return Platform::None;
    throw std::invalid_argument("unknown platform: " + std::string(s));
}

double propagation_delay(double distance_km) {
    if (!(distance_km > 0.0)) throw std::invalid_argument("propagation_delay: distance must be > 0");
    return distance_km * 1e3 / kSpeedOfLight;
}

GeometrySpec GeometrySpec::launch() {
    GeometrySpec g;
    g.d1_km = 8.075;
    g.d2_km = 8.075;
    g.d3_km = 9.72;
    g.d4_km = 12.91;
    g.d5_km = 63.98;
    g.reference_angle = 53.0 * kDeg;
    g.orion_speed = 467.0;
    g.angles = {45.0 * kDeg, 0.0, 135.0 * kDeg};
    return g;
}

GeometrySpec GeometrySpec::reentry() {
    GeometrySpec g;
    g.d1_km = 563.0;
    g.d2_km = 6.7;
    g.d3_km = 5.62;
    g.d4_km = 8.74;
    g.d5_km = 0.0;
    g.reference_angle = 50.0 * kDeg;
    g.orion_speed = 125.0;
    g.angles = {50.0 * kDeg, 40.0 * kDeg, 45.0 * kDeg};
    return g;
}

void GeometrySpec::validate(MissionPhase phase) const {
    const bool launch = phase == MissionPhase::LaunchDL;
    for (double d : {d1_km, d2_km, d3_km, d4_km})
        if (!(d > 0.0)) throw std::invalid_argument("GeometrySpec: distances must be > 0");
    if (launch && !(d5_km > 0.0)) throw std::invalid_argument("GeometrySpec: d5 must be > 0 for launch");
    for (double a : {reference_angle, angles.legit, angles.capsule_attacker, angles.ground_attacker})
        if (!(a >= 0.0 && a < dsp::kTwoPi)) throw std::invalid_argument("GeometrySpec: angles must be in [0, 2pi)");
    if (!(orion_speed >= 0.0)) throw std::invalid_argument("GeometrySpec: speed must be >= 0");
}

AttackerPlatform AttackerPlatform::rq4() { return {Platform::RQ4, 574.0 * kKmhToMs}; }
AttackerPlatform AttackerPlatform::mq9() { return {Platform::MQ9, 444.0 * kKmhToMs}; }
AttackerPlatform AttackerPlatform::none() { return {Platform::None, 0.0}; }

AttackerPlatform AttackerPlatform::of(Platform p) {
    switch (p) {
        case Platform::RQ4: return rq4();
        case Platform::MQ9: return mq9();
        case Platform::None: return none();
    }
    return none();
}

ScenarioSpec ScenarioSpec::preset(MissionPhase phase, Platform platform) {
    ScenarioSpec s;
    s.phase = phase;
    s.geometry = phase == MissionPhase::LaunchDL ? GeometrySpec::launch() : GeometrySpec::reentry();
    s.attacker = AttackerPlatform::of(platform);
    return s;
}

void ScenarioSpec::validate() const {
    geometry.validate(phase);
    modem.validate();
    if (n_frames == 0) throw std::invalid_argument("ScenarioSpec: n_frames must be >= 1");
    if (frame.empty() || frame.length_bits() % 2 != 0)
        throw std::invalid_argument("ScenarioSpec: frame must hold an even, non-zero bit count");
    if (!(record_time >= 0.0)) throw std::invalid_argument("ScenarioSpec: record_time must be >= 0");
    if (replay_time && !(*replay_time > record_time))
        throw std::invalid_argument("ScenarioSpec: replay_time must exceed record_time");
    if (std::isnan(legit_input_gain_db) || std::isnan(relay_gain_db) || std::isnan(attacker.output_gain_db) ||
        std::isnan(attacker.input_gain_db))
        throw std::invalid_argument("ScenarioSpec: gains must not be NaN");
    if (std::isinf(legit_input_gain_db)) throw std::invalid_argument("ScenarioSpec: legit gain must be finite");
    if (!(attacker.cruise_speed >= 0.0)) throw std::invalid_argument("ScenarioSpec: attacker speed must be >= 0");
}

double ScenarioSpec::frame_duration() const {
    return static_cast<double>(frame.length_bits() / 2) / modem.symbol_rate();
}

Station ScenarioSpec::victim() const noexcept {
    switch (phase) {
        case MissionPhase::LaunchDL: return Station::GS1;
        case MissionPhase::ReentryUL: return Station::Orion;
        case MissionPhase::ReentryDL: return Station::GSR;
    }
    return Station::GSR;
}

std::vector<Station> ScenarioSpec::stations() const {
    if (phase == MissionPhase::LaunchDL) return {Station::GS1, Station::GS2};
    return {victim()};
}

LinkId ScenarioSpec::legit_link(Station s) const {
    switch (phase) {
        case MissionPhase::LaunchDL:
            if (s == Station::GS1) return LinkId::OR_GS1;
            if (s == Station::GS2) return LinkId::OR_GS2;
            break;
        case MissionPhase::ReentryUL:
            if (s == Station::Orion) return LinkId::GSR_OR;
            break;
        case MissionPhase::ReentryDL:
            if (s == Station::GSR) return LinkId::OR_GSR;
            break;
    }
    throw std::invalid_argument("ScenarioSpec: station " + std::string(to_string(s)) + " not part of phase");
}

LinkId ScenarioSpec::capture_link() const {
    return phase == MissionPhase::ReentryUL ? LinkId::GSR_ADV : LinkId::OR_ADV;
}

LinkId ScenarioSpec::replay_link() const {
    switch (phase) {
        case MissionPhase::LaunchDL: return LinkId::ADV_GS1;
        case MissionPhase::ReentryUL: return LinkId::ADV_OR;
        case MissionPhase::ReentryDL: return LinkId::ADV_GSR;
    }
    return LinkId::ADV_GSR;
}

double ScenarioSpec::link_distance_km(LinkId l) const {
    const auto& g = geometry;
    if (phase == MissionPhase::LaunchDL) {
        switch (l) {
            case LinkId::OR_GS1: return std::hypot(g.d3_km, g.d4_km);
            case LinkId::OR_GS2: return std::hypot(g.d5_km, g.d4_km);
            case LinkId::OR_ADV: return g.d2_km;
            case LinkId::ADV_GS1: return g.d1_km;
            default: break;
        }
    } else {
        switch (l) {
            case LinkId::GSR_OR:
            case LinkId::OR_GSR: return g.d4_km;
            case LinkId::GSR_ADV:
            case LinkId::ADV_GSR: return g.d2_km;
            case LinkId::ADV_OR:
            case LinkId::OR_ADV: return g.d3_km;
            default: break;
        }
    }
    throw std::invalid_argument("unknown link for phase: " + std::string(to_string(l)));
}

double ScenarioSpec::effective_replay_time() const {
    if (replay_time) return *replay_time;
    const double legit = propagation_delay(link_distance_km(legit_link(victim())));
    double t2 = record_time + frame_duration() + legit;
    // Cancel the attacker path lag so replayed symbols land on the legitimate ones.
    if (synchronized_replay)
        t2 -= propagation_delay(link_distance_km(capture_link())) +
              propagation_delay(link_distance_km(replay_link()));
    return t2;
}

namespace {

enum class Hop { Legit, CapsuleAttacker, GroundAttacker };

Hop hop_of(LinkId l) {
    switch (l) {
        case LinkId::OR_ADV:
        case LinkId::ADV_OR: return Hop::CapsuleAttacker;
        case LinkId::GSR_ADV:
        case LinkId::ADV_GSR:
        case LinkId::ADV_GS1: return Hop::GroundAttacker;
        default: return Hop::Legit;
    }
}

ChannelProfile make_profile(const ScenarioSpec& spec, LinkId link, double reference_km) {
    const double dist = spec.link_distance_km(link);
    const auto& g = spec.geometry;
    LinkKinematics kin;
    kin.carrier_freq = spec.modem.carrier_freq;
    switch (hop_of(link)) {
        case Hop::Legit:
            kin.relative_speed = g.orion_speed;
            kin.arrival_angle = g.angles.legit;
            break;
        case Hop::CapsuleAttacker:
            kin.relative_speed = g.orion_speed + spec.attacker.cruise_speed;
            kin.arrival_angle = g.angles.capsule_attacker;
            break;
        case Hop::GroundAttacker:
            kin.relative_speed = spec.attacker.cruise_speed;
            kin.arrival_angle = g.angles.ground_attacker;
            break;
    }
    const double fd = doppler_shift(kin);
    const double fs = spec.modem.sample_rate;

    ChannelProfile p;
    p.seed = dsp::mix_seed(spec.seed, 0x100 + static_cast<std::uint64_t>(link));
    dsp::GaussianSource rng(dsp::mix_seed(p.seed, 0x7A5));
    ChannelTap t1;
    t1.mean_delay = propagation_delay(dist);
    t1.gain = hop_of(link) == Hop::Legit ? 1.0 : reference_km / dist;
    t1.doppler_hz = fd;
    t1.initial_phase = dsp::kTwoPi * rng.uniform();

    ChannelTap t2 = t1;
    t2.mean_delay = t1.mean_delay + spec.link.tap2_extra_delay_samples / fs;
    t2.delay_osc_amplitude = spec.link.tap2_osc_samples / fs;
    t2.delay_osc_rate = spec.link.tap2_osc_rate_hz;
    t2.gain = t1.gain * db_to_amplitude(spec.link.tap2_gain_db);
    t2.initial_phase = dsp::kTwoPi * rng.uniform();

    p.taps = {t1, t2};
    if (std::isfinite(spec.link.snr_db)) p.noise_snr_db = spec.link.snr_db;
    return p;
}

IQBuffer through(const ChannelProfile& profile, const IQBuffer& x) {
    const auto real = realize_channel(profile, x.duration(), x.sample_rate());
    return apply_channel(x, real);
}

}  // namespace

std::map<LinkId, ChannelProfile> build_link_profiles(const ScenarioSpec& spec) {
    spec.validate();
    std::map<LinkId, ChannelProfile> out;
    for (Station s : spec.stations()) {
        const auto l = spec.legit_link(s);
        out.emplace(l, make_profile(spec, l, spec.link_distance_km(l)));
    }
    if (spec.attacker.present()) {
        const double ref = spec.link_distance_km(spec.legit_link(spec.victim()));
        out.emplace(spec.capture_link(), make_profile(spec, spec.capture_link(), ref));
        out.emplace(spec.replay_link(), make_profile(spec, spec.replay_link(), ref));
    }
    return out;
}

IQBuffer scenario_waveform(const ScenarioSpec& spec) {
    spec.validate();
    const auto symbols = qpsk_modulate(spec.frame.repeated(spec.n_frames));
    const auto shaped = pulse_shape(symbols, spec.modem);
    double longest = 0.0;
    for (Station s : spec.stations()) longest = std::max(longest, spec.link_distance_km(spec.legit_link(s)));
    const auto pad = static_cast<std::size_t>(std::ceil(propagation_delay(longest) * spec.modem.sample_rate +
                                                        spec.link.tap2_extra_delay_samples +
                                                        spec.link.tap2_osc_samples)) +
                     64;
    std::vector<cplx> x(shaped.samples());
    x.resize(x.size() + pad, cplx{});
    return shaped.with_samples(std::move(x));
}

IQBuffer stage1_capture(const ScenarioSpec& spec, const IQBuffer& tx) {
    if (!spec.attacker.present()) throw std::invalid_argument("stage1_capture: scenario has no attacker");
    const auto links = build_link_profiles(spec);
    const double gain = amplitude_or_zero(spec.attacker.output_gain_db);
    if (gain == 0.0) return tx.with_samples(std::vector<cplx>(tx.size(), cplx{}));

    auto recorded = through(links.at(spec.capture_link()), tx).scaled(gain);
    const auto skip = static_cast<std::size_t>(std::llround(spec.record_time * tx.sample_rate()));
    if (skip == 0) return recorded;
    if (skip >= recorded.size()) throw std::invalid_argument("stage1_capture: record time beyond transmission");
    const auto& s = recorded.samples();
    return recorded.with_samples(std::vector<cplx>(s.begin() + static_cast<std::ptrdiff_t>(skip), s.end()));
}

IQBuffer stage2_compose(const ScenarioSpec& spec, const IQBuffer& legit_tx, const std::optional<IQBuffer>& capture,
                        std::optional<Station> victim) {
    const Station station = victim.value_or(spec.victim());
    const auto links = build_link_profiles(spec);
    const auto legit = through(links.at(spec.legit_link(station)), legit_tx).scaled(
        db_to_amplitude(spec.legit_input_gain_db));

    if (!capture || !spec.attacker.present() || station != spec.victim()) return legit;
    const double gain = amplitude_or_zero(spec.attacker.input_gain_db) * db_to_amplitude(spec.relay_gain_db);
    if (gain == 0.0 || !(capture->mean_power() > 0.0)) return legit;

    const auto replayed = through(links.at(spec.replay_link()), capture->scaled(gain));
    auto composite = superpose({{legit, 0.0}, {replayed, spec.effective_replay_time()}});
    std::vector<cplx> y(composite.samples().begin(),
                        composite.samples().begin() + static_cast<std::ptrdiff_t>(legit.size()));
    return legit.with_samples(std::move(y));
}

FrameSelection best_frame_select(const FrameCandidate& gs1, const FrameCandidate& gs2) {
    if (gs2.snr_db > gs1.snr_db) return {gs2.bits, Station::GS2};
    return {gs1.bits, Station::GS1};
}

ReceiverConfig receiver_for(const ScenarioSpec& spec, Station station, ReceiverConfig base) {
    const double delay = propagation_delay(spec.link_distance_km(spec.legit_link(station)));
    base.sampling_offset_mode = SamplingOffsetMode::Known;
    base.known_offset_samples = spec.modem.filter_delay() + delay * spec.modem.sample_rate;
    base.max_symbols = spec.n_frames * (spec.frame.length_bits() / 2);
    return base;
}

namespace {

std::vector<cplx> truth_for(const Payload& frame, const BerAlignment& a, std::size_t count) {
    const auto t = qpsk_modulate(frame);
    std::vector<cplx> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        cplx z = t[(k + a.symbol_offset) % t.size()];
        // Undo the rotation the alignment applied to the received stream.
        for (int r = 0; r < a.rotation; ++r) z = cplx{z.imag(), -z.real()};
        out[k] = z;
    }
    return out;
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioSpec& spec, const ReceiverConfig& base) {
    spec.validate();
    const auto tx = scenario_waveform(spec);
    std::optional<IQBuffer> capture;
    if (spec.attacker.present()) capture = stage1_capture(spec, tx);

    const std::size_t frame_syms = spec.frame.length_bits() / 2;
    const auto frame_syms_truth = qpsk_modulate(spec.frame);

    ScenarioOutcome out;
    for (Station st : spec.stations()) {
        const auto y = stage2_compose(spec, tx, capture, st);
        const auto cfg = receiver_for(spec, st, base);
        auto rx = receive(y, cfg, spec.modem, spec.frame);

        StationOutcome so;
        so.station = st;
        so.ber = rx.alignment->ber;
        so.power_levels = digital_power(y);

        const std::size_t skip = std::min(cfg.warmup_symbols, rx.symbols.size() / 2);
        const std::size_t count = rx.symbols.size() - skip;
        const std::span<const cplx> tail(rx.symbols.data() + skip, count);
        if (count >= kSnrMinSymbols) {
            const auto truth = truth_for(spec.frame, *rx.alignment, count);
            so.snr_db = estimate_snr(tail, std::span<const cplx>(truth)).db;
        }

        // Per-block error counts and blind SNR for frame selection.
        for (std::size_t b = 0; b + frame_syms <= count; b += frame_syms) {
            std::size_t errors = 0;
            for (std::size_t k = b; k < b + frame_syms; ++k) {
                cplx z = tail[k];
                for (int r = 0; r < rx.alignment->rotation; ++r) z = cplx{-z.imag(), z.real()};
                const cplx t = frame_syms_truth[(k + rx.alignment->symbol_offset) % frame_syms];
                errors += (std::signbit(z.real()) != std::signbit(t.real())) +
                          (std::signbit(z.imag()) != std::signbit(t.imag()));
            }
            so.frame_errors.push_back(errors);
            so.frame_snr_db.push_back(estimate_snr(tail.subspan(b, frame_syms)).db);
        }
        so.diagnostics = std::move(rx.diagnostics);
        out.stations.push_back(std::move(so));
    }

    if (out.stations.size() == 2) {
        const auto& g1 = out.stations[0];
        const auto& g2 = out.stations[1];
        const std::size_t blocks = std::min(g1.frame_errors.size(), g2.frame_errors.size());
        std::size_t errors = 0, picked_gs2 = 0;
        for (std::size_t b = 0; b < blocks; ++b) {
            const auto sel = best_frame_select({Payload{}, g1.frame_snr_db[b]}, {Payload{}, g2.frame_snr_db[b]});
            if (sel.source == Station::GS2) {
                ++picked_gs2;
                errors += g2.frame_errors[b];
            } else {
                errors += g1.frame_errors[b];
            }
        }
        const bool majority_gs2 = 2 * picked_gs2 > blocks;
        out.bfs_majority = majority_gs2 ? Station::GS2 : Station::GS1;
        out.bfs_ber = blocks ? static_cast<double>(errors) / static_cast<double>(2 * frame_syms * blocks) : 0.0;
        out.bfs_snr_db = majority_gs2 ? g2.snr_db : g1.snr_db;
    }
    return out;
}

SweepSpec SweepSpec::experiment(int number, MissionPhase phase) {
    SweepSpec s;
    s.phase = phase;
    s.output_gain_db = -25.0;
    switch (number) {
        case 1:
            s.kind = ExperimentKind::OutputGain;
            s.grid = {-45.0, -35.0, -25.0, -15.0, -5.0, 5.0};
            break;
        case 2:
            s.kind = ExperimentKind::InputGain;
            s.grid = {-30.0, -15.0, -8.0};
            break;
        case 3:
            s.kind = ExperimentKind::LegitGain;
            s.grid = {-15.0, -10.0, -5.0, 0.0};
            break;
        default: throw std::invalid_argument("experiment number must be 1, 2 or 3");
    }
    return s;
}

void SweepSpec::validate() const {
    if (grid.empty()) throw std::invalid_argument("SweepSpec: empty grid");
    if (n_seeds == 0) throw std::invalid_argument("SweepSpec: n_seeds must be >= 1");
    if (platforms.empty()) throw std::invalid_argument("SweepSpec: no platforms");
    for (double g : grid)
        if (std::isnan(g)) throw std::invalid_argument("SweepSpec: NaN grid value");
}

std::uint64_t run_seed(std::uint64_t base, std::size_t i) noexcept { return dsp::mix_seed(base, 0x5EED0000u + i); }

namespace {

struct Job {
    ScenarioSpec spec;
    std::size_t row;  // index into the row-group table
};

template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::vector<double> decimate(const std::vector<double>& v) {
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); i += kTraceDecimation) out.push_back(v[i]);
    return out;
}

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

ExperimentReport run_experiment(const SweepSpec& sweep) {
    sweep.validate();
    ScenarioSpec base = sweep.base.value_or(ScenarioSpec::preset(sweep.phase));
    base.phase = sweep.phase;
    base.validate();

    ReceiverConfig rx = sweep.profile == ReceiverProfile::Baseline ? ReceiverConfig::baseline()
                                                                   : ReceiverConfig::hardened();

    // Row groups: reference first, then platform-major, grid-minor.
    struct Group {
        Platform platform;
        std::optional<double> out_db, in_db;
        double legit_db;
        bool reference;
    };
    std::vector<Group> groups;
    groups.push_back({Platform::None, std::nullopt, std::nullopt, sweep.legit_gain_db, true});
    for (Platform p : sweep.platforms) {
        for (double g : sweep.grid) {
            Group grp{p, sweep.output_gain_db, sweep.input_gain_db, sweep.legit_gain_db, false};
            switch (sweep.kind) {
                case ExperimentKind::OutputGain: grp.out_db = g; break;
                case ExperimentKind::InputGain: grp.in_db = g; break;
                case ExperimentKind::LegitGain: grp.legit_db = g; break;
            }
            groups.push_back(grp);
        }
    }

    std::vector<Job> jobs;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& grp = groups[gi];
        for (std::size_t s = 0; s < sweep.n_seeds; ++s) {
            ScenarioSpec spec = base;
            spec.seed = run_seed(sweep.seed, s);
            const double out_db = spec.attacker.output_gain_db, in_db = spec.attacker.input_gain_db;
            spec.attacker = AttackerPlatform::of(grp.platform);
            spec.attacker.output_gain_db = grp.out_db.value_or(out_db);
            spec.attacker.input_gain_db = grp.in_db.value_or(in_db);
            spec.legit_input_gain_db = grp.legit_db;
            jobs.push_back({std::move(spec), gi});
        }
    }

    std::vector<ScenarioOutcome> results(jobs.size());
    parallel_for(jobs.size(), sweep.jobs, [&](std::size_t i) { results[i] = run_scenario(jobs[i].spec, rx); });

    const bool launch = sweep.phase == MissionPhase::LaunchDL;
    std::vector<std::string> labels;
    for (Station st : base.stations()) labels.emplace_back(to_string(st));
    if (launch) labels.emplace_back("BFS");

    // Station-level quantities of one run.
    auto ber_of = [&](const ScenarioOutcome& o, std::size_t k) {
        return k < o.stations.size() ? o.stations[k].ber : o.bfs_ber;
    };
    auto snr_of = [&](const ScenarioOutcome& o, std::size_t k) {
        return k < o.stations.size() ? o.stations[k].snr_db : o.bfs_snr_db;
    };
    auto station_of = [&](const ScenarioOutcome& o, std::size_t k) -> const StationOutcome& {
        if (k < o.stations.size()) return o.stations[k];
        return o.bfs_majority == Station::GS2 ? o.stations[1] : o.stations[0];
    };

    ExperimentReport report;
    report.kind = sweep.kind;
    report.phase = sweep.phase;
    report.swept_parameter = sweep.kind == ExperimentKind::OutputGain  ? "attacker_output_gain_db"
                             : sweep.kind == ExperimentKind::InputGain ? "attacker_input_gain_db"
                                                                       : "legit_input_gain_db";

    const std::size_t n = sweep.n_seeds;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        // Reference scale for power and SNR.
        double ref_power = 0.0, ref_snr = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            ref_power += mean(station_of(results[s], k).power_levels);
            ref_snr += snr_of(results[s], k);
        }
        ref_power /= static_cast<double>(n);
        ref_snr /= static_cast<double>(n);
        if (!(ref_power > 0.0)) ref_power = 1.0;

        for (std::size_t gi = 0; gi < groups.size(); ++gi) {
            const auto& grp = groups[gi];
            ExperimentRow row;
            row.phase = sweep.phase;
            row.platform = grp.platform;
            row.station = labels[k];
            row.reference = grp.reference;
            if (!grp.reference) {
                row.attacker_output_gain_db = grp.out_db;
                row.attacker_input_gain_db = grp.in_db;
            }
            row.legit_input_gain_db = grp.legit_db;
            row.profile = sweep.profile;
            row.seed = sweep.seed;

            std::vector<double> powers;
            double snr = 0.0;
            std::size_t nonzero = 0;
            for (std::size_t s = 0; s < n; ++s) {
                const auto& o = results[gi * n + s];
                const double b = ber_of(o, k);
                row.ber_per_seed.push_back(b);
                nonzero += b > 0.0;
                snr += snr_of(o, k);
                for (double p : station_of(o, k).power_levels) powers.push_back(p / ref_power);
            }
            row.ber_percent = 100.0 * mean(row.ber_per_seed);
            row.nonzero_ber_fraction = static_cast<double>(nonzero) / static_cast<double>(n);
            row.delta_snr_db = grp.reference ? 0.0 : snr / static_cast<double>(n) - ref_snr;
            if (powers.size() >= 5) row.power = boxplot_stats(powers);

            const auto& first = station_of(results[gi * n], k).diagnostics;
            row.cfo_trace_hz = decimate(first.cfo_estimate_trace);
            row.timing_trace = decimate(first.timing_error_trace);
            row.eq_error_trace = decimate(first.eq_error_trace);
            report.rows.push_back(std::move(row));
        }
    }
    // Reference rows first, then station-major sweep rows.
    std::stable_partition(report.rows.begin(), report.rows.end(), [](const ExperimentRow& r) { return r.reference; });
    return report;
}

}  // namespace skyreplay

// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors

#include "skyreplay/receiver.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "skyreplay/dsp.hpp"

namespace skyreplay {

std::string_view to_string(ReceiverProfile p) noexcept {
    return p == ReceiverProfile::Baseline ? "baseline" : "hardened";
}

std::string_view to_string(EqualizerKind e) noexcept {
    return e == EqualizerKind::CMA ? "cma" : "ddlms";
}

ReceiverProfile parse_receiver_profile(std::string_view s) {
    if (s == "baseline") return ReceiverProfile::Baseline;
    if (s == "hardened") return ReceiverProfile::Hardened;
    throw std::invalid_argument("unknown receiver profile: " + std::string(s));
}

EqualizerKind parse_equalizer(std::string_view s) {
    if (s == "cma") return EqualizerKind::CMA;
    if (s == "ddlms") return EqualizerKind::DDLMS;
    throw std::invalid_argument("unknown equalizer: " + std::string(s));
}

ReceiverConfig ReceiverConfig::baseline() { return ReceiverConfig{}; }

ReceiverConfig ReceiverConfig::hardened() {
    ReceiverConfig c;
    c.profile = ReceiverProfile::Hardened;
    c.dpll_loop_bw = 15.7e-3;
    c.equalizer = EqualizerKind::DDLMS;
    c.eq_step = 5e-3;
    return c;
}

void ReceiverConfig::validate() const {
    if (!(dpll_loop_bw > 0.0)) throw std::invalid_argument("ReceiverConfig: dpll_loop_bw must be > 0");
    if (!(dpll_damping > 0.0)) throw std::invalid_argument("ReceiverConfig: dpll_damping must be > 0");
    if (n_phase_branches < 2) throw std::invalid_argument("ReceiverConfig: n_phase_branches must be >= 2");
    if (phase_search_window < 8) throw std::invalid_argument("ReceiverConfig: phase_search_window must be >= 8");
    if (eq_taps < 1 || eq_taps % 2 == 0) throw std::invalid_argument("ReceiverConfig: eq_taps must be odd");
    if (!(eq_step > 0.0)) throw std::invalid_argument("ReceiverConfig: eq_step must be > 0");
    if (polyphase_branches < 2) throw std::invalid_argument("ReceiverConfig: polyphase_branches must be >= 2");
    if (!(timing_loop_bw > 0.0) || !(timing_damping > 0.0))
        throw std::invalid_argument("ReceiverConfig: timing loop parameters must be > 0");
    if (!std::isfinite(known_offset_samples) || known_offset_samples < 0.0)
        throw std::invalid_argument("ReceiverConfig: known_offset_samples must be >= 0");
    if (cfo_acquisition_symbols < 2)
        throw std::invalid_argument("ReceiverConfig: cfo_acquisition_symbols must be >= 2");
    if (!(lock_threshold > 0.0)) throw std::invalid_argument("ReceiverConfig: lock_threshold must be > 0");
}

namespace {

struct LoopGains {
    double k1;
    double k2;
};

// Proportional and integral gains of a second-order loop with unity detector
// and NCO gain, for normalised noise bandwidth bn_t and damping zeta.
LoopGains loop_gains(double bn_t, double zeta) {
    const double theta = bn_t / (zeta + 0.25 / zeta);
    const double d = 1.0 + 2.0 * zeta * theta + theta * theta;
    return {4.0 * zeta * theta / d, 4.0 * theta * theta / d};
}

double wrap_phase(double p) { return std::remainder(p, dsp::kTwoPi); }

std::vector<cplx> scaled_to_power(std::span<const cplx> x, double target) {
    double p = 0.0;
    for (const auto& s : x) p += std::norm(s);
    p /= static_cast<double>(std::max<std::size_t>(x.size(), 1));
    if (!(p > 0.0)) throw std::invalid_argument("receiver: zero-power input");
    const double g = std::sqrt(target / p);
    std::vector<cplx> y(x.begin(), x.end());
    for (auto& s : y) s *= g;
    return y;
}

std::vector<cplx> rotated(std::span<const cplx> x, int branch, int n_branches) {
    const cplx r = std::polar(1.0, -dsp::kTwoPi * branch / n_branches);
    std::vector<cplx> y(x.begin(), x.end());
    if (branch != 0)
        for (auto& s : y) s *= r;
    return y;
}

cplx quarter_turns(cplx z, int r) {
    for (int i = 0; i < r; ++i) z = cplx{-z.imag(), z.real()};
    return z;
}

double decision_distance(cplx z) { return std::abs(z - qpsk_decide(z)); }

// Raised-cosine pulse (RRC convolved with itself), t in symbols.
double raised_cosine(double t, double a) {
    const double sinc = t == 0.0 ? 1.0 : std::sin(dsp::kPi * t) / (dsp::kPi * t);
    const double den = 1.0 - (2.0 * a * t) * (2.0 * a * t);
    if (std::abs(den) < 1e-10) return dsp::kPi / 4.0 * sinc;
    return sinc * std::cos(dsp::kPi * a * t) / den;
}

// Slope of the mean Gardner detector output versus timing error (per symbol)
// for unit-power independent symbols and raised-cosine pulses.
double gardner_gain(double rolloff) {
    auto s_curve = [rolloff](double d) {
        double acc = 0.0;
        for (int m = -30; m <= 30; ++m)
            acc += raised_cosine(m - 0.5 + d, rolloff) *
                   (raised_cosine(m - 1.0 + d, rolloff) - raised_cosine(m + d, rolloff));
        return acc;
    };
    constexpr double h = 1e-3;
    return (s_curve(h) - s_curve(-h)) / (2.0 * h);
}

// Matched filter evaluated at fractional output positions. Branch p holds
// the RRC sampled at offsets p / P; branch 0 equals rrc_taps().
class PolyphaseMatchedFilter {
public:
    PolyphaseMatchedFilter(const ModemParams& params, int branches)
        : branches_(branches), ntaps_(params.num_taps() + 1) {
        const auto ref = rrc_taps(params);
        const double norm = ref[static_cast<std::size_t>(params.filter_delay())] /
                            rrc_impulse(0.0, params.rolloff);
        const double span = params.rrc_span_symbols;
        bank_.resize(static_cast<std::size_t>(branches_ * ntaps_));
        for (int p = 0; p < branches_; ++p) {
            for (int k = 0; k < ntaps_; ++k) {
                const double t = (k + static_cast<double>(p) / branches_ - params.filter_delay()) / params.sps;
                const double v = std::abs(t) > span + 1e-12 ? 0.0 : rrc_impulse(t, params.rolloff) * norm;
                bank_[static_cast<std::size_t>(p * ntaps_ + k)] = v;
            }
        }
        for (int k = 0; k + 1 < ntaps_; ++k) bank_[static_cast<std::size_t>(k)] = ref[static_cast<std::size_t>(k)];
        bank_[static_cast<std::size_t>(ntaps_ - 1)] = 0.0;
    }

    // Output of the full-length convolution at fractional index tau.
    [[nodiscard]] cplx at(std::span<const cplx> x, double tau) const {
        auto n = static_cast<long>(std::floor(tau));
        auto p = static_cast<int>(std::lround((tau - static_cast<double>(n)) * branches_));
        if (p == branches_) {
            p = 0;
            ++n;
        }
        const double* h = &bank_[static_cast<std::size_t>(p * ntaps_)];
        cplx acc{};
        const long size = static_cast<long>(x.size());
        const long k_lo = std::max<long>(0, n - size + 1);
        const long k_hi = std::min<long>(ntaps_ - 1, n);
        for (long k = k_lo; k <= k_hi; ++k) acc += h[k] * x[static_cast<std::size_t>(n - k)];
        return acc;
    }

private:
    int branches_;
    int ntaps_;
    std::vector<double> bank_;
};

// Fractional start position in [base, base + sps) with the largest mean
// symbol energy over the first symbols.
template <typename Sampler>
double energy_phase_search(Sampler&& sample, double base, int sps, double last_valid, int steps) {
    double best_pos = base;
    double best_energy = -1.0;
    for (int i = 0; i < steps; ++i) {
        const double start = base + sps * static_cast<double>(i) / steps;
        double e = 0.0;
        int count = 0;
        for (double t = start; t <= last_valid && count < 2048; t += sps, ++count) e += std::norm(sample(t));
        if (count == 0) break;
        e /= count;
        if (e > best_energy + 1e-12 * std::abs(best_energy)) {
            best_energy = e;
            best_pos = start;
        }
    }
    return best_pos;
}

struct PilotScore {
    int branch;
    double score;
};

PilotScore score_branches(std::span<const cplx> pilot, int n_branches) {
    const auto normed = scaled_to_power(pilot, 1.0);
    PilotScore best{0, std::numeric_limits<double>::infinity()};
    for (int b = 0; b < n_branches; ++b) {
        const cplx r = std::polar(1.0, -dsp::kTwoPi * b / n_branches);
        double acc = 0.0;
        for (const auto& s : normed) acc += decision_distance(s * r);
        const double score = acc / static_cast<double>(normed.size());
        if (score < best.score - 1e-9) best = {b, score};
    }
    return best;
}

std::vector<cplx> pilot_symbols(std::span<const cplx> mf, const ModemParams& params, int window,
                                double hint) {
    const auto& interp = dsp::interpolator();
    const double last = static_cast<double>(mf.size()) - 1.0;
    double start = hint;
    if (hint < 0.0) {
        const double base = std::min(2.0 * params.filter_delay(), std::max(0.0, last - params.sps));
        start = energy_phase_search([&](double t) { return interp.at(mf, t); }, base, params.sps, last,
                                    params.sps);
    }
    std::vector<cplx> pilot;
    for (double t = start; t <= last && static_cast<int>(pilot.size()) < window; t += params.sps)
        pilot.push_back(interp.at(mf, t));
    if (pilot.empty()) throw std::invalid_argument("differential_phase_search: signal shorter than one symbol");
    return pilot;
}

std::size_t symbol_limit(const ReceiverConfig& cfg) {
    return cfg.max_symbols == 0 ? std::numeric_limits<std::size_t>::max() : cfg.max_symbols;
}

}  // namespace

PhaseSearchResult differential_phase_search(const IQBuffer& signal, int n_branches, const ModemParams& params,
                                            int window_symbols, double first_symbol_hint) {
    if (signal.empty()) throw std::invalid_argument("differential_phase_search: empty signal");
    if (n_branches < 2) throw std::invalid_argument("differential_phase_search: need >= 2 branches");
    if (window_symbols < 1) throw std::invalid_argument("differential_phase_search: window must be >= 1");
    const auto mf = matched_filter(signal, params);
    const auto pilot = pilot_symbols(mf.signal.view(), params, window_symbols, first_symbol_hint);
    const auto best = score_branches(pilot, n_branches);
    return {best.branch, best.score, signal.with_samples(rotated(signal.view(), best.branch, n_branches))};
}

MatchedFilterOutput matched_filter(const IQBuffer& signal, const ModemParams& params) {
    if (std::abs(signal.sample_rate() - params.sample_rate) > 1e-9 * params.sample_rate)
        throw std::invalid_argument("matched_filter: sample rate mismatch");
    const auto taps = rrc_taps(params);
    return {signal.with_samples(dsp::convolve(signal.view(), taps)), params.filter_delay()};
}

TimingResult recover_timing(const IQBuffer& signal, const ReceiverConfig& cfg, const ModemParams& params) {
    cfg.validate();
    params.validate();
    if (signal.size() < static_cast<std::size_t>(params.sps))
        throw std::invalid_argument("recover_timing: fewer samples than one symbol");
    const auto x = signal.view();
    const std::size_t limit = symbol_limit(cfg);
    const int sps = params.sps;
    const double d = params.filter_delay();
    TimingResult out;

    if (cfg.profile == ReceiverProfile::Baseline) {
        const auto& interp = dsp::interpolator();
        // Last matched-filter output that still fully overlaps the input.
        const double last = static_cast<double>(x.size()) - 1.0 - 2.0 * d;
        double start = cfg.known_offset_samples + d;
        if (cfg.sampling_offset_mode == SamplingOffsetMode::Estimated) {
            const double base = std::min(2.0 * d, std::max(0.0, last - sps));
            start = energy_phase_search([&](double t) { return interp.at(x, t); }, base, sps, last, 32);
        }
        out.first_position = start;
        for (double t = start; t <= last && out.symbols.size() < limit; t += sps) {
            out.symbols.push_back(interp.at(x, t));
            out.final_position = t;
        }
        out.error_trace.assign(out.symbols.size(), 0.0);
        return out;
    }

    const PolyphaseMatchedFilter bank(params, cfg.polyphase_branches);
    const double last = static_cast<double>(x.size()) - 1.0;
    double tau = cfg.known_offset_samples + d;
    if (cfg.sampling_offset_mode == SamplingOffsetMode::Estimated) {
        const double base = std::min(2.0 * d, std::max(0.0, last - sps));
        tau = energy_phase_search([&](double t) { return bank.at(x, t); }, base, sps, last,
                                  cfg.polyphase_branches);
    }
    out.first_position = tau;

    const double kd = gardner_gain(params.rolloff);
    const auto g = loop_gains(cfg.timing_loop_bw, cfg.timing_damping);
    double integ = 0.0;
    double power = 1.0;
    cplx prev{};
    while (tau <= last && tau >= 0.0 && out.symbols.size() < limit) {
        const cplx y = bank.at(x, tau);
        double err = 0.0;
        if (!out.symbols.empty()) {
            const cplx mid = bank.at(x, tau - 0.5 * sps);
            err = std::real(std::conj(mid) * (prev - y)) / (power * kd);
            err = std::clamp(err, -1.0, 1.0);
        }
        power += 0.01 * (std::norm(y) - power);
        power = std::max(power, 1e-12);
        out.symbols.push_back(y);
        out.error_trace.push_back(err);
        out.final_position = tau;
        prev = y;

        integ += g.k2 * err;
        tau += sps * (1.0 - (g.k1 * err + integ));
    }
    return out;
}

DpllResult dpll_cfo_correct(std::span<const cplx> symbols, const ReceiverConfig& cfg, double symbol_rate,
                            double initial_freq_hz) {
    if (!(cfg.dpll_loop_bw > 0.0)) throw std::invalid_argument("dpll_cfo_correct: loop bandwidth must be > 0");
    if (!(symbol_rate > 0.0)) throw std::invalid_argument("dpll_cfo_correct: symbol rate must be > 0");
    const auto g = loop_gains(cfg.dpll_loop_bw, cfg.dpll_damping);
    const double to_hz = symbol_rate / dsp::kTwoPi;

    DpllResult out;
    out.corrected.reserve(symbols.size());
    out.trace_hz.reserve(symbols.size());
    double phase = 0.0;
    double integ = initial_freq_hz / to_hz;
    for (const auto& s : symbols) {
        const cplx z = phase == 0.0 ? s : s * std::polar(1.0, -phase);
        const cplx dec = qpsk_decide(z);
        const double mag = std::abs(z);
        const double err = mag > 0.0 ? std::imag(z * std::conj(dec)) / (mag * std::abs(dec)) : 0.0;
        out.corrected.push_back(z);
        integ += g.k2 * err;
        phase = wrap_phase(phase + g.k1 * err + integ);
        out.trace_hz.push_back(integ * to_hz);
    }
    return out;
}

std::size_t convergence_index(std::span<const double> trace_hz, double target_hz, double tol_hz) {
    std::size_t idx = trace_hz.size();
    for (std::size_t i = trace_hz.size(); i-- > 0;) {
        if (std::abs(trace_hz[i] - target_hz) > tol_hz) break;
        idx = i;
    }
    return idx;
}

double coarse_cfo_estimate(std::span<const cplx> symbols, double symbol_rate) {
    if (symbols.size() < 2) return 0.0;
    cplx acc{};
    cplx prev = std::pow(symbols[0], 4);
    for (std::size_t k = 1; k < symbols.size(); ++k) {
        const cplx cur = std::pow(symbols[k], 4);
        acc += cur * std::conj(prev);
        prev = cur;
    }
    if (acc == cplx{}) return 0.0;
    return std::arg(acc) / 4.0 * symbol_rate / dsp::kTwoPi;
}

EqualizerResult equalize(std::span<const cplx> symbols, const ReceiverConfig& cfg) {
    if (cfg.eq_taps < 1 || cfg.eq_taps % 2 == 0) throw std::invalid_argument("equalize: eq_taps must be odd");
    if (!(cfg.eq_step > 0.0)) throw std::invalid_argument("equalize: step must be > 0");
    const auto ntaps = static_cast<std::size_t>(cfg.eq_taps);
    const auto c = ntaps / 2;
    const auto n = symbols.size();

    EqualizerResult out;
    out.taps.assign(ntaps, cplx{});
    out.taps[c] = 1.0;
    out.output.reserve(n);
    out.error_trace.reserve(n);
    auto& w = out.taps;
    std::vector<cplx> u(ntaps);
    double rss = 1.0;

    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < ntaps; ++i) {
            const auto idx = static_cast<long>(k + c) - static_cast<long>(i);
            u[i] = idx >= 0 && idx < static_cast<long>(n) ? symbols[static_cast<std::size_t>(idx)] : cplx{};
        }
        cplx y{};
        for (std::size_t i = 0; i < ntaps; ++i) y += w[i] * u[i];
        out.output.push_back(y);

        if (cfg.equalizer == EqualizerKind::CMA) {
            const double dev = std::norm(y) - 1.0;
            const cplx e = y * dev;
            for (std::size_t i = 0; i < ntaps; ++i) w[i] -= cfg.eq_step * e * std::conj(u[i]);
            out.error_trace.push_back(dev * dev);
        } else {
            rss += 0.01 * (std::norm(symbols[k]) - rss);
            const double step = cfg.eq_step / std::max(rss, 1e-6);
            const cplx e = qpsk_decide(y) - y;
            for (std::size_t i = 0; i < ntaps; ++i) w[i] += step * e * std::conj(u[i]);
            out.error_trace.push_back(std::norm(e));
        }
    }
    return out;
}

BerAlignment align_and_count(std::span<const cplx> symbols, const Payload& truth_frame, std::size_t skip_symbols,
                             bool per_frame_rotation) {
    if (truth_frame.empty() || truth_frame.length_bits() % 2 != 0)
        throw std::invalid_argument("align_and_count: truth frame must hold an even, non-zero bit count");
    const std::size_t len = truth_frame.length_bits() / 2;
    std::vector<int> truth(len);
    for (std::size_t s = 0; s < len; ++s) truth[s] = truth_frame[2 * s] * 2 + truth_frame[2 * s + 1];

    BerAlignment best;
    best.bit_errors = std::numeric_limits<std::size_t>::max();
    if (skip_symbols >= symbols.size()) {
        best.bit_errors = 0;
        return best;
    }
    const std::size_t count = symbols.size() - skip_symbols;

    for (int r = 0; r < 4; ++r) {
        // hist[c][v]: symbols at stream position = c (mod len) decided as v.
        std::vector<std::array<std::size_t, 4>> hist(len, {0, 0, 0, 0});
        for (std::size_t k = 0; k < count; ++k) {
            const cplx z = quarter_turns(symbols[skip_symbols + k], r);
            const int b0 = z.imag() < 0.0 ? 1 : 0;
            const int b1 = z.real() < 0.0 ? 1 : 0;
            ++hist[k % len][static_cast<std::size_t>(b0 * 2 + b1)];
        }
        for (std::size_t o = 0; o < len; ++o) {
            std::size_t errors = 0;
            for (std::size_t c = 0; c < len; ++c) {
                const int t = truth[(c + o) % len];
                for (int v = 0; v < 4; ++v) errors += hist[c][static_cast<std::size_t>(v)] *
                                                      static_cast<std::size_t>(std::popcount(static_cast<unsigned>(v ^ t)));
            }
            if (errors < best.bit_errors) {
                best.bit_errors = errors;
                best.symbol_offset = o;
                best.rotation = r;
            }
        }
    }
    if (per_frame_rotation) {
        std::size_t errors = 0;
        for (std::size_t b = 0; b < count; b += len) {
            std::size_t best_block = std::numeric_limits<std::size_t>::max();
            for (int r = 0; r < 4; ++r) {
                std::size_t e = 0;
                for (std::size_t k = b; k < std::min(count, b + len); ++k) {
                    const cplx z = quarter_turns(symbols[skip_symbols + k], r);
                    const int v = (z.imag() < 0.0 ? 2 : 0) + (z.real() < 0.0 ? 1 : 0);
                    e += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(v ^ truth[(k + best.symbol_offset) % len])));
                }
                best_block = std::min(best_block, e);
            }
            errors += best_block;
        }
        best.bit_errors = errors;
    }
    best.bits_compared = 2 * count;
    best.ber = static_cast<double>(best.bit_errors) / static_cast<double>(best.bits_compared);
    return best;
}

ReceiveResult receive(const IQBuffer& signal, const ReceiverConfig& cfg, const ModemParams& params,
                      const std::optional<Payload>& truth) {
    cfg.validate();
    params.validate();
    if (signal.empty()) throw std::invalid_argument("receive: empty signal");

    ReceiveResult res;
    auto& diag = res.diagnostics;

    const auto x = scaled_to_power(signal.view(), 1.0 / params.sps);
    const IQBuffer input = signal.with_samples(x);
    const auto mf = matched_filter(input, params);

    const double hint = cfg.sampling_offset_mode == SamplingOffsetMode::Known
                            ? cfg.known_offset_samples + params.filter_delay()
                            : -1.0;
    const auto pilot = pilot_symbols(mf.signal.view(), params, cfg.phase_search_window, hint);
    const auto search = score_branches(pilot, cfg.n_phase_branches);
    diag.selected_phase_branch = search.branch;
    diag.phase_search_score = search.score;

    TimingResult timing;
    if (cfg.profile == ReceiverProfile::Baseline) {
        timing = recover_timing(mf.signal.with_samples(rotated(mf.signal.view(), search.branch, cfg.n_phase_branches)),
                                cfg, params);
    } else {
        timing = recover_timing(input.with_samples(rotated(x, search.branch, cfg.n_phase_branches)), cfg, params);
    }
    if (timing.symbols.empty()) throw std::runtime_error("receive: no symbols recovered");
    diag.timing_error_trace = std::move(timing.error_trace);

    auto stream = scaled_to_power(timing.symbols, 1.0);
    if (cfg.equalizer == EqualizerKind::CMA) {
        auto eq = equalize(stream, cfg);
        stream = std::move(eq.output);
        diag.eq_error_trace = std::move(eq.error_trace);
    }

    if (cfg.coarse_cfo) {
        const auto n = std::min(stream.size(), static_cast<std::size_t>(cfg.cfo_acquisition_symbols));
        diag.coarse_cfo_hz = coarse_cfo_estimate(std::span<const cplx>(stream.data(), n), params.symbol_rate());
    }
    auto pll = dpll_cfo_correct(stream, cfg, params.symbol_rate(), diag.coarse_cfo_hz);
    stream = std::move(pll.corrected);
    diag.cfo_estimate_trace = std::move(pll.trace_hz);

    if (cfg.equalizer == EqualizerKind::DDLMS) {
        auto eq = equalize(stream, cfg);
        stream = std::move(eq.output);
        diag.eq_error_trace = std::move(eq.error_trace);
    }

    const std::size_t tail = std::min<std::size_t>(512, std::max<std::size_t>(stream.size() / 4, 1));
    double err = 0.0;
    for (std::size_t k = stream.size() - tail; k < stream.size(); ++k) err += std::norm(stream[k] - qpsk_decide(stream[k]));
    diag.final_decision_error = err / static_cast<double>(tail);
    diag.lock_flag = diag.final_decision_error < cfg.lock_threshold;

    res.bits = qpsk_demodulate(stream);
    if (truth) {
        const std::size_t skip = std::min(cfg.warmup_symbols, stream.size() / 2);
        res.alignment = align_and_count(stream, *truth, skip, cfg.per_frame_rotation);
    }
    res.symbols = std::move(stream);
    return res;
}

}  // namespace skyreplay

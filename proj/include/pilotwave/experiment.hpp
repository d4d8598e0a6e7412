#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "pilotwave/channel.hpp"
#include "pilotwave/metrics.hpp"
#include "pilotwave/prbs.hpp"
#include "pilotwave/rx.hpp"
#include "pilotwave/signal.hpp"
#include "pilotwave/tx.hpp"

namespace pilotwave {

/// One complete experiment description: everything needed to reproduce a
/// BER curve or an eye capture deterministically.
struct Scenario {
    std::string label;
    ModulationFormat format = ModulationFormat::NRZ;
    TxConfig tx;
    MzmConfig mzm = MzmConfig::quadrature();
    PilotToneConfig pilot;
    double pilot_amplitude = 0.0;  // calibrated; dimensionless (multiplicative)
                                   // or volts (bias injection)
    FiberConfig fiber;
    ReceiverConfig rx;
    std::size_t n_bits = 2'000'000;
    int prbs_order = 15;
    uint64_t master_seed = 1;
    std::vector<double> sweep_powers_dbm;
    // Cutoff of the instrumentation lowpass used by depth measurement;
    // tracks pt_highpass_cutoff in scaled-frequency presets.
    double measurement_cutoff = 280e3;

    int n_levels() const { return levels_of(format); }
    int sps() const { return tx.sps(format); }

    void validate() const {
        if (n_bits < 1000) throw std::invalid_argument("scenario: n_bits too small");
        if (format == ModulationFormat::PAM4 && n_bits % 2 != 0)
            throw std::invalid_argument("scenario: PAM4 needs an even bit count");
        if (pilot.enabled) {
            const double min_bits = 2.0 * tx.bit_rate / pilot.frequency;
            if (static_cast<double>(n_bits) < min_bits)
                throw std::invalid_argument(
                    "scenario: capture must span >= 2 pilot periods (need >= " +
                    std::to_string(static_cast<std::size_t>(std::ceil(min_bits))) +
                    " bits)");
        }
    }
};

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t master, uint64_t index, uint64_t stream) {
    return splitmix64(splitmix64(master ^ (index * 0x9e3779b97f4a7c15ULL)) ^ stream);
}

inline uint64_t derive_prbs_seed(uint64_t master, uint64_t index, int order) {
    const uint64_t mask = (uint64_t{1} << order) - 1;
    uint64_t s = derive_seed(master, index, 0xA5) & mask;
    return s == 0 ? 1 : s;
}

}  // namespace detail

struct TxCapture {
    BitSeq bits;
    SymbolSeq symbols;    // line symbols the slicer must recover
    RealWaveform drive;   // pilot-free reference for synchronization
    ComplexEnvelope env;  // modulated optical field, pilot applied
};

/// Bits through drive generation, pilot injection and the modulator.
inline TxCapture transmit(const Scenario& sc, uint64_t prbs_seed) {
    TxCapture out;
    out.bits = prbs_generate(sc.prbs_order, prbs_seed, sc.n_bits);
    out.symbols = line_symbols(out.bits, sc.format);
    out.drive = build_drive(out.bits, sc.format, sc.tx);

    const bool bias_pilot = sc.pilot.enabled &&
                            sc.pilot.injection == PilotInjection::MzmBias &&
                            sc.pilot_amplitude != 0.0;
    if (bias_pilot) {
        out.env = mzm_modulate(add_bias_pilot(out.drive, sc.pilot, sc.pilot_amplitude),
                               sc.mzm);
    } else {
        out.env = mzm_modulate(out.drive, sc.mzm);
        if (sc.pilot.enabled && sc.pilot.injection == PilotInjection::Multiplicative)
            out.env = apply_pilot(out.env, sc.pilot, sc.pilot_amplitude);
    }
    return out;
}

/// Mean received power with the VOA wide open, dBm (noise-free quantity used
/// to solve VOA attenuation for a target power).
inline double max_received_power_dbm(const Scenario& sc, uint64_t prbs_seed) {
    const TxCapture txc = transmit(sc, prbs_seed);
    return average_power_dbm(fiber_propagate(txc.env, sc.fiber));
}

struct CaptureResult {
    BerPoint point;
    SyncResult sync;
    RealWaveform filtered;  // kept only when requested (eye diagrams)
    SymbolSeq line_syms;    // truncated to the decided span
};

/// One end-to-end capture at a target received power. Sync failure and
/// unreachable power targets are reported in the BerPoint, not thrown.
inline CaptureResult run_capture(const Scenario& sc, double target_power_dbm,
                                 std::size_t point_index,
                                 bool keep_waveform = false) {
    CaptureResult res;
    res.point.received_power_dbm = target_power_dbm;
    res.point.failed = true;

    const uint64_t prbs_seed =
        detail::derive_prbs_seed(sc.master_seed, point_index, sc.prbs_order);
    TxCapture txc = transmit(sc, prbs_seed);
    ComplexEnvelope env = fiber_propagate(std::move(txc.env), sc.fiber);
    txc.env.samples.clear();

    const double available_dbm = average_power_dbm(env);
    const double atten_db = available_dbm - target_power_dbm;
    if (atten_db < 0.0) return res;  // target above what the link delivers
    env = voa_attenuate(env, atten_db);

    ReceiverConfig rx_cfg = sc.rx;
    rx_cfg.rng_seed = detail::derive_seed(sc.master_seed, point_index, 0xC3);
    RealWaveform current = photodetect(env, rx_cfg);
    env.samples.clear();
    env.samples.shrink_to_fit();

    // The offline DSP chain is fixed: the pilot-removal highpass runs whether
    // or not a tone is present, so paired on/off captures differ only in the
    // tone itself.
    RealWaveform filtered = rx_filter(current, rx_cfg, /*remove_pilot=*/true);
    current.samples.clear();
    current.samples.shrink_to_fit();

    SyncResult sync;
    try {
        sync = synchronize(filtered, txc.drive, sc.sps(), txc.symbols, sc.n_levels());
    } catch (const SyncError&) {
        return res;
    }

    const std::size_t n_use = sync.aligned_symbol_samples.size();
    const std::size_t settle =
        rx_settle_samples(rx_cfg, filtered.sample_rate, true);
    const std::size_t discard_syms = std::min(
        n_use / 2, settle / static_cast<std::size_t>(sc.sps()) + 8);

    std::vector<double> train_samples(sync.aligned_symbol_samples.begin() +
                                          static_cast<std::ptrdiff_t>(discard_syms),
                                      sync.aligned_symbol_samples.end());
    SymbolSeq train_syms(txc.symbols.begin() + static_cast<std::ptrdiff_t>(discard_syms),
                         txc.symbols.begin() + static_cast<std::ptrdiff_t>(n_use));
    const auto thresholds =
        estimate_thresholds(train_samples, train_syms, sc.n_levels());

    const SymbolSeq decided = decide(sync.aligned_symbol_samples, thresholds);
    BitSeq rx_bits;
    switch (sc.format) {
        case ModulationFormat::NRZ:
            rx_bits.assign(decided.begin(), decided.end());
            break;
        case ModulationFormat::PAM4:
            rx_bits = gray_decode_pam4(decided);
            break;
        case ModulationFormat::Duobinary:
            rx_bits = duobinary_decode(decided);
            break;
    }

    const std::size_t bps = static_cast<std::size_t>(bits_per_symbol(sc.format));
    BitSeq tx_bits(txc.bits.begin(),
                   txc.bits.begin() + static_cast<std::ptrdiff_t>(n_use * bps));
    const BerCount count = count_ber(tx_bits, rx_bits, discard_syms * bps);

    res.point.failed = false;
    res.point.errors = count.errors;
    res.point.total_bits = count.total;
    res.point.low_confidence = count.low_confidence;
    // Zero-error points are floored at 1/total and never interpolated through.
    res.point.ber = count.errors > 0
                        ? count.ber
                        : 1.0 / static_cast<double>(count.total);
    res.sync = sync;
    if (keep_waveform) {
        res.filtered = std::move(filtered);
        res.line_syms.assign(txc.symbols.begin(),
                             txc.symbols.begin() + static_cast<std::ptrdiff_t>(n_use));
    }
    return res;
}

/// Back-to-back depth measurement for a candidate pilot amplitude, run over
/// a dedicated short-pattern capture. A long PRBS repeats slowly enough that
/// its discrete spectral lines (spacing symbol_rate / pattern_length) land
/// inside the measurement lowpass and bias the max/min; PRBS7 puts the first
/// line near 100 MHz, and cutting the trace to whole pattern periods makes
/// the spectral mask remove every data line exactly, leaving only the tone.
inline double measure_pilot_depth(const Scenario& sc, double amplitude) {
    Scenario meas = sc;
    meas.pilot.enabled = true;
    meas.pilot_amplitude = amplitude;
    meas.fiber.length_km = 0.0;
    meas.prbs_order = 7;
    const auto bps = static_cast<std::size_t>(bits_per_symbol(meas.format));
    const double pattern_sec = 127.0 / meas.tx.symbol_rate(meas.format);
    const double span_sec = 4.5 / meas.pilot.frequency;
    const auto n_patterns =
        static_cast<std::size_t>(std::ceil(span_sec / pattern_sec));
    meas.n_bits = n_patterns * 127 * bps;

    const uint64_t prbs_seed =
        detail::derive_prbs_seed(meas.master_seed, 0xCA11B, meas.prbs_order);
    const TxCapture txc = transmit(meas, prbs_seed);
    RealWaveform power;
    power.sample_rate = txc.env.sample_rate;
    power.samples.resize(txc.env.samples.size());
    for (std::size_t i = 0; i < power.samples.size(); ++i)
        power.samples[i] = std::norm(txc.env.samples[i]);
    return measure_mod_depth(power, meas.pilot.frequency, meas.measurement_cutoff)
        .depth_pct;
}

/// Secant search for the pilot amplitude whose measured back-to-back depth
/// (full transmit chain, Eq.-5-style measurement on the optical power trace)
/// matches the target within 0.1 percentage points.
inline double calibrate_pilot_depth(const Scenario& sc, double target_depth_pct,
                                    int max_iterations = 10) {
    if (target_depth_pct == 0.0) return 0.0;
    if (target_depth_pct < 0.0 || target_depth_pct > 50.0)
        throw std::invalid_argument("calibrate_pilot_depth: target outside (0, 50]");

    auto depth_of = [&](double a) { return measure_pilot_depth(sc, a); };

    const bool bias_mode = sc.pilot.injection == PilotInjection::MzmBias;
    const double a_cap = bias_mode ? 0.9 * sc.mzm.v_pi : 0.99;
    double a0 = bias_mode ? 0.03 * sc.mzm.v_pi * target_depth_pct / 8.0
                          : 0.8 * target_depth_pct / 100.0;
    double a1 = bias_mode ? 0.05 * sc.mzm.v_pi * target_depth_pct / 8.0
                          : 1.1 * target_depth_pct / 100.0;
    a0 = std::clamp(a0, 1e-6, a_cap);
    a1 = std::clamp(a1, 2e-6, a_cap);
    if (a1 == a0) a1 = a0 * 1.5;

    double f0 = depth_of(a0) - target_depth_pct;
    if (std::abs(f0) <= 0.1) return a0;
    double f1 = depth_of(a1) - target_depth_pct;
    for (int it = 0; it < max_iterations; ++it) {
        if (std::abs(f1) <= 0.1) return a1;
        const double df = f1 - f0;
        if (df == 0.0) break;
        double a2 = a1 - f1 * (a1 - a0) / df;
        a2 = std::clamp(a2, 1e-6, a_cap);
        a0 = a1; f0 = f1;
        a1 = a2; f1 = depth_of(a1) - target_depth_pct;
    }
    if (std::abs(f1) <= 0.1) return a1;
    throw std::runtime_error(
        "calibrate_pilot_depth: no convergence to ±0.1 pt within " +
        std::to_string(max_iterations) + " iterations (residual " +
        std::to_string(f1) + " pt)");
}

/// Full BER-vs-power sweep. Points are independent jobs (each derives its own
/// PRBS and noise seeds from (master_seed, point index)) and the result is
/// sorted by power regardless of completion order.
inline BerCurve run_ber_sweep(const Scenario& sc, int jobs = 1) {
    sc.validate();
    std::vector<double> powers = sc.sweep_powers_dbm;
    std::sort(powers.begin(), powers.end());

    BerCurve curve;
    curve.label = sc.label;
    curve.points.resize(powers.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= powers.size()) return;
            curve.points[i] = run_capture(sc, powers[i], i).point;
        }
    };
    if (jobs <= 1 || powers.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int n_threads = std::min<int>(jobs, static_cast<int>(powers.size()));
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return curve;
}

}  // namespace pilotwave

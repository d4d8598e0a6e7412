#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "pilotwave/fft.hpp"
#include "pilotwave/filter.hpp"
#include "pilotwave/signal.hpp"

namespace pilotwave {

struct ReceiverConfig {
    double responsivity = 0.8;              // A/W
    double thermal_noise_density = 3.1e-10; // A/sqrt(Hz); 0 disables
    bool shot_noise = true;
    double bandwidth = 28e9;                // receiver lowpass, Hz
    double pt_highpass_cutoff = 280e3;      // pilot-removal highpass, Hz
    uint64_t rng_seed = 1;
};

struct SyncResult {
    std::ptrdiff_t lag = 0;  // samples, receiver relative to reference
    int phase = 0;           // decision offset within a symbol, 0 <= phase < sps
    std::vector<double> aligned_symbol_samples;  // one decision sample/symbol
};

struct SyncError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Square-law detection: i(t) = R*|E|^2 plus white thermal noise and
/// signal-dependent shot noise, both at the simulation bandwidth fs/2.
inline RealWaveform photodetect(const ComplexEnvelope& env, const ReceiverConfig& rx) {
    RealWaveform out;
    out.sample_rate = env.sample_rate;
    out.samples.resize(env.samples.size());
    const double half_rate = env.sample_rate / 2.0;
    const double thermal_sigma =
        rx.thermal_noise_density * std::sqrt(half_rate);
    constexpr double q_e = 1.602176634e-19;
    const bool any_noise = thermal_sigma > 0.0 || rx.shot_noise;

    std::mt19937_64 rng(rx.rng_seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < env.samples.size(); ++i) {
        const double p = std::norm(env.samples[i]);
        double current = rx.responsivity * p;
        if (any_noise) {
            if (thermal_sigma > 0.0) current += thermal_sigma * unit(rng);
            if (rx.shot_noise) {
                const double var = 2.0 * q_e * rx.responsivity * p * half_rate;
                current += std::sqrt(var) * unit(rng);
            }
        }
        out.samples[i] = current;
    }
    return out;
}

/// Receiver filtering: 4th-order Bessel lowpass at the front-end bandwidth;
/// optionally the pilot-removal Butterworth highpass. The trace's DC value is
/// re-added after the highpass — decision thresholds work on absolute levels,
/// AC coupling is absorbed here instead of in threshold estimation.
inline RealWaveform rx_filter(const RealWaveform& signal, const ReceiverConfig& rx,
                              bool remove_pilot) {
    RealWaveform out = signal;
    if (rx.bandwidth < signal.sample_rate / 2.0) {
        const auto lp = design_filter(FilterKind::BesselLowpass, 4, rx.bandwidth,
                                      signal.sample_rate);
        out = apply_filter(lp, out);
    }
    if (remove_pilot) {
        const auto hp = design_filter(FilterKind::ButterworthHighpass, 2,
                                      rx.pt_highpass_cutoff, signal.sample_rate);
        const double dc = mean(out.samples);
        out = apply_filter(hp, out);
        for (auto& x : out.samples) x += dc;
    }
    return out;
}

/// Largest number of samples any receiver filter needs to settle.
inline std::size_t rx_settle_samples(const ReceiverConfig& rx, double sample_rate,
                                     bool remove_pilot) {
    std::size_t n = 0;
    if (rx.bandwidth < sample_rate / 2.0)
        n = design_filter(FilterKind::BesselLowpass, 4, rx.bandwidth, sample_rate)
                .settle_samples();
    if (remove_pilot)
        n = std::max(n, design_filter(FilterKind::ButterworthHighpass, 2,
                                      rx.pt_highpass_cutoff, sample_rate)
                            .settle_samples());
    return n;
}

namespace detail {

/// Circular cross-correlation argmax via FFT, both inputs mean-removed.
/// Returns (lag, normalized peak in [0,1]).
inline std::pair<std::size_t, double> correlate_lag(const std::vector<double>& x,
                                                    const std::vector<double>& y) {
    const std::size_t n = std::min(x.size(), y.size());
    std::vector<std::complex<double>> fx(n), fy(n);
    const double mx = mean(x), my = mean(y);
    double ex = 0.0, ey = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        fx[i] = x[i] - mx;
        fy[i] = y[i] - my;
        ex += std::norm(fx[i]);
        ey += std::norm(fy[i]);
    }
    fft::forward(fx);
    fft::forward(fy);
    for (std::size_t i = 0; i < n; ++i) fx[i] *= std::conj(fy[i]);
    fft::inverse_normalized(fx);
    std::size_t best = 0;
    double best_v = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = fx[i].real();
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    const double denom = std::sqrt(ex * ey);
    return {best, denom > 0.0 ? best_v / denom : 0.0};
}

}  // namespace detail

/// Align the received waveform to the transmitted pattern. A coarse lag comes
/// from the normalized cross-correlation peak; the decision instant within the
/// symbol is then chosen to maximize the worst-case separation between
/// adjacent level classes of the known training symbols (this also absorbs
/// shaping/receiver group delay beyond one symbol).
inline SyncResult synchronize(const RealWaveform& rx, const RealWaveform& reference,
                              int sps, const SymbolSeq& training_symbols,
                              int n_levels) {
    if (sps < 2) throw std::invalid_argument("synchronize: sps must be >= 2");
    auto [lag0, peak] = detail::correlate_lag(rx.samples, reference.samples);
    if (peak < 0.2)
        throw SyncError("synchronize: correlation peak " + std::to_string(peak) +
                        " below 0.2 — signals inconsistent");

    const std::size_t n = rx.samples.size();
    const std::size_t n_sym = training_symbols.size();
    // Skip early symbols so filter transients do not bias the gap statistic.
    const std::size_t train_skip = std::min<std::size_t>(n_sym / 4, 4096);

    double best_metric = -1.0;
    int best_delta = 0;
    for (int delta = 0; delta < 2 * sps; ++delta) {
        std::vector<double> sum(static_cast<std::size_t>(n_levels), 0.0);
        std::vector<double> sum2(static_cast<std::size_t>(n_levels), 0.0);
        std::vector<std::size_t> cnt(static_cast<std::size_t>(n_levels), 0);
        for (std::size_t k = train_skip; k < n_sym; ++k) {
            const std::size_t idx =
                lag0 + static_cast<std::size_t>(delta) + k * static_cast<std::size_t>(sps);
            if (idx >= n) break;
            const int cls = training_symbols[k];
            if (cls < 0 || cls >= n_levels) continue;
            const double v = rx.samples[idx];
            sum[static_cast<std::size_t>(cls)] += v;
            sum2[static_cast<std::size_t>(cls)] += v * v;
            ++cnt[static_cast<std::size_t>(cls)];
        }
        bool complete = true;
        std::vector<double> mu(static_cast<std::size_t>(n_levels)),
            sd(static_cast<std::size_t>(n_levels));
        for (int c = 0; c < n_levels; ++c) {
            const auto uc = static_cast<std::size_t>(c);
            if (cnt[uc] < 2) {
                complete = false;
                break;
            }
            mu[uc] = sum[uc] / static_cast<double>(cnt[uc]);
            const double var =
                std::max(0.0, sum2[uc] / static_cast<double>(cnt[uc]) - mu[uc] * mu[uc]);
            sd[uc] = std::sqrt(var);
        }
        if (!complete) continue;
        double metric = std::numeric_limits<double>::infinity();
        for (int c = 0; c + 1 < n_levels; ++c) {
            const auto uc = static_cast<std::size_t>(c);
            const double gap = mu[uc + 1] - mu[uc];
            metric = std::min(metric, gap / (sd[uc] + sd[uc + 1] + 1e-30));
        }
        if (metric > best_metric) {
            best_metric = metric;
            best_delta = delta;
        }
    }
    if (best_metric <= 0.0)
        throw SyncError("synchronize: no sampling phase separates the levels");

    SyncResult res;
    res.phase = best_delta % sps;
    res.lag = static_cast<std::ptrdiff_t>(lag0) + sps * (best_delta / sps);
    res.aligned_symbol_samples.reserve(n_sym);
    for (std::size_t k = 0; k < n_sym; ++k) {
        const std::size_t idx = static_cast<std::size_t>(res.lag) +
                                static_cast<std::size_t>(res.phase) +
                                k * static_cast<std::size_t>(sps);
        if (idx >= n) break;
        res.aligned_symbol_samples.push_back(rx.samples[idx]);
    }
    return res;
}

/// Data-aided decision levels: per-class means of training samples, then
/// midpoints of adjacent means.
inline std::vector<double> estimate_thresholds(const std::vector<double>& samples,
                                               const SymbolSeq& symbols,
                                               int n_levels) {
    const std::size_t n = std::min(samples.size(), symbols.size());
    std::vector<double> sum(static_cast<std::size_t>(n_levels), 0.0);
    std::vector<std::size_t> cnt(static_cast<std::size_t>(n_levels), 0);
    for (std::size_t i = 0; i < n; ++i) {
        const int c = symbols[i];
        if (c < 0 || c >= n_levels)
            throw std::invalid_argument("estimate_thresholds: symbol out of range");
        sum[static_cast<std::size_t>(c)] += samples[i];
        ++cnt[static_cast<std::size_t>(c)];
    }
    std::vector<double> means(static_cast<std::size_t>(n_levels));
    for (int c = 0; c < n_levels; ++c) {
        const auto uc = static_cast<std::size_t>(c);
        if (cnt[uc] == 0)
            throw std::invalid_argument("estimate_thresholds: empty level class " +
                                        std::to_string(c));
        means[uc] = sum[uc] / static_cast<double>(cnt[uc]);
    }
    std::vector<double> thr(static_cast<std::size_t>(n_levels - 1));
    for (int c = 0; c + 1 < n_levels; ++c)
        thr[static_cast<std::size_t>(c)] =
            0.5 * (means[static_cast<std::size_t>(c)] + means[static_cast<std::size_t>(c) + 1]);
    std::sort(thr.begin(), thr.end());
    return thr;
}

/// Slice: symbol = number of thresholds at or below the sample (a sample
/// exactly on a threshold goes to the upper symbol).
inline SymbolSeq decide(const std::vector<double>& samples,
                        const std::vector<double>& thresholds) {
    SymbolSeq out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        int s = 0;
        for (double t : thresholds)
            if (samples[i] >= t) ++s;
        out[i] = s;
    }
    return out;
}

/// Duobinary demapping: bit = 3-level symbol mod 2.
inline BitSeq duobinary_decode(const SymbolSeq& symbols3) {
    BitSeq out(symbols3.size());
    for (std::size_t i = 0; i < symbols3.size(); ++i) {
        const int s = symbols3[i];
        if (s < 0 || s > 2)
            throw std::invalid_argument("duobinary_decode: symbol out of range");
        out[i] = static_cast<uint8_t>(s % 2);
    }
    return out;
}

struct BerCount {
    std::size_t errors = 0;
    std::size_t total = 0;
    double ber = 0.0;
    bool low_confidence = true;  // fewer than 100 errors counted
};

inline BerCount count_ber(const BitSeq& tx, const BitSeq& rx, std::size_t discard_head) {
    if (tx.size() != rx.size())
        throw std::invalid_argument("count_ber: length mismatch");
    if (discard_head >= tx.size())
        throw std::invalid_argument("count_ber: nothing left after head discard");
    BerCount c;
    c.total = tx.size() - discard_head;
    for (std::size_t i = discard_head; i < tx.size(); ++i)
        c.errors += tx[i] != rx[i];
    c.ber = static_cast<double>(c.errors) / static_cast<double>(c.total);
    c.low_confidence = c.errors < 100;
    return c;
}

}  // namespace pilotwave

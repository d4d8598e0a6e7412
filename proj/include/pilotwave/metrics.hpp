#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pilotwave/filter.hpp"
#include "pilotwave/rx.hpp"
#include "pilotwave/signal.hpp"

namespace pilotwave {

struct DepthMeasurement {
    double p_max = 0.0;
    double p_min = 0.0;
    double depth_pct = 0.0;  // (p_max - p_min)/(p_max + p_min) * 100
};

/// Modulation depth of a power trace: lowpass the trace at the measurement
/// cutoff (ideal mask — this is instrumentation, not channel shaping), drop
/// one pilot period of transient, then take the max/min ratio.
inline DepthMeasurement measure_mod_depth(const RealWaveform& power_trace,
                                          double pilot_frequency,
                                          double measurement_cutoff = 280e3) {
    if (power_trace.sample_rate < 10.0 * measurement_cutoff)
        throw std::invalid_argument(
            "measure_mod_depth: sample rate below 10x the measurement cutoff");
    const double period_samples = power_trace.sample_rate / pilot_frequency;
    const auto period = static_cast<std::size_t>(std::ceil(period_samples));
    if (power_trace.samples.size() < 2 * period)
        throw std::invalid_argument(
            "measure_mod_depth: trace shorter than two pilot periods");

    const auto lp = design_filter(FilterKind::BrickwallLowpass, 1,
                                  measurement_cutoff, power_trace.sample_rate);
    const RealWaveform filtered = apply_filter(lp, power_trace);

    // One pilot period of transient discarded; when the trace allows, split
    // it across both ends (the spectral mask rings at both edges).
    std::size_t head = period, tail = 0;
    if (filtered.samples.size() >= 3 * period) {
        tail = period;
        head = period;
    }
    double p_max = -std::numeric_limits<double>::infinity();
    double p_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = head; i < filtered.samples.size() - tail; ++i) {
        p_max = std::max(p_max, filtered.samples[i]);
        p_min = std::min(p_min, filtered.samples[i]);
    }
    DepthMeasurement m;
    m.p_max = p_max;
    m.p_min = p_min;
    const double denom = p_max + p_min;
    m.depth_pct = denom != 0.0 ? (p_max - p_min) / denom * 100.0 : 0.0;
    return m;
}

struct EyeHistogram {
    std::vector<std::vector<std::size_t>> grid;  // [amplitude_bin][time_bin]
    double ui = 0.0;                             // symbol duration, seconds
    double amp_min = 0.0;
    double amp_max = 0.0;
    std::size_t total = 0;

    std::size_t rows() const { return grid.size(); }
    std::size_t cols() const { return grid.empty() ? 0 : grid.front().size(); }
};

/// 2D histogram of the waveform folded modulo 2 UI, aligned so the decision
/// instant sits at the column for t = 0.5 UI.
inline EyeHistogram eye_histogram(const RealWaveform& signal, double symbol_rate,
                                  const SyncResult& sync, std::size_t bins = 64) {
    if (bins < 32) throw std::invalid_argument("eye_histogram: bins must be >= 32");
    const double sps_f = signal.sample_rate / symbol_rate;
    const auto sps = static_cast<std::ptrdiff_t>(std::llround(sps_f));
    const std::ptrdiff_t fold = 2 * sps;

    // Start past the fold origin and any negative-index region.
    std::ptrdiff_t origin = sync.lag + sync.phase - sps / 2;
    while (origin < 0) origin += fold;

    double amp_min = std::numeric_limits<double>::infinity();
    double amp_max = -std::numeric_limits<double>::infinity();
    const auto n = static_cast<std::ptrdiff_t>(signal.samples.size());
    for (std::ptrdiff_t i = origin; i < n; ++i) {
        amp_min = std::min(amp_min, signal.samples[static_cast<std::size_t>(i)]);
        amp_max = std::max(amp_max, signal.samples[static_cast<std::size_t>(i)]);
    }
    if (!(amp_max > amp_min)) amp_max = amp_min + 1.0;

    EyeHistogram h;
    h.ui = 1.0 / symbol_rate;
    h.amp_min = amp_min;
    h.amp_max = amp_max;
    h.grid.assign(bins, std::vector<std::size_t>(static_cast<std::size_t>(fold), 0));
    const double scale = static_cast<double>(bins) / (amp_max - amp_min);
    for (std::ptrdiff_t i = origin; i < n; ++i) {
        const auto col = static_cast<std::size_t>((i - origin) % fold);
        auto row = static_cast<std::size_t>(
            (signal.samples[static_cast<std::size_t>(i)] - amp_min) * scale);
        if (row >= bins) row = bins - 1;
        ++h.grid[row][col];
        ++h.total;
    }
    return h;
}

struct BerPoint {
    double received_power_dbm = 0.0;
    std::size_t errors = 0;
    std::size_t total_bits = 0;
    double ber = 0.0;
    bool low_confidence = true;
    bool failed = false;  // sync loss or unreachable power target
};

struct BerCurve {
    std::string label;
    std::vector<BerPoint> points;  // sorted by power
};

struct UnbracketableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Received power (dBm) where the curve crosses the target -log10(BER),
/// linear interpolation between the adjacent measured points. Zero-error and
/// failed points carry no BER information and are excluded.
inline double power_at_neglog_ber(const BerCurve& curve, double target) {
    std::vector<std::pair<double, double>> pts;  // (power, -log10 ber)
    for (const auto& p : curve.points)
        if (!p.failed && p.errors > 0)
            pts.emplace_back(p.received_power_dbm, -std::log10(p.ber));
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto [p0, y0] = pts[i];
        const auto [p1, y1] = pts[i + 1];
        if ((y0 <= target && target <= y1) || (y1 <= target && target <= y0)) {
            if (y1 == y0) return p0;
            return p0 + (target - y0) * (p1 - p0) / (y1 - y0);
        }
    }
    throw UnbracketableError("penalty_at: curve '" + curve.label +
                             "' does not bracket -log10(BER) = " +
                             std::to_string(target));
}

}  // namespace detail

/// Extra received power the pilot curve needs to reach the same BER as the
/// reference; positive means the pilot costs power.
inline double penalty_at(const BerCurve& curve_ref, const BerCurve& curve_pt,
                         double target_neglog_ber) {
    const double p_ref = detail::power_at_neglog_ber(curve_ref, target_neglog_ber);
    const double p_pt = detail::power_at_neglog_ber(curve_pt, target_neglog_ber);
    return p_pt - p_ref;
}

}  // namespace pilotwave

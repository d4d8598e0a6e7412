#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "pilotwave/fft.hpp"
#include "pilotwave/signal.hpp"

namespace pilotwave {

enum class FilterKind { BesselLowpass, ButterworthHighpass, BrickwallLowpass };

/// One direct-form-II-transposed second-order section. First-order
/// sections are stored with b2 = a2 = 0.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

namespace detail {

using cplx = std::complex<double>;

/// Roots of a real polynomial (ascending coefficients) by Durand-Kerner.
/// Adequate for the low-order, well-conditioned Bessel polynomials used here.
inline std::vector<cplx> polynomial_roots(const std::vector<double>& coeffs) {
    const int n = static_cast<int>(coeffs.size()) - 1;
    std::vector<cplx> c(coeffs.begin(), coeffs.end());
    const cplx lead = c[n];
    for (auto& x : c) x /= lead;
    std::vector<cplx> roots(n);
    cplx seed(0.4, 0.9);
    cplx p = 1.0;
    for (int i = 0; i < n; ++i) {
        p *= seed;
        roots[i] = p;
    }
    auto eval = [&](cplx z) {
        cplx acc = c[n];
        for (int i = n - 1; i >= 0; --i) acc = acc * z + c[i];
        return acc;
    };
    for (int iter = 0; iter < 500; ++iter) {
        double moved = 0.0;
        for (int i = 0; i < n; ++i) {
            cplx denom = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != i) denom *= roots[i] - roots[j];
            cplx delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-14) break;
    }
    return roots;
}

/// Coefficients (ascending) of the reverse Bessel polynomial theta_n.
inline std::vector<double> reverse_bessel_poly(int order) {
    std::vector<double> prev2{1.0};        // theta_0
    std::vector<double> prev1{1.0, 1.0};   // theta_1
    if (order == 0) return prev2;
    for (int n = 2; n <= order; ++n) {
        std::vector<double> cur(n + 1, 0.0);
        for (std::size_t i = 0; i < prev1.size(); ++i)
            cur[i] += (2.0 * n - 1.0) * prev1[i];
        for (std::size_t i = 0; i < prev2.size(); ++i)
            cur[i + 2] += prev2[i];
        prev2 = std::move(prev1);
        prev1 = std::move(cur);
    }
    return prev1;
}

/// Analog Bessel lowpass prototype poles, scaled so |H(j*1)| = -3 dB.
inline std::vector<cplx> bessel_prototype_poles(int order) {
    const auto theta = reverse_bessel_poly(order);
    auto poles = polynomial_roots(theta);
    // |H(jw)|^2 = theta(0)^2 / |theta(jw)|^2 ; bisect for the -3 dB point.
    auto mag2 = [&](double w) {
        cplx acc = theta.back();
        const cplx jw(0.0, w);
        for (int i = static_cast<int>(theta.size()) - 2; i >= 0; --i)
            acc = acc * jw + theta[i];
        const double h2 = (theta[0] * theta[0]) / std::norm(acc);
        return h2;
    };
    double lo = 1e-3, hi = 10.0 * order + 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mag2(mid) > 0.5)
            lo = mid;
        else
            hi = mid;
    }
    const double w3 = 0.5 * (lo + hi);
    for (auto& p : poles) p /= w3;
    return poles;
}

/// Analog Butterworth lowpass prototype poles (-3 dB at w = 1).
inline std::vector<cplx> butterworth_prototype_poles(int order) {
    std::vector<cplx> poles(order);
    for (int k = 0; k < order; ++k) {
        const double theta =
            std::numbers::pi * (2.0 * k + order + 1.0) / (2.0 * order);
        poles[k] = cplx(std::cos(theta), std::sin(theta));
    }
    return poles;
}

}  // namespace detail

struct DigitalFilter {
    FilterKind kind = FilterKind::BrickwallLowpass;
    int order = 0;
    double cutoff_3db = 0.0;
    double design_rate = 0.0;  // 0 for brickwall (rate-agnostic mask)
    std::vector<Biquad> sections;

    /// Complex frequency response at f hertz (at the design rate for IIR
    /// kinds; ideal mask for brickwall).
    std::complex<double> response(double f) const {
        if (kind == FilterKind::BrickwallLowpass)
            return std::abs(f) <= cutoff_3db ? 1.0 : 0.0;
        const double w = 2.0 * std::numbers::pi * f / design_rate;
        const std::complex<double> z1 = std::polar(1.0, -w);
        const std::complex<double> z2 = z1 * z1;
        std::complex<double> h = 1.0;
        for (const auto& s : sections)
            h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
        return h;
    }

    double magnitude_db(double f) const { return 20.0 * std::log10(std::abs(response(f))); }

    /// Samples until the impulse response has decayed to ~1e-3 of its peak.
    std::size_t settle_samples() const {
        if (kind == FilterKind::BrickwallLowpass) return 0;
        double rmax = 0.0;
        for (const auto& s : sections) {
            // pole radius of the section
            const double r = s.a2 != 0.0 ? std::sqrt(std::abs(s.a2)) : std::abs(s.a1);
            rmax = std::max(rmax, r);
        }
        if (rmax <= 0.0 || rmax >= 1.0) return 0;
        return static_cast<std::size_t>(std::ceil(std::log(1e-3) / std::log(rmax)));
    }
};

inline DigitalFilter design_filter(FilterKind kind, int order, double cutoff_3db,
                                   double sample_rate) {
    if (order < 1 || order > 12)
        throw std::invalid_argument("design_filter: order out of range");
    if (cutoff_3db <= 0.0)
        throw std::invalid_argument("design_filter: cutoff must be positive");

    DigitalFilter f;
    f.kind = kind;
    f.order = order;
    f.cutoff_3db = cutoff_3db;

    if (kind == FilterKind::BrickwallLowpass) {
        f.design_rate = 0.0;
        return f;
    }

    if (cutoff_3db >= sample_rate / 2.0)
        throw std::invalid_argument("design_filter: cutoff at or above Nyquist");
    f.design_rate = sample_rate;

    // Prewarp so the digital -3 dB point lands exactly on cutoff_3db.
    const double wa =
        2.0 * sample_rate * std::tan(std::numbers::pi * cutoff_3db / sample_rate);
    const double fs2 = 2.0 * sample_rate;

    std::vector<detail::cplx> analog_poles;
    const bool highpass = kind == FilterKind::ButterworthHighpass;
    const auto proto = highpass ? detail::butterworth_prototype_poles(order)
                                : detail::bessel_prototype_poles(order);
    for (const auto& q : proto)
        analog_poles.push_back(highpass ? wa / q : wa * q);

    for (const auto& p : analog_poles) {
        if (p.imag() < -1e-9) continue;  // conjugate handled with its partner
        const detail::cplx zp = (fs2 + p) / (fs2 - p);
        Biquad s;
        if (p.imag() > 1e-9) {
            s.a1 = -2.0 * zp.real();
            s.a2 = std::norm(zp);
            if (highpass) {
                const double g = (1.0 - s.a1 + s.a2) / 4.0;
                s.b0 = g; s.b1 = -2.0 * g; s.b2 = g;
            } else {
                const double g = (1.0 + s.a1 + s.a2) / 4.0;
                s.b0 = g; s.b1 = 2.0 * g; s.b2 = g;
            }
        } else {
            s.a1 = -zp.real();
            s.a2 = 0.0;
            if (highpass) {
                const double g = (1.0 - s.a1) / 2.0;
                s.b0 = g; s.b1 = -g;
            } else {
                const double g = (1.0 + s.a1) / 2.0;
                s.b0 = g; s.b1 = g;
            }
            s.b2 = 0.0;
        }
        f.sections.push_back(s);
    }
    return f;
}

/// LTI filtering; output length equals input length. Group delay is not
/// compensated (synchronization absorbs all delays).
inline RealWaveform apply_filter(const DigitalFilter& f, const RealWaveform& w) {
    if (w.sample_rate <= 0.0)
        throw std::invalid_argument("apply_filter: waveform sample rate unset");
    RealWaveform out;
    out.sample_rate = w.sample_rate;

    if (f.kind == FilterKind::BrickwallLowpass) {
        if (f.cutoff_3db >= w.sample_rate / 2.0)
            return w;  // mask passes the whole band
        std::vector<std::complex<double>> spec(w.samples.begin(), w.samples.end());
        fft::forward(spec);
        const std::size_t n = spec.size();
        for (std::size_t k = 0; k < n; ++k) {
            if (std::abs(fft::bin_frequency(k, n, w.sample_rate)) > f.cutoff_3db)
                spec[k] = 0.0;
        }
        fft::inverse_normalized(spec);
        out.samples.resize(n);
        for (std::size_t k = 0; k < n; ++k) out.samples[k] = spec[k].real();
        return out;
    }

    if (std::abs(f.design_rate - w.sample_rate) > 1e-6 * f.design_rate)
        throw std::invalid_argument("apply_filter: waveform rate differs from design rate");

    out.samples = w.samples;
    for (const auto& s : f.sections) {
        double z1 = 0.0, z2 = 0.0;  // DF2T state
        for (auto& x : out.samples) {
            const double in = x;
            const double y = s.b0 * in + z1;
            z1 = s.b1 * in - s.a1 * y + z2;
            z2 = s.b2 * in - s.a2 * y;
            x = y;
        }
    }
    return out;
}

}  // namespace pilotwave

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "pilotwave/fft.hpp"
#include "pilotwave/signal.hpp"

namespace pilotwave {

struct FiberConfig {
    double length_km = 0.0;              // 0 (B2B) or 20 in the experiments
    double attenuation_db_per_km = 0.2;
    double dispersion_ps_nm_km = 17.0;
};

/// SSMF propagation: all-pass chromatic dispersion applied in the frequency
/// domain, then scalar field attenuation.
inline ComplexEnvelope fiber_propagate(const ComplexEnvelope& env,
                                       const FiberConfig& fib) {
    if (fib.length_km < 0.0)
        throw std::invalid_argument("fiber_propagate: negative length");
    if (fib.length_km == 0.0) return env;
    if (env.samples.size() < 2)
        throw std::invalid_argument("fiber_propagate: need >= 2 samples");

    constexpr double c_mps = 299792458.0;
    const double lambda = c_mps / env.center_frequency;       // m
    const double d_si = fib.dispersion_ps_nm_km * 1e-6;       // s/m^2
    const double length_m = fib.length_km * 1e3;

    ComplexEnvelope out = env;
    fft::forward(out.samples);
    const std::size_t n = out.samples.size();
    const double coef =
        std::numbers::pi * d_si * lambda * lambda * length_m / c_mps;
    for (std::size_t k = 0; k < n; ++k) {
        const double f = fft::bin_frequency(k, n, env.sample_rate);
        out.samples[k] *= std::polar(1.0, coef * f * f);
    }
    fft::inverse_normalized(out.samples);

    const double field_gain =
        db_to_field_gain(-fib.attenuation_db_per_km * fib.length_km);
    for (auto& s : out.samples) s *= field_gain;
    return out;
}

inline ComplexEnvelope voa_attenuate(const ComplexEnvelope& env, double atten_db) {
    if (atten_db < 0.0)
        throw std::invalid_argument("voa_attenuate: negative attenuation");
    ComplexEnvelope out = env;
    const double field_gain = db_to_field_gain(-atten_db);
    for (auto& s : out.samples) s *= field_gain;
    return out;
}

inline double average_power_dbm(const ComplexEnvelope& env) {
    return watts_to_dbm(average_power_watts(env));
}

}  // namespace pilotwave

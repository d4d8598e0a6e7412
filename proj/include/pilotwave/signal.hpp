#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pilotwave {

using BitSeq = std::vector<uint8_t>;
using SymbolSeq = std::vector<int>;

/// Uniformly sampled real electrical signal. The physical unit (volts,
/// amperes, watts) is set by the producing operation's contract.
struct RealWaveform {
    std::vector<double> samples;
    double sample_rate = 0.0;  // samples/second

    std::size_t size() const { return samples.size(); }
};

/// Sampled complex optical field envelope; |sample|^2 is instantaneous
/// power in watts.
struct ComplexEnvelope {
    std::vector<std::complex<double>> samples;
    double sample_rate = 0.0;
    double center_frequency = 193.1e12;  // Hz

    std::size_t size() const { return samples.size(); }
};

inline double watts_to_dbm(double watts) {
    if (watts <= 0.0)
        throw std::invalid_argument("watts_to_dbm: power must be positive");
    return 10.0 * std::log10(watts / 1e-3);
}

inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

inline double db_to_field_gain(double db) { return std::pow(10.0, db / 20.0); }
inline double db_to_power_gain(double db) { return std::pow(10.0, db / 10.0); }

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

/// Mean optical power of an envelope, watts.
inline double average_power_watts(const ComplexEnvelope& env) {
    if (env.samples.empty())
        throw std::invalid_argument("average_power_watts: empty envelope");
    double acc = 0.0;
    for (const auto& s : env.samples) acc += std::norm(s);
    return acc / static_cast<double>(env.samples.size());
}

}  // namespace pilotwave

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pilotwave/metrics.hpp"

namespace pilotwave {

/// FNV-1a over a string; used to stamp outputs with a config fingerprint.
inline uint64_t fnv1a(const std::string& data) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// CSV for one BER curve. Everything non-deterministic (timestamps) stays in
/// '#' comment lines; the body is byte-stable for a fixed seed.
inline std::string ber_curve_csv(const BerCurve& curve, uint64_t seed,
                                 uint64_t config_hash,
                                 const std::string& timestamp) {
    std::ostringstream out;
    out << "# pilotwave ber curve label=" << curve.label << "\n";
    out << "# seed=" << seed << " config_hash=" << std::hex << config_hash
        << std::dec << "\n";
    if (!timestamp.empty()) out << "# generated=" << timestamp << "\n";
    out << "power_dbm,errors,total_bits,ber,low_confidence\n";
    out << std::setprecision(10);
    for (const auto& p : curve.points) {
        if (p.failed) {
            out << p.received_power_dbm << ",,,failed,\n";
            continue;
        }
        out << p.received_power_dbm << "," << p.errors << "," << p.total_bits
            << "," << p.ber << "," << (p.low_confidence ? 1 : 0) << "\n";
    }
    return out.str();
}

/// Eye histogram as a P5 PGM, log-scaled counts, dark background.
inline std::string eye_pgm(const EyeHistogram& eye) {
    const std::size_t rows = eye.rows(), cols = eye.cols();
    std::size_t peak = 1;
    for (const auto& row : eye.grid)
        for (std::size_t c : row) peak = std::max(peak, c);
    const double scale = 255.0 / std::log1p(static_cast<double>(peak));

    std::ostringstream out;
    out << "P5\n" << cols << " " << rows << "\n255\n";
    // Row 0 of the grid is the lowest amplitude; images put it at the bottom.
    for (std::size_t r = rows; r-- > 0;) {
        for (std::size_t c = 0; c < cols; ++c) {
            const auto v = static_cast<unsigned char>(
                std::lround(scale * std::log1p(static_cast<double>(eye.grid[r][c]))));
            out.put(static_cast<char>(v));
        }
    }
    return out.str();
}

inline std::string eye_csv(const EyeHistogram& eye, uint64_t seed,
                           uint64_t config_hash, const std::string& timestamp) {
    std::ostringstream out;
    out << "# pilotwave eye histogram ui_s=" << eye.ui << " amp_min=" << eye.amp_min
        << " amp_max=" << eye.amp_max << "\n";
    out << "# seed=" << seed << " config_hash=" << std::hex << config_hash
        << std::dec << "\n";
    if (!timestamp.empty()) out << "# generated=" << timestamp << "\n";
    out << "amplitude_bin,time_bin,count\n";
    for (std::size_t r = 0; r < eye.rows(); ++r)
        for (std::size_t c = 0; c < eye.cols(); ++c)
            if (eye.grid[r][c] != 0)
                out << r << "," << c << "," << eye.grid[r][c] << "\n";
    return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot write");
    out << content;
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace pilotwave

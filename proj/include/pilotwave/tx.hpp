#pragma once

#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "pilotwave/filter.hpp"
#include "pilotwave/signal.hpp"

namespace pilotwave {

enum class ModulationFormat { NRZ, PAM4, Duobinary };

inline int bits_per_symbol(ModulationFormat fmt) {
    return fmt == ModulationFormat::PAM4 ? 2 : 1;
}

inline int levels_of(ModulationFormat fmt) {
    switch (fmt) {
        case ModulationFormat::NRZ: return 2;
        case ModulationFormat::PAM4: return 4;
        case ModulationFormat::Duobinary: return 3;
    }
    return 0;
}

inline std::string format_name(ModulationFormat fmt) {
    switch (fmt) {
        case ModulationFormat::NRZ: return "nrz";
        case ModulationFormat::PAM4: return "pam4";
        case ModulationFormat::Duobinary: return "duobinary";
    }
    return "?";
}

struct TxConfig {
    double bit_rate = 25e9;
    double sample_rate = 100e9;
    // Peak-to-peak drive before the amplifier: 500 mV for the binary
    // formats, halved for PAM4 so the modulator stays in its linear range.
    double vpp_nrz = 0.5;
    double vpp_pam4 = 0.25;
    double gain_db = 26.0;
    // Bessel shaping that creates the duobinary partial response.
    double duobinary_cutoff = 7e9;
    int duobinary_order = 5;

    double vpp(ModulationFormat fmt) const {
        return fmt == ModulationFormat::PAM4 ? vpp_pam4 : vpp_nrz;
    }
    double symbol_rate(ModulationFormat fmt) const {
        return bit_rate / bits_per_symbol(fmt);
    }
    int sps(ModulationFormat fmt) const {
        const double r = sample_rate / symbol_rate(fmt);
        const int n = static_cast<int>(std::lround(r));
        if (n < 2 || std::abs(r - n) > 1e-9)
            throw std::invalid_argument(
                "tx: sample_rate must be an integer multiple (>= 2) of the symbol rate");
        return n;
    }
};

struct MzmConfig {
    double v_pi = 10.0;
    double bias = -5.0;                    // quadrature: -v_pi/2
    double cw_power = dbm_to_watts(16.0);  // laser output
    double insertion_loss_db = 6.0;

    static MzmConfig quadrature(double v_pi_volts = 10.0) {
        MzmConfig m;
        m.v_pi = v_pi_volts;
        m.bias = -v_pi_volts / 2.0;
        return m;
    }
};

enum class PilotInjection { Multiplicative, MzmBias };

struct PilotToneConfig {
    bool enabled = false;
    double frequency = 47.5e3;      // Hz, in [47.5e3, 52.5e3] nominally
    double target_depth_pct = 8.0;  // Eq.-style power modulation depth
    PilotInjection injection = PilotInjection::Multiplicative;
    // For MzmBias injection only: DC offset of the bias drive relative to
    // quadrature. The offset sets the operating point; the sine amplitude
    // (calibrated) sets the depth.
    double bias_offset = 0.0;
};

// --- codecs ---------------------------------------------------------------

/// Gray mapping (b1,b2): (0,0)->0, (1,0)->1, (1,1)->2, (0,1)->3.
inline SymbolSeq gray_encode_pam4(const BitSeq& bits) {
    if (bits.size() % 2 != 0)
        throw std::invalid_argument("gray_encode_pam4: odd bit count");
    static constexpr int lut[2][2] = {{0, 3}, {1, 2}};  // [b1][b2]
    SymbolSeq out(bits.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = lut[bits[2 * i]][bits[2 * i + 1]];
    return out;
}

inline BitSeq gray_decode_pam4(const SymbolSeq& symbols) {
    static constexpr uint8_t lut[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    BitSeq out(symbols.size() * 2);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const int s = symbols[i];
        if (s < 0 || s > 3)
            throw std::invalid_argument("gray_decode_pam4: symbol out of range");
        out[2 * i] = lut[s][0];
        out[2 * i + 1] = lut[s][1];
    }
    return out;
}

/// Differential precoding c_k = b_k XOR c_{k-1} (c_{-1} = 0) so that the
/// receiver's modulo-2 on the 3-level sequence c_k + c_{k-1} returns b_k.
inline BitSeq duobinary_precode(const BitSeq& bits) {
    BitSeq out(bits.size());
    uint8_t prev = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        prev = static_cast<uint8_t>(bits[i] ^ prev);
        out[i] = prev;
    }
    return out;
}

/// Line symbols carried on the wire: what the slicer must distinguish.
/// NRZ: the bits. PAM4: Gray symbols. Duobinary: c_k + c_{k-1} in {0,1,2}.
inline SymbolSeq line_symbols(const BitSeq& bits, ModulationFormat fmt) {
    switch (fmt) {
        case ModulationFormat::NRZ: {
            SymbolSeq s(bits.size());
            for (std::size_t i = 0; i < bits.size(); ++i) s[i] = bits[i];
            return s;
        }
        case ModulationFormat::PAM4:
            return gray_encode_pam4(bits);
        case ModulationFormat::Duobinary: {
            const BitSeq c = duobinary_precode(bits);
            SymbolSeq s(c.size());
            uint8_t prev = 0;
            for (std::size_t i = 0; i < c.size(); ++i) {
                s[i] = c[i] + prev;
                prev = c[i];
            }
            return s;
        }
    }
    throw std::logic_error("line_symbols: bad format");
}

// --- waveform rendering ---------------------------------------------------

inline RealWaveform upsample_hold(const SymbolSeq& symbols,
                                  const std::vector<double>& levels, int sps,
                                  double sample_rate) {
    if (symbols.empty())
        throw std::invalid_argument("upsample_hold: empty symbol list");
    if (sps < 2) throw std::invalid_argument("upsample_hold: sps must be >= 2");
    RealWaveform w;
    w.sample_rate = sample_rate;
    w.samples.resize(symbols.size() * static_cast<std::size_t>(sps));
    std::size_t k = 0;
    for (int s : symbols) {
        if (s < 0 || static_cast<std::size_t>(s) >= levels.size())
            throw std::invalid_argument("upsample_hold: unmapped symbol value");
        const double v = levels[static_cast<std::size_t>(s)];
        for (int j = 0; j < sps; ++j) w.samples[k++] = v;
    }
    return w;
}

/// Equispaced drive levels spanning vpp, symmetric about 0 V.
inline std::vector<double> drive_levels(ModulationFormat fmt, double vpp) {
    const int n = fmt == ModulationFormat::PAM4 ? 4 : 2;
    std::vector<double> lv(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        lv[static_cast<std::size_t>(i)] = -vpp / 2.0 + vpp * i / (n - 1.0);
    return lv;
}

/// Electrical drive at the modulator input: map bits to levels, hold,
/// shape (duobinary only), amplify.
inline RealWaveform build_drive(const BitSeq& bits, ModulationFormat fmt,
                                const TxConfig& cfg) {
    const int sps = cfg.sps(fmt);
    SymbolSeq syms;
    if (fmt == ModulationFormat::Duobinary) {
        const BitSeq c = duobinary_precode(bits);
        syms.assign(c.begin(), c.end());
    } else if (fmt == ModulationFormat::PAM4) {
        syms = gray_encode_pam4(bits);
    } else {
        syms.assign(bits.begin(), bits.end());
    }
    const auto levels =
        drive_levels(fmt == ModulationFormat::PAM4 ? fmt : ModulationFormat::NRZ,
                     cfg.vpp(fmt));
    RealWaveform w = upsample_hold(syms, levels, sps, cfg.sample_rate);
    if (fmt == ModulationFormat::Duobinary) {
        const auto shaper = design_filter(FilterKind::BesselLowpass,
                                          cfg.duobinary_order,
                                          cfg.duobinary_cutoff, cfg.sample_rate);
        w = apply_filter(shaper, w);
    }
    const double g = db_to_field_gain(cfg.gain_db);  // 26 dB voltage gain
    for (auto& x : w.samples) x *= g;
    return w;
}

// --- modulator ------------------------------------------------------------

/// Mach-Zehnder intensity modulator: field = sqrt(cw) * cos(pi*(v+bias)/(2*v_pi)),
/// so power follows the cos^2 transfer; insertion loss applied to power.
inline ComplexEnvelope mzm_modulate(const RealWaveform& drive, const MzmConfig& mzm) {
    if (drive.sample_rate <= 0.0)
        throw std::invalid_argument("mzm_modulate: drive sample rate unset");
    double vmin = 0.0, vmax = 0.0;
    for (double v : drive.samples) {
        vmin = std::min(vmin, v + mzm.bias);
        vmax = std::max(vmax, v + mzm.bias);
    }
    if (vmax - vmin > 2.0 * mzm.v_pi + 1e-9)
        std::cerr << "mzm_modulate: warning: drive excursion "
                  << (vmax - vmin) << " V exceeds one transfer period (2*Vpi = "
                  << 2.0 * mzm.v_pi << " V); levels will fold\n";
    const double amp =
        std::sqrt(mzm.cw_power) * db_to_field_gain(-mzm.insertion_loss_db);
    const double k = std::numbers::pi / (2.0 * mzm.v_pi);
    ComplexEnvelope env;
    env.sample_rate = drive.sample_rate;
    env.samples.resize(drive.samples.size());
    for (std::size_t i = 0; i < drive.samples.size(); ++i)
        env.samples[i] = amp * std::cos(k * (drive.samples[i] + mzm.bias));
    return env;
}

/// Multiplicative pilot: power envelope x (1 + a*sin(2*pi*f*t)).
inline ComplexEnvelope apply_pilot(const ComplexEnvelope& env,
                                   const PilotToneConfig& pt, double a) {
    if (a < 0.0 || a >= 1.0)
        throw std::invalid_argument("apply_pilot: amplitude must be in [0, 1)");
    if (a == 0.0) return env;
    ComplexEnvelope out = env;
    const double w = 2.0 * std::numbers::pi * pt.frequency / env.sample_rate;
    for (std::size_t i = 0; i < out.samples.size(); ++i)
        out.samples[i] *= std::sqrt(1.0 + a * std::sin(w * static_cast<double>(i)));
    return out;
}

/// Bias-port pilot: the tone rides on the modulator bias, so the drive seen
/// by the MZM is v(t) + a_volts*sin(2*pi*f*t). The DC part of the bias drive
/// (quadrature + pt.bias_offset) lives in MzmConfig.bias.
inline RealWaveform add_bias_pilot(const RealWaveform& drive,
                                   const PilotToneConfig& pt, double a_volts) {
    if (a_volts == 0.0) return drive;
    RealWaveform out = drive;
    const double w = 2.0 * std::numbers::pi * pt.frequency / drive.sample_rate;
    for (std::size_t i = 0; i < out.samples.size(); ++i)
        out.samples[i] += a_volts * std::sin(w * static_cast<double>(i));
    return out;
}

}  // namespace pilotwave

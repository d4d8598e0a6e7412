#pragma once

#include <string>
#include <vector>

#include "pilotwave/config.hpp"
#include "pilotwave/experiment.hpp"

namespace pilotwave {

inline ModulationFormat format_from_name(const std::string& name) {
    if (name == "nrz") return ModulationFormat::NRZ;
    if (name == "pam4") return ModulationFormat::PAM4;
    if (name == "duobinary") return ModulationFormat::Duobinary;
    throw ConfigError("unknown format '" + name + "' (nrz|pam4|duobinary)");
}

/// Build one scenario for (format, pilot on/off) from a parsed config file.
/// The pilot's injection path defaults to "auto": the tone rides the MZM bias
/// for PAM4 and multiplies the power envelope for the binary formats. The
/// bias operating point is shared by the paired pilot-off scenario so on/off
/// curves differ only in the tone.
inline Scenario scenario_from_config(const Config& cfg, ModulationFormat fmt,
                                     bool pilot_on) {
    Scenario sc;
    sc.format = fmt;

    sc.tx.bit_rate = cfg.number_or("tx", "bit_rate", 25e9);
    sc.tx.sample_rate = cfg.number_or("tx", "sample_rate", 100e9);
    sc.tx.vpp_nrz = cfg.number_or("tx", "vpp_nrz", 0.5);
    sc.tx.vpp_pam4 = cfg.number_or("tx", "vpp_pam4", 0.25);
    sc.tx.gain_db = cfg.number_or("tx", "gain_db", 26.0);
    sc.tx.duobinary_cutoff = cfg.number_or("tx", "duobinary_cutoff", 7e9);
    sc.tx.duobinary_order =
        static_cast<int>(cfg.number_or("tx", "duobinary_order", 5));

    const double vpi = cfg.number_or("tx", "vpi", 10.0);
    sc.mzm = MzmConfig::quadrature(vpi);
    sc.mzm.cw_power = dbm_to_watts(cfg.number_or("tx", "cw_dbm", 16.0));
    sc.mzm.insertion_loss_db = cfg.number_or("tx", "insertion_loss_db", 6.0);

    sc.pilot.enabled = pilot_on;
    sc.pilot.frequency = cfg.number_or("pilot", "frequency", 47.5e3);
    sc.pilot.target_depth_pct = cfg.number_or("pilot", "depth_pct", 8.0);
    const std::string injection = cfg.string_or("pilot", "injection", "auto");
    bool bias_injection;
    if (injection == "auto")
        bias_injection = fmt == ModulationFormat::PAM4;
    else if (injection == "bias")
        bias_injection = true;
    else if (injection == "multiplicative")
        bias_injection = false;
    else
        throw ConfigError("[pilot] injection must be auto|multiplicative|bias");
    sc.pilot.injection = bias_injection ? PilotInjection::MzmBias
                                        : PilotInjection::Multiplicative;
    if (bias_injection) {
        sc.pilot.bias_offset = cfg.number_or("pilot", "bias_offset", 1.55);
        sc.mzm.bias += sc.pilot.bias_offset;
    }

    sc.fiber.length_km = cfg.number_or("fiber", "length_km", 0.0);
    sc.fiber.attenuation_db_per_km =
        cfg.number_or("fiber", "attenuation_db_per_km", 0.2);
    sc.fiber.dispersion_ps_nm_km =
        cfg.number_or("fiber", "dispersion_ps_nm_km", 17.0);

    sc.rx.responsivity = cfg.number_or("rx", "responsivity", 0.8);
    sc.rx.thermal_noise_density =
        cfg.number_or("rx", "thermal_noise_density", 3.1e-10);
    sc.rx.shot_noise = cfg.boolean_or("rx", "shot_noise", true);
    sc.rx.bandwidth = cfg.number_or("rx", "bandwidth", 28e9);
    sc.rx.pt_highpass_cutoff = cfg.number_or("rx", "pt_highpass_cutoff", 280e3);
    if (!cfg.boolean_or("rx", "noise", true)) {
        sc.rx.thermal_noise_density = 0.0;
        sc.rx.shot_noise = false;
    }
    sc.measurement_cutoff = sc.rx.pt_highpass_cutoff;

    sc.n_bits = static_cast<std::size_t>(cfg.number_or("sweep", "n_bits", 2e6));
    sc.master_seed = static_cast<uint64_t>(cfg.number_or("sweep", "seed", 1));
    sc.prbs_order = static_cast<int>(cfg.number_or("sweep", "prbs_order", 15));

    const std::string fname = format_name(fmt);
    if (cfg.has("sweep", "powers_" + fname))
        sc.sweep_powers_dbm = cfg.numbers("sweep", "powers_" + fname);
    else if (cfg.has("sweep", "powers"))
        sc.sweep_powers_dbm = cfg.numbers("sweep", "powers");

    const std::string span = sc.fiber.length_km > 0.0
                                 ? std::to_string(static_cast<int>(sc.fiber.length_km)) + "km"
                                 : "b2b";
    sc.label = fname + (pilot_on ? "_pt_" : "_nopt_") + span;
    return sc;
}

inline std::vector<ModulationFormat> formats_from_config(const Config& cfg) {
    std::vector<ModulationFormat> out;
    if (cfg.has("sweep", "formats")) {
        for (const auto& n : cfg.strings("sweep", "formats"))
            out.push_back(format_from_name(n));
    } else {
        out = {ModulationFormat::NRZ, ModulationFormat::Duobinary,
               ModulationFormat::PAM4};
    }
    return out;
}

}  // namespace pilotwave

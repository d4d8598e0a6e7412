// pilotwave — link simulator front end.
//
//   pilotwave sweep <config> [--jobs N] [--out DIR]   BER-vs-power curves
//   pilotwave eye <config> --power <dBm> [--out DIR]  eye diagrams (PGM+CSV)
//   pilotwave depth <config>                          pilot depth calibration
//   pilotwave selftest                                fast invariant checks
//
// Exit codes: 0 success, 1 configuration error, 2 simulation failure.
// PILOTWAVE_SEED overrides the config seed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pilotwave/pilotwave.hpp"

using namespace pilotwave;

namespace {

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Apply the PILOTWAVE_SEED override, if set.
void apply_seed_override(Scenario& sc) {
    if (const char* env = std::getenv("PILOTWAVE_SEED")) {
        try {
            sc.master_seed = std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError("PILOTWAVE_SEED is not an integer: " +
                              std::string(env));
        }
    }
}

struct LoadedConfig {
    Config cfg;
    uint64_t hash = 0;
    bool pilot_available = true;
    std::vector<double> targets;
};

LoadedConfig load(const std::string& path) {
    LoadedConfig lc{Config::parse_file(path)};
    lc.hash = fnv1a(slurp(path));
    lc.pilot_available = lc.cfg.boolean_or("pilot", "enabled", true);
    if (lc.cfg.has("sweep", "targets"))
        lc.targets = lc.cfg.numbers("sweep", "targets");
    else
        lc.targets = {3.0, 4.5};
    return lc;
}

int cmd_sweep(const std::string& config_path, int jobs, const std::string& out_dir) {
    const LoadedConfig lc = load(config_path);
    std::filesystem::create_directories(out_dir);
    const std::string stamp = timestamp_utc();

    std::ostringstream penalty_csv;
    std::size_t total_points = 0, failed_points = 0;
    uint64_t seed_used = 0;

    penalty_csv << "format,target_neglog_ber,penalty_db\n";
    for (const auto fmt : formats_from_config(lc.cfg)) {
        Scenario off = scenario_from_config(lc.cfg, fmt, false);
        apply_seed_override(off);
        seed_used = off.master_seed;
        if (off.sweep_powers_dbm.empty())
            throw ConfigError("[sweep] powers (or powers_" + format_name(fmt) +
                              ") required for sweep");

        BerCurve curve_off = run_ber_sweep(off, jobs);
        write_file(out_dir + "/ber_" + curve_off.label + ".csv",
                   ber_curve_csv(curve_off, off.master_seed, lc.hash, stamp));
        for (const auto& p : curve_off.points) {
            ++total_points;
            failed_points += p.failed;
        }

        if (!lc.pilot_available) continue;
        Scenario on = scenario_from_config(lc.cfg, fmt, true);
        apply_seed_override(on);
        std::fprintf(stderr, "calibrating %s pilot depth...\n",
                     format_name(fmt).c_str());
        on.pilot_amplitude = calibrate_pilot_depth(on, on.pilot.target_depth_pct);
        BerCurve curve_on = run_ber_sweep(on, jobs);
        write_file(out_dir + "/ber_" + curve_on.label + ".csv",
                   ber_curve_csv(curve_on, on.master_seed, lc.hash, stamp));
        for (const auto& p : curve_on.points) {
            ++total_points;
            failed_points += p.failed;
        }

        for (double target : lc.targets) {
            try {
                const double pen = penalty_at(curve_off, curve_on, target);
                penalty_csv << format_name(fmt) << "," << target << "," << pen
                            << "\n";
            } catch (const UnbracketableError&) {
                penalty_csv << "# " << format_name(fmt) << ": target " << target
                            << " not bracketed by both curves\n";
            }
        }
    }

    if (lc.pilot_available && total_points > 0) {
        std::ostringstream head;
        head << "# pilotwave penalties seed=" << seed_used << " config_hash="
             << std::hex << lc.hash << std::dec << "\n# generated=" << stamp
             << "\n";
        write_file(out_dir + "/penalty.csv", head.str() + penalty_csv.str());
    }
    if (total_points > 0 && failed_points == total_points) {
        std::fprintf(stderr, "sweep: every point failed (sync loss or "
                             "unreachable power targets)\n");
        return 2;
    }
    return 0;
}

int cmd_eye(const std::string& config_path, double power_dbm,
            const std::string& out_dir) {
    const LoadedConfig lc = load(config_path);
    std::filesystem::create_directories(out_dir);
    const std::string stamp = timestamp_utc();
    bool any_ok = false;

    for (const auto fmt : formats_from_config(lc.cfg)) {
        for (const bool pilot_on : {false, true}) {
            if (pilot_on && !lc.pilot_available) continue;
            Scenario sc = scenario_from_config(lc.cfg, fmt, pilot_on);
            apply_seed_override(sc);
            if (pilot_on)
                sc.pilot_amplitude =
                    calibrate_pilot_depth(sc, sc.pilot.target_depth_pct);
            const auto res = run_capture(sc, power_dbm, 0, /*keep_waveform=*/true);
            if (res.point.failed) {
                std::fprintf(stderr, "eye: %s failed at %.2f dBm\n",
                             sc.label.c_str(), power_dbm);
                continue;
            }
            const auto eye = eye_histogram(
                res.filtered, sc.tx.symbol_rate(fmt), res.sync, 64);
            write_file(out_dir + "/eye_" + sc.label + ".pgm", eye_pgm(eye));
            write_file(out_dir + "/eye_" + sc.label + ".csv",
                       eye_csv(eye, sc.master_seed, lc.hash, stamp));
            any_ok = true;
        }
    }
    return any_ok ? 0 : 2;
}

int cmd_depth(const std::string& config_path) {
    const LoadedConfig lc = load(config_path);
    if (!lc.pilot_available)
        throw ConfigError("depth: [pilot] enabled must be true");

    bool all_ok = true;
    for (const auto fmt : formats_from_config(lc.cfg)) {
        Scenario sc = scenario_from_config(lc.cfg, fmt, true);
        apply_seed_override(sc);
        const double target = sc.pilot.target_depth_pct;
        if (target <= 0.0)
            throw ConfigError("depth: [pilot] depth_pct must be positive");

        double a;
        try {
            a = calibrate_pilot_depth(sc, target);
        } catch (const std::runtime_error& e) {
            std::fprintf(stderr, "%s: calibration failed: %s\n",
                         format_name(fmt).c_str(), e.what());
            return 2;
        }
        // closed-loop verification on an independent bit pattern
        sc.master_seed += 1;
        const double depth = measure_pilot_depth(sc, a);
        std::printf("%s: amplitude=%.5g depth=%.2f%% (target %.1f%%)\n",
                    format_name(fmt).c_str(), a, depth, target);
        if (std::abs(depth - target) > 0.5) all_ok = false;
    }
    return all_ok ? 0 : 2;
}

int cmd_selftest() {
    int failed = 0;
    auto check = [&](const std::string& name, bool ok) {
        std::printf("%s %s\n", ok ? "[PASS]" : "[FAIL]", name.c_str());
        if (!ok) ++failed;
    };

    // Gray codec exhaustive to 12 bits
    bool gray_ok = true;
    for (uint32_t v = 0; v < (1u << 12) && gray_ok; ++v) {
        BitSeq bits(12);
        for (int i = 0; i < 12; ++i) bits[i] = (v >> i) & 1u;
        gray_ok = gray_decode_pam4(gray_encode_pam4(bits)) == bits;
    }
    check("pam4 gray round trip (exhaustive, 12 bits)", gray_ok);

    // duobinary precode oracle
    bool duo_ok = true;
    std::mt19937_64 rng(1);
    for (int t = 0; t < 200 && duo_ok; ++t) {
        BitSeq b(512);
        for (auto& x : b) x = static_cast<uint8_t>(rng() & 1u);
        const BitSeq c = duobinary_precode(b);
        uint8_t prev = 0;
        for (std::size_t i = 0; i < b.size() && duo_ok; ++i) {
            duo_ok = static_cast<uint8_t>((c[i] + prev) % 2) == b[i];
            prev = c[i];
        }
    }
    check("duobinary precode / delay-and-add / mod-2 identity", duo_ok);

    // filter -3 dB anchors
    bool anchors_ok = true;
    for (const auto& f :
         {design_filter(FilterKind::BesselLowpass, 5, 11.5e9, 50e9),
          design_filter(FilterKind::BesselLowpass, 4, 28e9, 100e9),
          design_filter(FilterKind::ButterworthHighpass, 2, 280e3, 100e9)}) {
        const double db = 20.0 * std::log10(std::abs(f.response(f.cutoff_3db)));
        anchors_ok = anchors_ok && std::abs(db + 3.0) <= 0.1;
    }
    check("filter -3 dB anchors within 0.1 dB", anchors_ok);

    // dispersion unitarity
    std::normal_distribution<double> g(0.0, 1e-2);
    ComplexEnvelope env;
    env.sample_rate = 100e9;
    env.samples.resize(4096);
    for (auto& s : env.samples) s = {g(rng), g(rng)};
    FiberConfig fib;
    fib.length_km = 20.0;
    fib.attenuation_db_per_km = 0.0;
    const auto out = fiber_propagate(env, fib);
    double e_in = 0.0, e_out = 0.0;
    for (std::size_t i = 0; i < env.samples.size(); ++i) {
        e_in += std::norm(env.samples[i]);
        e_out += std::norm(out.samples[i]);
    }
    check("chromatic dispersion conserves energy (1e-9 relative)",
          std::abs(e_out - e_in) <= 1e-9 * e_in);

    // modulation-depth closed form
    bool depth_ok = true;
    for (double a : {0.05, 0.08}) {
        RealWaveform w;
        w.sample_rate = 1e8;
        const auto n = static_cast<std::size_t>(6.0 * 1e8 / 50e3);
        w.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            w.samples[i] = 1e-3 * (1.0 + a * std::sin(2.0 * std::numbers::pi *
                                                      50e3 * i / 1e8));
        depth_ok = depth_ok &&
                   std::abs(measure_mod_depth(w, 50e3, 280e3).depth_pct -
                            100.0 * a) <= 0.1;
    }
    check("modulation-depth closed forms (5%, 8%)", depth_ok);

    if (failed == 0) std::printf("selftest passed\n");
    return failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pilot-tone optical link simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    int jobs = 1;
    double power_dbm = 0.0;

    auto* sweep = app.add_subcommand("sweep", "run BER-vs-power sweeps");
    sweep->add_option("config", config_path, "scenario config (TOML)")->required();
    sweep->add_option("--jobs", jobs, "worker threads for sweep points");
    sweep->add_option("--out", out_dir, "output directory");

    auto* eye = app.add_subcommand("eye", "capture eye diagrams");
    eye->add_option("config", config_path, "scenario config (TOML)")->required();
    eye->add_option("--power", power_dbm, "received power, dBm")->required();
    eye->add_option("--out", out_dir, "output directory");

    auto* depth = app.add_subcommand("depth", "calibrate and report pilot depth");
    depth->add_option("config", config_path, "scenario config (TOML)")->required();

    auto* selftest = app.add_subcommand("selftest", "run fast invariant checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) return cmd_sweep(config_path, jobs, out_dir);
        if (eye->parsed()) return cmd_eye(config_path, power_dbm, out_dir);
        if (depth->parsed()) return cmd_depth(config_path);
        if (selftest->parsed()) return cmd_selftest();
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "simulation failure: %s\n", e.what());
        return 2;
    }
    return 0;
}

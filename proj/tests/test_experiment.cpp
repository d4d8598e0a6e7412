#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pilotwave/experiment.hpp"

using namespace pilotwave;

namespace {

/// Back-to-back scenario with noise off and pilot off; scaled pilot
/// frequencies (x10) so short captures still span whole pilot periods.
Scenario base_scenario(ModulationFormat fmt, std::size_t n_bits = 120'000) {
    Scenario sc;
    sc.format = fmt;
    sc.n_bits = n_bits;
    sc.master_seed = 99;
    sc.rx.thermal_noise_density = 0.0;
    sc.rx.shot_noise = false;
    sc.pilot.frequency = 475e3;
    sc.rx.pt_highpass_cutoff = 2.8e6;
    sc.measurement_cutoff = 2.8e6;
    sc.label = format_name(fmt);
    return sc;
}

}  // namespace

TEST_CASE("noiseless transparency: BER is exactly zero for every format") {
    for (auto fmt : {ModulationFormat::NRZ, ModulationFormat::Duobinary,
                     ModulationFormat::PAM4}) {
        const Scenario sc = base_scenario(fmt);
        const auto res = run_capture(sc, -2.0, 0);
        INFO("format " << format_name(fmt));
        REQUIRE_FALSE(res.point.failed);
        CHECK(res.point.errors == 0);
        CHECK(res.point.total_bits >= 100'000);
    }
}

TEST_CASE("noiseless NRZ is immune to an 8% pilot") {
    Scenario sc = base_scenario(ModulationFormat::NRZ);
    sc.pilot.enabled = true;
    sc.pilot_amplitude = 0.08;
    const auto res = run_capture(sc, -2.0, 0);
    REQUIRE_FALSE(res.point.failed);
    CHECK(res.point.errors == 0);
}

TEST_CASE("captures are bit-identical for identical seeds") {
    Scenario sc = base_scenario(ModulationFormat::PAM4);
    sc.rx.thermal_noise_density = 3.1e-10;
    sc.rx.shot_noise = true;
    const auto a = run_capture(sc, 1.0, 3);
    const auto b = run_capture(sc, 1.0, 3);
    REQUIRE_FALSE(a.point.failed);
    CHECK(a.point.errors == b.point.errors);
    CHECK(a.point.total_bits == b.point.total_bits);
}

TEST_CASE("unreachable power target is a failed point, not a crash") {
    const Scenario sc = base_scenario(ModulationFormat::NRZ, 50'000);
    const auto res = run_capture(sc, 30.0, 0);
    CHECK(res.point.failed);
}

TEST_CASE("sweep: noise off means every point is error-free") {
    Scenario sc = base_scenario(ModulationFormat::NRZ, 50'000);
    sc.sweep_powers_dbm = {-6.0, -4.0, -2.0};
    const auto curve = run_ber_sweep(sc);
    REQUIRE(curve.points.size() == 3);
    for (const auto& p : curve.points) {
        CHECK_FALSE(p.failed);
        CHECK(p.errors == 0);
        CHECK(p.low_confidence);  // zero errors floored at 1/total
        CHECK(p.ber == Catch::Approx(1.0 / static_cast<double>(p.total_bits)));
    }
}

TEST_CASE("sweep determinism and monotonicity under noise") {
    Scenario sc = base_scenario(ModulationFormat::NRZ, 200'000);
    sc.rx.thermal_noise_density = 3.1e-10;
    sc.rx.shot_noise = true;
    sc.sweep_powers_dbm = {-9.0, -8.0, -7.0, -6.0, -5.0};
    const auto a = run_ber_sweep(sc);
    const auto b = run_ber_sweep(sc, /*jobs=*/2);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].errors == b.points[i].errors);
        CHECK(a.points[i].total_bits == b.points[i].total_bits);
    }
    for (std::size_t i = 0; i + 1 < a.points.size(); ++i) {
        REQUIRE_FALSE(a.points[i].failed);
        CHECK(a.points[i].errors >= a.points[i + 1].errors);
    }
    // the waterfall must actually fall in this power range
    CHECK(a.points.front().errors > 100 * std::max<std::size_t>(1, a.points.back().errors));
}

TEST_CASE("multiplicative pilot calibration recovers the closed form") {
    Scenario sc = base_scenario(ModulationFormat::NRZ, 120'000);
    sc.pilot.enabled = true;
    SECTION("target 8% gives a near 0.08") {
        const double a = calibrate_pilot_depth(sc, 8.0);
        CHECK(a == Catch::Approx(0.080).margin(0.002));
    }
    SECTION("target 0% gives exactly 0") {
        CHECK(calibrate_pilot_depth(sc, 0.0) == 0.0);
    }
    SECTION("target 5% closed loop lands in [4.9, 5.1]") {
        const double a = calibrate_pilot_depth(sc, 5.0);
        const double depth = measure_pilot_depth(sc, a);
        CHECK(depth >= 4.9);
        CHECK(depth <= 5.1);
    }
}

TEST_CASE("bias-port pilot calibrates to depth as well") {
    Scenario sc = base_scenario(ModulationFormat::PAM4, 120'000);
    sc.pilot.enabled = true;
    sc.pilot.injection = PilotInjection::MzmBias;
    sc.pilot.bias_offset = 1.55;
    sc.mzm.bias += 1.55;
    const double a = calibrate_pilot_depth(sc, 8.0);
    CHECK(a > 0.0);
    CHECK(a < sc.mzm.v_pi);
    CHECK(measure_pilot_depth(sc, a) == Catch::Approx(8.0).margin(0.2));
}

TEST_CASE("scaled and full pilot frequencies agree on measured depth") {
    // Same multiplicative amplitude, pilot/cutoff scaled together by 10x.
    auto depth_with = [](double pilot_freq, double cutoff) {
        Scenario sc = base_scenario(ModulationFormat::NRZ);
        sc.pilot.enabled = true;
        sc.pilot.frequency = pilot_freq;
        sc.measurement_cutoff = cutoff;
        return measure_pilot_depth(sc, 0.08);
    };
    const double scaled = depth_with(475e3, 2.8e6);
    const double full = depth_with(47.5e3, 280e3);
    CHECK(std::abs(scaled - full) <= 0.2);
}

TEST_CASE("scenario validation") {
    Scenario sc = base_scenario(ModulationFormat::PAM4, 100'001);
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);  // odd PAM4 bits
    sc = base_scenario(ModulationFormat::NRZ, 500);
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);  // too few bits
    sc = base_scenario(ModulationFormat::NRZ, 50'000);
    sc.pilot.enabled = true;  // < 2 pilot periods at 475 kHz needs 105k bits
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
}

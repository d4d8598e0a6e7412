#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "pilotwave/filter.hpp"

using namespace pilotwave;

namespace {

RealWaveform sinusoid(double freq, double fs, std::size_t n, double amp = 1.0) {
    RealWaveform w;
    w.sample_rate = fs;
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        w.samples[i] = amp * std::sin(2.0 * std::numbers::pi * freq * i / fs);
    return w;
}

/// Steady-state amplitude of a filtered sinusoid (skip the first half).
double steady_amplitude(const RealWaveform& w) {
    double peak = 0.0;
    for (std::size_t i = w.samples.size() / 2; i < w.samples.size(); ++i)
        peak = std::max(peak, std::abs(w.samples[i]));
    return peak;
}

}  // namespace

TEST_CASE("bessel lowpass anchors -3 dB at the requested cutoff") {
    const auto f = design_filter(FilterKind::BesselLowpass, 5, 11.5e9, 50e9);
    CHECK(f.magnitude_db(11.5e9) == Catch::Approx(-3.0).margin(0.1));
    CHECK(f.magnitude_db(0.0) == Catch::Approx(0.0).margin(0.01));
    // spec'd rolloff at 2x cutoff (warping makes it steeper near Nyquist)
    CHECK(f.magnitude_db(23e9) < -12.0);
    // analog 5th-order Bessel prototype at 2x the -3 dB point: -14.06 dB;
    // verify against a design where 23 GHz sits far from Nyquist
    const auto f_hi = design_filter(FilterKind::BesselLowpass, 5, 11.5e9, 400e9);
    CHECK(f_hi.magnitude_db(23e9) == Catch::Approx(-14.06).margin(0.3));
}

TEST_CASE("butterworth highpass anchors -3 dB and kills DC") {
    const auto f = design_filter(FilterKind::ButterworthHighpass, 2, 280e3, 100e9);
    CHECK(f.magnitude_db(280e3) == Catch::Approx(-3.0).margin(0.1));
    CHECK(std::abs(f.response(0.0)) < 1e-9);
    // residual at the pilot frequency: analog value 3.187%
    CHECK(std::abs(f.response(50e3)) == Catch::Approx(0.031872).margin(5e-4));
}

TEST_CASE("measured -3 dB frequency within 1% of requested for all kinds") {
    struct Case { FilterKind kind; int order; double fc; double fs; };
    const Case cases[] = {
        {FilterKind::BesselLowpass, 5, 11.5e9, 50e9},
        {FilterKind::BesselLowpass, 4, 28e9, 100e9},
        {FilterKind::BesselLowpass, 5, 7e9, 100e9},
        {FilterKind::ButterworthHighpass, 2, 280e3, 100e9},
        {FilterKind::ButterworthHighpass, 2, 2.8e6, 100e9},
    };
    const double target = std::pow(10.0, -3.0 / 20.0);
    for (const auto& c : cases) {
        const auto f = design_filter(c.kind, c.order, c.fc, c.fs);
        // bisect the magnitude for the -3 dB crossing
        double lo = c.fc / 10.0, hi = std::min(c.fc * 10.0, c.fs / 2.0 * 0.999);
        const bool lowpass = c.kind == FilterKind::BesselLowpass;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            const bool above = std::abs(f.response(mid)) > target;
            if (above == lowpass)
                lo = mid;
            else
                hi = mid;
        }
        const double f3 = 0.5 * (lo + hi);
        INFO("kind " << static_cast<int>(c.kind) << " fc " << c.fc);
        CHECK(f3 == Catch::Approx(c.fc).epsilon(0.01));
    }
}

TEST_CASE("filter passivity over a 4096-point grid") {
    const auto filters = {
        design_filter(FilterKind::BesselLowpass, 5, 11.5e9, 50e9),
        design_filter(FilterKind::BesselLowpass, 4, 28e9, 100e9),
        design_filter(FilterKind::ButterworthHighpass, 2, 280e3, 100e9),
    };
    for (const auto& f : filters) {
        double peak = 0.0;
        for (int k = 0; k < 4096; ++k) {
            const double freq = f.design_rate / 2.0 * k / 4096.0;
            peak = std::max(peak, std::abs(f.response(freq)));
        }
        CHECK(peak <= 1.0 + 1e-6);
    }
}

TEST_CASE("apply_filter passes constants and scales the cutoff sinusoid") {
    const double fs = 50e9;
    const auto f = design_filter(FilterKind::BesselLowpass, 5, 11.5e9, fs);

    RealWaveform dc;
    dc.sample_rate = fs;
    dc.samples.assign(20000, 0.7);
    const auto y = apply_filter(f, dc);
    REQUIRE(y.samples.size() == dc.samples.size());
    CHECK(y.samples.back() == Catch::Approx(0.7).epsilon(1e-6));

    const auto sine = sinusoid(11.5e9, fs, 40000);
    const double ratio = steady_amplitude(apply_filter(f, sine));
    CHECK(ratio == Catch::Approx(std::pow(10.0, -3.0 / 20.0)).epsilon(0.01));
}

TEST_CASE("apply_filter is linear") {
    const double fs = 50e9;
    const auto f = design_filter(FilterKind::BesselLowpass, 5, 11.5e9, fs);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    RealWaveform x, ywave, combo;
    x.sample_rate = ywave.sample_rate = combo.sample_rate = fs;
    const std::size_t n = 4096;
    x.samples.resize(n);
    ywave.samples.resize(n);
    combo.samples.resize(n);
    const double a = 2.5, b = -0.7;
    for (std::size_t i = 0; i < n; ++i) {
        x.samples[i] = uni(rng);
        ywave.samples[i] = uni(rng);
        combo.samples[i] = a * x.samples[i] + b * ywave.samples[i];
    }
    const auto fx = apply_filter(f, x);
    const auto fy = apply_filter(f, ywave);
    const auto fc = apply_filter(f, combo);
    double ref = 0.0;
    for (double v : fc.samples) ref = std::max(ref, std::abs(v));
    for (std::size_t i = 0; i < n; ++i) {
        const double lin = a * fx.samples[i] + b * fy.samples[i];
        REQUIRE(std::abs(fc.samples[i] - lin) <= 1e-9 * std::max(1.0, ref));
    }
}

TEST_CASE("brickwall removes all energy above cutoff") {
    const double fs = 50e9;
    const auto f = design_filter(FilterKind::BrickwallLowpass, 1, 5e9, fs);
    RealWaveform impulse;
    impulse.sample_rate = fs;
    impulse.samples.assign(4096, 0.0);
    impulse.samples[100] = 1.0;
    const auto y = apply_filter(f, impulse);

    std::vector<std::complex<double>> spec(y.samples.begin(), y.samples.end());
    fft::forward(spec);
    double above = 0.0, total = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double e = std::norm(spec[k]);
        total += e;
        if (std::abs(fft::bin_frequency(k, spec.size(), fs)) > 5e9) above += e;
    }
    CHECK(above <= 1e-12 * total);
}

TEST_CASE("design_filter rejects invalid requests") {
    CHECK_THROWS_AS(design_filter(FilterKind::BesselLowpass, 5, 30e9, 50e9),
                    std::invalid_argument);
    CHECK_THROWS_AS(design_filter(FilterKind::BesselLowpass, 0, 1e9, 50e9),
                    std::invalid_argument);
    CHECK_THROWS_AS(design_filter(FilterKind::BesselLowpass, 5, -1e9, 50e9),
                    std::invalid_argument);
}

TEST_CASE("apply_filter rejects a rate mismatch") {
    const auto f = design_filter(FilterKind::BesselLowpass, 5, 11.5e9, 50e9);
    RealWaveform w;
    w.sample_rate = 40e9;
    w.samples.assign(128, 0.0);
    CHECK_THROWS_AS(apply_filter(f, w), std::invalid_argument);
}

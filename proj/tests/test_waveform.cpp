#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gripsim/vec2.hpp"
#include "gripsim/waveform.hpp"

using namespace gripsim;

namespace {

// Zero crossing times of a sampled buffer, by linear interpolation between
// samples of opposite sign. Used as an independent check of chirp phase.
std::vector<double> zero_crossings(const SampleBuffer& buf) {
    std::vector<double> times;
    for (std::size_t k = 1; k < buf.samples.size(); ++k) {
        const double a = buf.samples[k - 1];
        const double b = buf.samples[k];
        if ((a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0)) {
            const double frac = a / (a - b);
            times.push_back((static_cast<double>(k - 1) + frac) / buf.sample_rate);
        }
    }
    return times;
}

// Analytic cycle count of a linear chirp between two times.
double chirp_cycles(double f0, double f1, double total, double t0, double t1) {
    auto cycles = [&](double t) { return f0 * t + (f1 - f0) * t * t / (2.0 * total); };
    return cycles(t1) - cycles(t0);
}

} // namespace

TEST_CASE("volume maps linearly to displacement amplitude") {
    CHECK(volume_to_amplitude(0.0) == doctest::Approx(0.0));
    CHECK(volume_to_amplitude(100.0) == doctest::Approx(0.5));
    CHECK(volume_to_amplitude(150.0) == doctest::Approx(0.75));
    CHECK(volume_to_amplitude(100.0, 1.25) == doctest::Approx(1.25));
    CHECK_THROWS_AS(volume_to_amplitude(-1.0), std::domain_error);
    CHECK_THROWS_AS(volume_to_amplitude(200.5), std::domain_error);
}

TEST_CASE("spec validation rejects malformed descriptions") {
    CHECK_THROWS_AS(WaveformSpec::tone(0.0, 150.0, 25.0), std::invalid_argument);
    CHECK_THROWS_AS(WaveformSpec::tone(200.0, 250.0, 25.0), std::invalid_argument);
    CHECK_THROWS_AS(WaveformSpec::tone(200.0, 150.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(WaveformSpec::pulse_train(100.0, 800.0, 150.0, 1.0, 25.5),
                    std::invalid_argument);
    CHECK_NOTHROW(WaveformSpec::pulse_train(100.0, 800.0, 150.0, 1.0, 25.0));
    WaveformSpec bad = WaveformSpec::tone(200.0, 150.0, 25.0);
    bad.f_end = 300.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("tone sample starts at zero phase") {
    const auto spec = WaveformSpec::tone(200.0, 150.0, 25.0);
    CHECK(sample(spec, 0.0) == doctest::Approx(0.0));
    // quarter period of 200 Hz: peak at full amplitude
    CHECK(sample(spec, 1.0 / 800.0) == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("sweep instantaneous frequency is the linear midpoint") {
    const auto spec = WaveformSpec::sweep(100.0, 200.0, 150.0, 25.0);
    CHECK(instantaneous_frequency(spec, 12.5) == doctest::Approx(150.0));
    CHECK(instantaneous_frequency(spec, 0.0) == doctest::Approx(100.0));
    CHECK(instantaneous_frequency(spec, 25.0) == doctest::Approx(200.0));
}

TEST_CASE("pulse train resets frequency at each segment boundary") {
    const auto spec = WaveformSpec::pulse_train(100.0, 800.0, 150.0, 1.0, 25.0);
    const double just_after = std::nextafter(1.0, 2.0);
    CHECK(instantaneous_frequency(spec, just_after) == doctest::Approx(100.0).epsilon(1e-6));
    CHECK(instantaneous_frequency(spec, 0.5) == doctest::Approx(450.0));
    CHECK(instantaneous_frequency(spec, 1.5) == doctest::Approx(450.0));
}

TEST_CASE("sample rejects out-of-range times") {
    const auto spec = WaveformSpec::tone(200.0, 150.0, 25.0);
    CHECK_THROWS_AS(sample(spec, -0.001), std::domain_error);
    CHECK_THROWS_AS(sample(spec, 25.001), std::domain_error);
    CHECK_NOTHROW(sample(spec, 25.0));
}

TEST_CASE("synthesize length and Nyquist guard") {
    const auto spec = WaveformSpec::tone(200.0, 150.0, 1.0);
    const auto buf = synthesize(spec, 8000.0);
    CHECK(buf.samples.size() == 8000);
    CHECK(buf.sample_rate == doctest::Approx(8000.0));
    for (double s : buf.samples) CHECK(std::isfinite(s));
    CHECK_THROWS_AS(synthesize(spec, 700.0), std::invalid_argument);
}

TEST_CASE("zero volume synthesizes an all-zero buffer") {
    const auto spec = WaveformSpec::tone(200.0, 0.0, 1.0);
    const auto buf = synthesize(spec, 8000.0);
    for (double s : buf.samples) CHECK(s == 0.0);
    CHECK(rms(buf) == doctest::Approx(0.0));
}

TEST_CASE("buffer entries equal pointwise samples") {
    const auto spec = WaveformSpec::sweep(100.0, 400.0, 150.0, 2.0);
    const auto buf = synthesize(spec, 4000.0);
    for (std::size_t k = 0; k < buf.samples.size(); k += 97)
        CHECK(buf.samples[k] ==
              doctest::Approx(sample(spec, static_cast<double>(k) / 4000.0)).epsilon(1e-12));
}

TEST_CASE("downward sweep zero-crossing spacing matches the analytic chirp rate") {
    const auto spec = WaveformSpec::sweep(100.0, 1.0, 150.0, 25.0);
    const auto buf = synthesize(spec, 8000.0);
    const auto zc = zero_crossings(buf);
    REQUIRE(zc.size() > 100);
    // spacing between consecutive crossings must grow as frequency falls
    double prev_gap = zc[1] - zc[0];
    std::size_t grow = 0;
    for (std::size_t i = 2; i < zc.size(); ++i) {
        const double gap = zc[i] - zc[i - 1];
        if (gap >= prev_gap - 1e-9) ++grow;
        prev_gap = gap;
    }
    CHECK(static_cast<double>(grow) / static_cast<double>(zc.size() - 2) > 0.99);
    // crossing counts per 1 s window track twice the analytic cycle count
    for (double t0 = 0.0; t0 < 24.0; t0 += 4.0) {
        const double t1 = t0 + 1.0;
        std::size_t count = 0;
        for (double t : zc)
            if (t >= t0 && t < t1) ++count;
        const double expected = 2.0 * chirp_cycles(100.0, 1.0, 25.0, t0, t1);
        CHECK(static_cast<double>(count) == doctest::Approx(expected).epsilon(0.03));
    }
}

TEST_CASE("finite-difference phase slope matches the linear frequency ramp") {
    const auto spec = WaveformSpec::sweep(100.0, 800.0, 150.0, 25.0);
    const double h = 1e-7;
    for (double t = 0.5; t < 25.0; t += 3.1) {
        const double df = (phase_at(spec, t + h) - phase_at(spec, t - h)) / (2.0 * h * 2.0 * kPi);
        CHECK(df == doctest::Approx(instantaneous_frequency(spec, t)).epsilon(0.01));
    }
}

TEST_CASE("pulse train is segment periodic at constant volume") {
    const auto spec = WaveformSpec::pulse_train(100.0, 800.0, 150.0, 1.0, 25.0);
    for (double t = 0.0; t < 1.0; t += 0.0137)
        CHECK(sample(spec, t) == doctest::Approx(sample(spec, t + 1.0)).epsilon(1e-12));
    for (double t = 0.0; t < 1.0; t += 0.0137)
        CHECK(sample(spec, t) == doctest::Approx(sample(spec, t + 7.0)).epsilon(1e-12));
}

TEST_CASE("volume ramp interpolates amplitude over the envelope") {
    const auto spec = WaveformSpec::volume_sweep(200.0, 0.0, 150.0, 25.0);
    CHECK(instantaneous_volume(spec, 0.0) == doctest::Approx(0.0));
    CHECK(instantaneous_volume(spec, 12.5) == doctest::Approx(75.0));
    CHECK(instantaneous_volume(spec, 25.0) == doctest::Approx(150.0));
    CHECK(instantaneous_frequency(spec, 12.5) == doctest::Approx(200.0));
    // volume pulse train resets the ramp each segment
    const auto pt = WaveformSpec::volume_pulse_train(200.0, 75.0, 0.0, 1.0, 25.0);
    CHECK(instantaneous_volume(pt, 0.25) == doctest::Approx(instantaneous_volume(pt, 3.25)));
}

TEST_CASE("rms of integer-period unit sine is 1/sqrt(2)") {
    WaveformSpec spec = WaveformSpec::tone(200.0, 100.0, 1.0);
    auto buf = synthesize(spec, 8000.0, 1.0); // reference 1 mm at 100% -> unit amplitude
    CHECK(rms(buf) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));

    SampleBuffer zeros{1000.0, std::vector<double>(100, 0.0)};
    CHECK(rms(zeros) == doctest::Approx(0.0));
    SampleBuffer constant{1000.0, std::vector<double>(100, -0.4)};
    CHECK(rms(constant) == doctest::Approx(0.4));
    SampleBuffer empty{1000.0, {}};
    CHECK_THROWS_AS(rms(empty), std::domain_error);
}

TEST_CASE("tone rms is frequency invariant at fixed volume") {
    const double freqs[] = {10.0, 25.0, 50.0, 100.0, 150.0, 200.0,
                            300.0, 400.0, 500.0, 600.0, 700.0, 800.0};
    const double ref = rms(synthesize(WaveformSpec::tone(200.0, 150.0, 1.0), 48000.0));
    for (double f : freqs) {
        const double r = rms(synthesize(WaveformSpec::tone(f, 150.0, 1.0), 48000.0));
        CHECK(r == doctest::Approx(ref).epsilon(0.005));
    }
}

TEST_CASE("waveform kind round-trips through names") {
    for (auto kind : {WaveformKind::Tone, WaveformKind::Sweep, WaveformKind::PulseTrain,
                      WaveformKind::VolumeSweep, WaveformKind::VolumePulseTrain})
        CHECK(waveform_kind_from_string(to_string(kind)) == kind);
    CHECK_THROWS_AS(waveform_kind_from_string("Triangle"), std::invalid_argument);
}

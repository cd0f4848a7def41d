#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gripsim {

// Excitation signal families used by the test matrix. Sweeps are single long
// chirps, pulse trains are short chirps played back to back with a phase
// reset at every segment boundary. Volume variants ramp amplitude instead of
// frequency.
enum class WaveformKind { Tone, Sweep, PulseTrain, VolumeSweep, VolumePulseTrain };

const char* to_string(WaveformKind kind);
WaveformKind waveform_kind_from_string(const std::string& s);

// Exciter plate displacement at 100% volume, in mm.
inline constexpr double kReferenceAmplitudeMm = 0.5;

struct WaveformSpec {
    WaveformKind kind = WaveformKind::Tone;
    double f_start = 200.0;        // Hz
    double f_end = 200.0;          // Hz
    double volume_start = 150.0;   // percent, 0..200
    double volume_end = 150.0;     // percent
    double total_duration = 25.0;  // s
    double segment_duration = 0.0; // s, pulse trains only

    // Throws std::invalid_argument when a field combination is inconsistent.
    void validate() const;

    bool is_pulse_train() const {
        return kind == WaveformKind::PulseTrain || kind == WaveformKind::VolumePulseTrain;
    }
    // Length of one chirp/ramp envelope: the segment for pulse trains, the
    // whole signal otherwise.
    double envelope_duration() const {
        return is_pulse_train() ? segment_duration : total_duration;
    }
    bool is_silent() const { return volume_start == 0.0 && volume_end == 0.0; }

    static WaveformSpec tone(double freq_hz, double volume_pct, double duration_s = 25.0);
    static WaveformSpec sweep(double f0_hz, double f1_hz, double volume_pct, double duration_s = 25.0);
    static WaveformSpec pulse_train(double f0_hz, double f1_hz, double volume_pct,
                                    double segment_s = 1.0, double duration_s = 25.0);
    static WaveformSpec volume_sweep(double freq_hz, double v0_pct, double v1_pct,
                                     double duration_s = 25.0);
    static WaveformSpec volume_pulse_train(double freq_hz, double v0_pct, double v1_pct,
                                           double segment_s = 1.0, double duration_s = 25.0);
};

struct SampleBuffer {
    double sample_rate = 0.0; // Hz
    std::vector<double> samples;
};

// Maps the "volume %" control to exciter plate displacement (mm), linearly:
// 0% -> 0 mm, 100% -> reference_mm. Throws std::domain_error outside [0,200].
double volume_to_amplitude(double volume_pct, double reference_mm = kReferenceAmplitudeMm);

// Accumulated chirp phase in radians at time t (within the active segment for
// pulse trains; phase resets at segment boundaries).
double phase_at(const WaveformSpec& spec, double t);

// Linear instantaneous frequency (Hz) and volume (%) at time t.
double instantaneous_frequency(const WaveformSpec& spec, double t);
double instantaneous_volume(const WaveformSpec& spec, double t);

// Displacement (mm) at time t. Throws std::domain_error for t outside
// [0, total_duration].
double sample(const WaveformSpec& spec, double t, double reference_mm = kReferenceAmplitudeMm);

// Discretizes the signal: entry k equals sample(spec, k / sample_rate).
// Requires sample_rate >= 4 * max(f_start, f_end); throws
// std::invalid_argument otherwise.
SampleBuffer synthesize(const WaveformSpec& spec, double sample_rate,
                        double reference_mm = kReferenceAmplitudeMm);

// Root mean square of the buffer. Throws std::domain_error on empty input.
double rms(const SampleBuffer& buffer);

} // namespace gripsim

#include "gripsim/waveform.hpp"

#include <cmath>
#include <stdexcept>

#include "gripsim/vec2.hpp"

namespace gripsim {

const char* to_string(WaveformKind kind) {
    switch (kind) {
    case WaveformKind::Tone: return "Tone";
    case WaveformKind::Sweep: return "Sweep";
    case WaveformKind::PulseTrain: return "PulseTrain";
    case WaveformKind::VolumeSweep: return "VolumeSweep";
    case WaveformKind::VolumePulseTrain: return "VolumePulseTrain";
    }
    return "Tone";
}

WaveformKind waveform_kind_from_string(const std::string& s) {
    if (s == "Tone") return WaveformKind::Tone;
    if (s == "Sweep") return WaveformKind::Sweep;
    if (s == "PulseTrain") return WaveformKind::PulseTrain;
    if (s == "VolumeSweep") return WaveformKind::VolumeSweep;
    if (s == "VolumePulseTrain") return WaveformKind::VolumePulseTrain;
    throw std::invalid_argument("unknown waveform kind: " + s);
}

void WaveformSpec::validate() const {
    if (!(f_start > 0.0) || !(f_end > 0.0))
        throw std::invalid_argument("waveform frequencies must be positive");
    if (volume_start < 0.0 || volume_start > 200.0 || volume_end < 0.0 || volume_end > 200.0)
        throw std::invalid_argument("waveform volume must lie in [0, 200] percent");
    if (!(total_duration > 0.0))
        throw std::invalid_argument("waveform total_duration must be positive");
    if (is_pulse_train()) {
        if (!(segment_duration > 0.0))
            throw std::invalid_argument("pulse train requires positive segment_duration");
        const double ratio = total_duration / segment_duration;
        if (std::fabs(ratio - std::round(ratio)) > 1e-9)
            throw std::invalid_argument(
                "pulse train total_duration must be an integer multiple of segment_duration");
    }
    if (kind == WaveformKind::Tone && (f_start != f_end || volume_start != volume_end))
        throw std::invalid_argument("tone requires constant frequency and volume");
    if ((kind == WaveformKind::VolumeSweep || kind == WaveformKind::VolumePulseTrain) &&
        f_start != f_end)
        throw std::invalid_argument("volume ramps hold frequency constant");
}

WaveformSpec WaveformSpec::tone(double freq_hz, double volume_pct, double duration_s) {
    WaveformSpec s;
    s.kind = WaveformKind::Tone;
    s.f_start = s.f_end = freq_hz;
    s.volume_start = s.volume_end = volume_pct;
    s.total_duration = duration_s;
    s.validate();
    return s;
}

WaveformSpec WaveformSpec::sweep(double f0_hz, double f1_hz, double volume_pct, double duration_s) {
    WaveformSpec s;
    s.kind = WaveformKind::Sweep;
    s.f_start = f0_hz;
    s.f_end = f1_hz;
    s.volume_start = s.volume_end = volume_pct;
    s.total_duration = duration_s;
    s.validate();
    return s;
}

WaveformSpec WaveformSpec::pulse_train(double f0_hz, double f1_hz, double volume_pct,
                                       double segment_s, double duration_s) {
    WaveformSpec s;
    s.kind = WaveformKind::PulseTrain;
    s.f_start = f0_hz;
    s.f_end = f1_hz;
    s.volume_start = s.volume_end = volume_pct;
    s.segment_duration = segment_s;
    s.total_duration = duration_s;
    s.validate();
    return s;
}

WaveformSpec WaveformSpec::volume_sweep(double freq_hz, double v0_pct, double v1_pct,
                                        double duration_s) {
    WaveformSpec s;
    s.kind = WaveformKind::VolumeSweep;
    s.f_start = s.f_end = freq_hz;
    s.volume_start = v0_pct;
    s.volume_end = v1_pct;
    s.total_duration = duration_s;
    s.validate();
    return s;
}

WaveformSpec WaveformSpec::volume_pulse_train(double freq_hz, double v0_pct, double v1_pct,
                                              double segment_s, double duration_s) {
    WaveformSpec s;
    s.kind = WaveformKind::VolumePulseTrain;
    s.f_start = s.f_end = freq_hz;
    s.volume_start = v0_pct;
    s.volume_end = v1_pct;
    s.segment_duration = segment_s;
    s.total_duration = duration_s;
    s.validate();
    return s;
}

double volume_to_amplitude(double volume_pct, double reference_mm) {
    if (volume_pct < 0.0 || volume_pct > 200.0)
        throw std::domain_error("volume percent outside [0, 200]");
    return volume_pct / 100.0 * reference_mm;
}

namespace {

void check_time(const WaveformSpec& spec, double t) {
    if (!(t >= 0.0) || t > spec.total_duration)
        throw std::domain_error("sample time outside [0, total_duration]");
}

// Time within the active envelope. For pulse trains t is folded into the
// segment; exact multiples of the segment fold to 0 (start of next segment).
double envelope_time(const WaveformSpec& spec, double t) {
    if (!spec.is_pulse_train()) return t;
    return std::fmod(t, spec.segment_duration);
}

} // namespace

double phase_at(const WaveformSpec& spec, double t) {
    check_time(spec, t);
    const double seg = spec.envelope_duration();
    const double tau = envelope_time(spec, t);
    return 2.0 * kPi * (spec.f_start * tau + (spec.f_end - spec.f_start) * tau * tau / (2.0 * seg));
}

double instantaneous_frequency(const WaveformSpec& spec, double t) {
    check_time(spec, t);
    const double seg = spec.envelope_duration();
    const double tau = envelope_time(spec, t);
    return spec.f_start + (spec.f_end - spec.f_start) * (tau / seg);
}

double instantaneous_volume(const WaveformSpec& spec, double t) {
    check_time(spec, t);
    const double seg = spec.envelope_duration();
    const double tau = envelope_time(spec, t);
    return spec.volume_start + (spec.volume_end - spec.volume_start) * (tau / seg);
}

double sample(const WaveformSpec& spec, double t, double reference_mm) {
    const double amplitude = volume_to_amplitude(instantaneous_volume(spec, t), reference_mm);
    return amplitude * std::sin(phase_at(spec, t));
}

SampleBuffer synthesize(const WaveformSpec& spec, double sample_rate, double reference_mm) {
    spec.validate();
    const double f_max = std::max(spec.f_start, spec.f_end);
    if (!(sample_rate >= 4.0 * f_max))
        throw std::invalid_argument("sample_rate must be at least 4x the maximum frequency");
    SampleBuffer buf;
    buf.sample_rate = sample_rate;
    const auto n = static_cast<std::size_t>(std::llround(spec.total_duration * sample_rate));
    buf.samples.resize(n);
    for (std::size_t k = 0; k < n; ++k)
        buf.samples[k] = sample(spec, static_cast<double>(k) / sample_rate, reference_mm);
    return buf;
}

double rms(const SampleBuffer& buffer) {
    if (buffer.samples.empty())
        throw std::domain_error("rms of empty buffer");
    double sum_sq = 0.0;
    for (double s : buffer.samples) sum_sq += s * s;
    return std::sqrt(sum_sq / static_cast<double>(buffer.samples.size()));
}

} // namespace gripsim

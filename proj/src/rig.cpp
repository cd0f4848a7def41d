#include "gripsim/rig.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gripsim {

const char* phase_name(Phase p) {
    switch (p) {
    case Phase::PreGrip: return "pregrip";
    case Phase::Descend: return "descend";
    case Phase::Dwell: return "dwell";
    case Phase::Vacuum: return "vacuum";
    case Phase::Lift: return "lift";
    case Phase::Release: return "release";
    case Phase::Done: return "done";
    }
    return "?";
}

void GripCycleConfig::validate() const {
    if (!(push_height < lift_height && lift_height < start_height))
        throw std::invalid_argument("heights must satisfy push < lift < start");
    if (!(axis_speed > 0.0))
        throw std::invalid_argument("axis_speed must be positive");
    const double durations[] = {vacuum_hold,        after_pushdown_duration,
                                release_pulse_duration, pregrip_duration,
                                pregrip_shake_duration, dwell_duration,
                                sample_period};
    for (double d : durations)
        if (!(d > 0.0)) throw std::invalid_argument("durations must be positive");
    if (release_pulse_gap < 0.0 || lift_hold < 0.0)
        throw std::invalid_argument("pauses must be non-negative");
    if (release_pulse_count < 0)
        throw std::invalid_argument("release_pulse_count must be non-negative");
    if (pregrip_shake_duration > pregrip_duration)
        throw std::invalid_argument("shake cannot outlast the pregrip hold");
}

double ForceTrace::mark_time(Phase p) const {
    for (const PhaseMark& m : marks)
        if (m.phase == p) return m.t;
    return -1.0;
}

namespace {

double phase_duration(Phase p, const GripCycleConfig& cfg) {
    switch (p) {
    case Phase::PreGrip: return cfg.pregrip_duration;
    case Phase::Descend: return (cfg.start_height - cfg.push_height) / cfg.axis_speed;
    case Phase::Dwell:
        return cfg.vibration_window == VibrationWindow::AfterPushdown
                   ? cfg.after_pushdown_duration
                   : cfg.dwell_duration;
    case Phase::Vacuum: return cfg.vacuum_hold;
    case Phase::Lift:
        return (cfg.lift_height - cfg.push_height) / cfg.axis_speed + cfg.lift_hold;
    case Phase::Release:
        return cfg.release_pulse_count *
               (cfg.release_pulse_duration + cfg.release_pulse_gap);
    case Phase::Done: return 0.0;
    }
    return 0.0;
}

double mount_height_at(Phase p, double phase_t, const GripCycleConfig& cfg) {
    switch (p) {
    case Phase::PreGrip: return cfg.start_height;
    case Phase::Descend:
        return std::max(cfg.push_height, cfg.start_height - cfg.axis_speed * phase_t);
    case Phase::Dwell:
    case Phase::Vacuum: return cfg.push_height;
    case Phase::Lift:
        return std::min(cfg.lift_height, cfg.push_height + cfg.axis_speed * phase_t);
    case Phase::Release:
    case Phase::Done: return cfg.lift_height;
    }
    return cfg.start_height;
}

double oscillation_at(Phase p, double phase_t, const GripCycleConfig& cfg,
                      const WaveformSpec& wf) {
    if (wf.is_silent()) return 0.0;
    switch (p) {
    case Phase::PreGrip:
        if (phase_t < cfg.pregrip_shake_duration)
            return volume_to_amplitude(cfg.pregrip_shake_volume) *
                   std::sin(2.0 * kPi * cfg.pregrip_shake_freq * phase_t);
        return 0.0;
    case Phase::Descend:
        return cfg.vibration_window == VibrationWindow::DuringDescent
                   ? sample(wf, phase_t)
                   : 0.0;
    case Phase::Dwell:
        return cfg.vibration_window == VibrationWindow::AfterPushdown
                   ? sample(wf, phase_t)
                   : 0.0;
    case Phase::Release: {
        const double period = cfg.release_pulse_duration + cfg.release_pulse_gap;
        const int k = static_cast<int>(std::floor(phase_t / period));
        const double in_pulse = phase_t - k * period;
        if (k < cfg.release_pulse_count && in_pulse < cfg.release_pulse_duration)
            return volume_to_amplitude(cfg.release_volume) *
                   std::sin(2.0 * kPi * cfg.release_vibration_freq * in_pulse);
        return 0.0;
    }
    default: return 0.0;
    }
}

} // namespace

RigState advance(const RigState& state, const GripCycleConfig& cfg,
                 const WaveformSpec& wf, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    RigState s = state;
    s.elapsed += dt;
    s.phase_elapsed += dt;
    while (s.phase != Phase::Done) {
        const double dur = phase_duration(s.phase, cfg);
        if (s.phase_elapsed < dur) break;
        s.phase_elapsed -= dur; // overshoot carries over, boundaries stay exact
        s.phase = static_cast<Phase>(static_cast<int>(s.phase) + 1);
    }
    s.mount_height = mount_height_at(s.phase, s.phase_elapsed, cfg);
    s.mount_oscillation_offset = oscillation_at(s.phase, s.phase_elapsed, cfg, wf);
    return s;
}

namespace {

void apply_tare(ForceTrace& trace, const GripCycleConfig& cfg) {
    const double t_end = cfg.pregrip_duration;
    const double t_begin = t_end - std::min(0.05, cfg.pregrip_duration * 0.5);
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [t, f] : trace.entries) {
        if (t < t_begin || t > t_end) continue;
        sum += f;
        ++n;
    }
    if (n == 0) return;
    const double tare = sum / static_cast<double>(n);
    for (auto& e : trace.entries) e.second -= tare;
}

} // namespace

ForceTrace run_grip_cycle(GrainWorld& world, const GripCycleConfig& cfg,
                          const WaveformSpec& wf, const PressureState& vacuum,
                          Phase stop_after) {
    cfg.validate();
    wf.validate();
    vacuum.validate();

    const double dt = world.dt();
    const long decim = std::max(1L, std::lround(cfg.sample_period / dt));

    RigState st;
    st.phase = Phase::PreGrip;
    st.mount_height = cfg.start_height;
    world.set_mount(st.mount_height, 0.0);
    world.set_delta_p(0.0);

    ForceTrace trace;
    trace.sample_period = dt * static_cast<double>(decim);
    trace.marks.push_back({Phase::PreGrip, 0.0});

    // The 10 s vacuum hold is static once the pack stops creeping; from there
    // the state is a fixed point of step(), so we only advance the clock.
    bool frozen = false;
    const double freeze_speed = 0.5; // mm/s

    long step_idx = 0;
    try {
        while (st.phase != Phase::Done) {
            const Phase prev = st.phase;
            st = advance(st, cfg, wf, dt);
            if (st.phase != prev) {
                trace.marks.push_back({st.phase, st.elapsed - st.phase_elapsed});
                frozen = false;
                if (prev == stop_after) break;
            }

            switch (st.phase) {
            case Phase::Vacuum:
                world.set_delta_p(effective_delta_p(vacuum, st.phase_elapsed));
                break;
            case Phase::Lift:
                world.set_delta_p(effective_delta_p(vacuum, cfg.vacuum_hold));
                break;
            case Phase::Release:
            case Phase::Done:
                world.set_delta_p(
                    effective_delta_p(vacuum, cfg.vacuum_hold) *
                    std::max(0.0, 1.0 - st.phase_elapsed / 0.2));
                break;
            default: break;
            }

            world.set_mount(st.mount_height, st.mount_oscillation_offset);

            if (frozen) {
                world.advance_time_frozen(dt);
            } else {
                world.step();
                const bool holdable =
                    (st.phase == Phase::Vacuum &&
                     st.phase_elapsed > vacuum.ramp_time + 0.5) ||
                    (st.phase == Phase::PreGrip &&
                     st.phase_elapsed > cfg.pregrip_shake_duration + 0.2);
                if (holdable && (step_idx & 63) == 0 &&
                    world.max_speed() < freeze_speed)
                    frozen = true;
            }

            ++step_idx;
            if (step_idx % decim == 0) {
                trace.entries.emplace_back(st.elapsed, world.load_cell());
                trace.kinematics.push_back(
                    {st.elapsed, st.mount_height, st.mount_oscillation_offset});
            }
        }
    } catch (BlowupError& e) {
        throw BlowupError(std::string(e.what()) + " during " + phase_name(st.phase),
                          e.step_index);
    }
    apply_tare(trace, cfg);
    return trace;
}

ForceTrace relaxation_protocol(GrainWorld& world, double push_height, bool vibrate,
                               const GripCycleConfig& cfg) {
    if (!(push_height >= 27.0 && push_height <= 70.0))
        throw std::invalid_argument("push_height must lie in [27, 70] mm");

    const double dt = world.dt();
    const long decim = std::max(1L, std::lround(cfg.sample_period / dt));

    const double t_tare = cfg.pregrip_duration;
    const double t_descend = (cfg.start_height - push_height) / cfg.axis_speed;
    const double t_pre = 1.0;
    const double t_vib = 5.0;
    const double t_post = 1.0;
    const double amp = vibrate ? volume_to_amplitude(150.0) : 0.0;
    const double freq = 200.0;

    const double b1 = t_tare;
    const double b2 = b1 + t_descend;
    const double b3 = b2 + t_pre;
    const double b4 = b3 + t_vib;
    const double b5 = b4 + t_post;

    world.set_mount(cfg.start_height, 0.0);
    world.set_delta_p(0.0);

    ForceTrace trace;
    trace.sample_period = dt * static_cast<double>(decim);
    trace.marks = {{Phase::PreGrip, 0.0},
                   {Phase::Descend, b1},
                   {Phase::Dwell, b2},
                   {Phase::Release, b3},
                   {Phase::Done, b4}};

    long step_idx = 0;
    double t = 0.0;
    while (t < b5 - 0.5 * dt) {
        t += dt;
        double height = cfg.start_height;
        double osc = 0.0;
        if (t < b1) {
            height = cfg.start_height;
        } else if (t < b2) {
            height = std::max(push_height, cfg.start_height - cfg.axis_speed * (t - b1));
        } else {
            height = push_height;
            if (t >= b3 && t < b4)
                osc = amp * std::sin(2.0 * kPi * freq * (t - b3));
        }
        world.set_mount(height, osc);
        world.step();
        ++step_idx;
        if (step_idx % decim == 0) {
            trace.entries.emplace_back(t, world.load_cell());
            trace.kinematics.push_back({t, height, osc});
        }
    }

    apply_tare(trace, cfg);
    return trace;
}

double trace_tail_mean(const ForceTrace& trace, double window) {
    if (trace.entries.empty()) throw std::invalid_argument("empty trace");
    const double t_end = trace.entries.back().first;
    double sum = 0.0;
    std::size_t n = 0;
    for (auto it = trace.entries.rbegin(); it != trace.entries.rend(); ++it) {
        if (it->first < t_end - window) break;
        sum += it->second;
        ++n;
    }
    return sum / static_cast<double>(n);
}

double indentation_stiffness(GrainWorld& world, const GripCycleConfig& cfg,
                             const PressureState& vacuum, bool apply_vacuum,
                             double depth) {
    if (!(depth > 0.0)) throw std::invalid_argument("depth must be positive");
    const double dt = world.dt();
    auto run_for = [&](double duration, double h0, double h1) {
        const long n = std::lround(duration / dt);
        for (long i = 1; i <= n; ++i) {
            const double f = static_cast<double>(i) / static_cast<double>(n);
            world.set_mount(h0 + (h1 - h0) * f, 0.0);
            world.step();
        }
    };
    auto mean_load = [&](double duration) {
        const long n = std::lround(duration / dt);
        double sum = 0.0;
        for (long i = 0; i < n; ++i) {
            world.step();
            sum += world.load_cell();
        }
        return sum / static_cast<double>(n);
    };

    world.set_mount(cfg.start_height, 0.0);
    world.set_delta_p(0.0);
    run_for((cfg.start_height - cfg.push_height) / cfg.axis_speed, cfg.start_height,
            cfg.push_height);
    run_for(0.3, cfg.push_height, cfg.push_height);

    if (apply_vacuum) {
        const long n = std::lround((vacuum.ramp_time + 1.5) / dt);
        for (long i = 1; i <= n; ++i) {
            world.set_delta_p(effective_delta_p(vacuum, dt * static_cast<double>(i)));
            world.step();
        }
    }

    const double f0 = mean_load(0.1);
    run_for(depth / 5.0, cfg.push_height, cfg.push_height - depth); // 5 mm/s probe
    run_for(0.2, cfg.push_height - depth, cfg.push_height - depth);
    const double f1 = mean_load(0.1);
    return (f1 - f0) / depth;
}

void write_trace_csv(const ForceTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t_seconds,force_newtons\n";
    for (const PhaseMark& m : trace.marks)
        out << "# phase " << phase_name(m.phase) << " " << m.t << "\n";
    char line[64];
    for (const auto& [t, f] : trace.entries) {
        std::snprintf(line, sizeof line, "%.6f,%.9g\n", t, f);
        out << line;
    }
}

} // namespace gripsim

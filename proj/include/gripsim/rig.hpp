#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "gripsim/membrane.hpp"
#include "gripsim/waveform.hpp"
#include "gripsim/world.hpp"

namespace gripsim {

// Virtual single-axis test machine: carries the gripper mount up and down,
// superimposes exciter oscillation on the mount, switches vacuum, and logs
// the load cell.

enum class Phase { PreGrip, Descend, Dwell, Vacuum, Lift, Release, Done };

const char* phase_name(Phase p);

enum class VibrationWindow { DuringDescent, AfterPushdown, None };

struct GripCycleConfig {
    double start_height = 100.0; // mm, mount datum at cycle start
    double push_height = 30.0;   // mm, bottom of the press stroke
    double lift_height = 70.0;   // mm, top of the pull stroke
    double axis_speed = 30.0;    // mm/s for both strokes

    double vacuum_hold = 10.0;   // s, full vacuum phase (ramp included)

    VibrationWindow vibration_window = VibrationWindow::DuringDescent;
    double after_pushdown_duration = 1.0; // s, dwell length when window is AfterPushdown

    int release_pulse_count = 3;
    double release_pulse_duration = 0.3; // s
    double release_pulse_gap = 0.12;     // s of silence between pulses
    double release_vibration_freq = 200.0;
    double release_volume = 150.0; // percent, see volume_to_amplitude

    // Brief shake at the top of the cycle that re-fluidizes the pack, playing
    // the role of the pre-grip pressure conditioning on the real rig.
    double pregrip_duration = 1.0;       // s, also the tare window
    double pregrip_shake_duration = 0.05;
    double pregrip_shake_freq = 200.0;
    double pregrip_shake_volume = 50.0;

    double dwell_duration = 0.05; // s, when window is not AfterPushdown
    double lift_hold = 0.3;       // s pause at lift_height before release

    double sample_period = 1e-3; // s, trace output rate

    void validate() const; // throws std::invalid_argument
};

struct RigState {
    Phase phase = Phase::PreGrip;
    double mount_height = 0.0;             // mm, excitation excluded
    double mount_oscillation_offset = 0.0; // mm, added on top
    double elapsed = 0.0;                  // s since cycle start
    double phase_elapsed = 0.0;            // s since current phase began
};

struct PhaseMark {
    Phase phase;
    double t; // s, exact phase start
};

struct ForceTrace {
    double sample_period = 1e-3;
    std::vector<std::pair<double, double>> entries; // (t s, f_z N); push +, pull -
    std::vector<PhaseMark> marks;                   // phase starts in order
    // Mount kinematics logged at the same rate: (t, height, oscillation offset).
    std::vector<std::array<double, 3>> kinematics;

    // Start time of the first mark for `p`, or -1 when the phase never ran.
    double mark_time(Phase p) const;
};

// Advances the phase machine by dt: piecewise-linear mount height, exact
// phase boundaries (overshoot carries into the next phase), oscillation
// offset from `wf` in whichever window the config enables. Pure function,
// no world involved. A silent wf disables every oscillation source,
// conditioning shake and release pulses included.
RigState advance(const RigState& state, const GripCycleConfig& cfg,
                 const WaveformSpec& wf, double dt);

// Runs the full cycle on `world`: PreGrip shake, descend with audio, dwell,
// vacuum ramp+hold, lift, release pulses with the vacuum vented. The trace is
// tared against the mean of the last 0.05 s of PreGrip so it starts near zero
// like a load cell zeroed before the test. `stop_after` truncates the cycle
// once the given phase completes (Done = run everything).
ForceTrace run_grip_cycle(GrainWorld& world, const GripCycleConfig& cfg,
                          const WaveformSpec& wf, const PressureState& vacuum,
                          Phase stop_after = Phase::Done);

// Stress-relaxation probe: descend to push_height, hold 1 s, then 5 s of
// 200 Hz mount vibration (or silence), then 1 s of quiet hold. No vacuum.
// The residual press force is the tail of the returned trace.
ForceTrace relaxation_protocol(GrainWorld& world, double push_height, bool vibrate,
                               const GripCycleConfig& cfg = GripCycleConfig{});

// Mean of the trace over its final `window` seconds.
double trace_tail_mean(const ForceTrace& trace, double window);

// Presses the mount a further `depth` mm past push_height after an optional
// vacuum ramp+hold, and returns the incremental stiffness (N/mm) of the pack.
double indentation_stiffness(GrainWorld& world, const GripCycleConfig& cfg,
                             const PressureState& vacuum, bool apply_vacuum,
                             double depth = 1.0);

// Writes `t_seconds,force_newtons` CSV rows (plus phase-mark comment lines).
void write_trace_csv(const ForceTrace& trace, const std::string& path);

} // namespace gripsim

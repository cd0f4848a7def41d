#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gripsim/rig.hpp"

namespace gripsim {

// Trace analysis. All forces in N, push positive. The pull-off metrics work on
// a centered-moving-average smoothed copy of the trace; window and gradient
// threshold are parameters with the defaults used throughout the plans.

constexpr double kDefaultSmoothingWindow = 0.02; // s
constexpr double kDefaultGradientThreshold = 1.0; // N/s

// Raised when a trace has no downward zero crossing during lift, i.e. the
// gripper never took the object's weight.
struct NoHoldDetected : std::runtime_error {
    NoHoldDetected() : std::runtime_error("no pull-off event in trace") {}
};

struct ForceMetrics {
    double push_force = 0.0;    // global max, N
    double holding_force = 0.0; // magnitude of the pull-off valley, 0 if none
    bool hold_detected = false;
    std::optional<double> interlock_force; // magnitude, absent if none
    double push_time = 0.0;
    double zero_crossing_time = 0.0; // meaningful only when hold_detected
    double holding_time = 0.0;       // meaningful only when hold_detected
    std::vector<std::size_t> annotations; // indices of detected extrema
};

// Global maximum of f_z. Throws std::invalid_argument on an empty trace.
double extract_push(const ForceTrace& trace);

// |f_z| at the first local minimum after the first downward zero crossing
// during lift whose preceding smoothed gradient magnitude exceeds the
// threshold. The lift window comes from the trace's phase marks when present,
// otherwise everything after the global maximum counts as lift. Throws
// NoHoldDetected when the trace never crosses zero there.
double extract_holding(const ForceTrace& trace,
                       double smoothing_window = kDefaultSmoothingWindow,
                       double gradient_threshold = kDefaultGradientThreshold);

// |f_z| at the last local minimum before release whose preceding smoothed
// gradient magnitude stays below the threshold; absent when no valley
// qualifies.
std::optional<double> extract_interlock(
    const ForceTrace& trace, double smoothing_window = kDefaultSmoothingWindow,
    double gradient_threshold = kDefaultGradientThreshold);

// All of the above in one pass; NoHoldDetected maps to holding_force = 0.
ForceMetrics extract_metrics(const ForceTrace& trace,
                             double smoothing_window = kDefaultSmoothingWindow,
                             double gradient_threshold = kDefaultGradientThreshold);

// Centered moving average over an odd sample count spanning roughly `window`
// seconds; exposed for the extraction tests.
std::vector<double> smooth_values(const std::vector<double>& values,
                                  double sample_period, double window);

} // namespace gripsim

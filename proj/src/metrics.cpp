#include "gripsim/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace gripsim {

std::vector<double> smooth_values(const std::vector<double>& values,
                                  double sample_period, double window) {
    if (!(sample_period > 0.0) || !(window > 0.0))
        throw std::invalid_argument("sample period and window must be positive");
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(values.size());
    const std::ptrdiff_t half =
        std::max<std::ptrdiff_t>(1, std::lround(window / (2.0 * sample_period)));
    std::vector<double> out(values.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t a = std::max<std::ptrdiff_t>(0, i - half);
        const std::ptrdiff_t b = std::min(n - 1, i + half);
        double sum = 0.0;
        for (std::ptrdiff_t k = a; k <= b; ++k) sum += values[k];
        out[i] = sum / static_cast<double>(b - a + 1);
    }
    return out;
}

namespace {

// Everything the valley hunters need, computed once.
struct TraceView {
    std::vector<double> t;
    std::vector<double> raw;
    std::vector<double> s; // smoothed
    double dt = 0.0;
    std::size_t push_idx = 0;
    std::size_t lift_begin = 0;
    std::size_t release_begin = 0; // one past the searchable range
    bool has_crossing = false;
    std::size_t crossing = 0;

    struct Valley {
        std::size_t idx;    // first sample of the (possibly flat) bottom
        double grad;        // smoothed slope just before the bottom, N/s
    };
    std::vector<Valley> valleys; // within (crossing, release_begin)
};

TraceView make_view(const ForceTrace& trace, double window) {
    if (trace.entries.empty()) throw std::invalid_argument("empty trace");
    TraceView v;
    const std::size_t n = trace.entries.size();
    v.t.reserve(n);
    v.raw.reserve(n);
    for (const auto& [t, f] : trace.entries) {
        v.t.push_back(t);
        v.raw.push_back(f);
    }
    v.dt = trace.sample_period;
    v.s = smooth_values(v.raw, v.dt, window);

    v.push_idx = static_cast<std::size_t>(
        std::max_element(v.raw.begin(), v.raw.end()) - v.raw.begin());

    auto index_at = [&](double time) {
        return static_cast<std::size_t>(
            std::lower_bound(v.t.begin(), v.t.end(), time) - v.t.begin());
    };
    const double t_lift = trace.mark_time(Phase::Lift);
    v.lift_begin = t_lift >= 0.0 ? index_at(t_lift) : v.push_idx;
    const double t_release = trace.mark_time(Phase::Release);
    v.release_begin = t_release >= 0.0 ? index_at(t_release) : n;
    v.lift_begin = std::min(v.lift_begin, n - 1);
    v.release_begin = std::min(v.release_begin, n);

    if (v.s[v.lift_begin] <= 0.0) {
        v.has_crossing = true;
        v.crossing = v.lift_begin;
    } else {
        for (std::size_t k = v.lift_begin; k + 1 < v.release_begin; ++k) {
            if (v.s[k] > 0.0 && v.s[k + 1] <= 0.0) {
                v.has_crossing = true;
                v.crossing = k + 1;
                break;
            }
        }
    }
    if (!v.has_crossing) return v;

    // Local minima as runs of equal smoothed values with strictly higher
    // differing neighbors on both sides; plateaus count once.
    const std::ptrdiff_t m =
        std::max<std::ptrdiff_t>(1, std::lround(window / v.dt));
    std::size_t a = v.crossing + 1;
    while (a + 1 < v.release_begin) {
        std::size_t b = a;
        while (b + 1 < v.release_begin && v.s[b + 1] == v.s[a]) ++b;
        const bool falls_in = v.s[a - 1] > v.s[a];
        const bool rises_out = b + 1 < v.release_begin && v.s[b + 1] > v.s[b];
        if (falls_in && rises_out) {
            const std::ptrdiff_t back =
                std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(a) - m);
            const double grad = (v.s[a] - v.s[static_cast<std::size_t>(back)]) /
                                (static_cast<double>(a - back) * v.dt);
            v.valleys.push_back({a, grad});
        }
        a = b + 1;
    }
    return v;
}

} // namespace

double extract_push(const ForceTrace& trace) {
    if (trace.entries.empty()) throw std::invalid_argument("empty trace");
    double best = trace.entries.front().second;
    for (const auto& [t, f] : trace.entries) best = std::max(best, f);
    return best;
}

double extract_holding(const ForceTrace& trace, double smoothing_window,
                       double gradient_threshold) {
    const TraceView v = make_view(trace, smoothing_window);
    if (!v.has_crossing) throw NoHoldDetected{};
    for (const auto& valley : v.valleys)
        if (std::abs(valley.grad) > gradient_threshold)
            return std::abs(v.s[valley.idx]);
    throw NoHoldDetected{};
}

std::optional<double> extract_interlock(const ForceTrace& trace,
                                        double smoothing_window,
                                        double gradient_threshold) {
    const TraceView v = make_view(trace, smoothing_window);
    if (!v.has_crossing) return std::nullopt;
    std::optional<double> found;
    for (const auto& valley : v.valleys)
        if (v.s[valley.idx] < 0.0 && std::abs(valley.grad) < gradient_threshold)
            found = std::abs(v.s[valley.idx]);
    return found;
}

ForceMetrics extract_metrics(const ForceTrace& trace, double smoothing_window,
                             double gradient_threshold) {
    const TraceView v = make_view(trace, smoothing_window);
    ForceMetrics m;
    m.push_force = v.raw[v.push_idx];
    m.push_time = v.t[v.push_idx];
    m.annotations.push_back(v.push_idx);
    if (v.has_crossing) {
        m.zero_crossing_time = v.t[v.crossing];
        for (const auto& valley : v.valleys) {
            if (std::abs(valley.grad) > gradient_threshold) {
                m.hold_detected = true;
                m.holding_force = std::abs(v.s[valley.idx]);
                m.holding_time = v.t[valley.idx];
                m.annotations.push_back(valley.idx);
                break;
            }
        }
        std::size_t interlock_idx = 0;
        for (const auto& valley : v.valleys) {
            if (v.s[valley.idx] < 0.0 && std::abs(valley.grad) < gradient_threshold) {
                m.interlock_force = std::abs(v.s[valley.idx]);
                interlock_idx = valley.idx;
            }
        }
        if (m.interlock_force) m.annotations.push_back(interlock_idx);
    }
    return m;
}

} // namespace gripsim

#include "gripsim/membrane.hpp"

#include <cmath>

#include "gripsim/contact.hpp"

namespace gripsim {

void Membrane::validate() const {
    const std::size_t n = pos.size();
    if (n < 8) throw std::invalid_argument("membrane ring too small");
    if (vel.size() != n || rest_length.size() != n)
        throw std::invalid_argument("membrane arrays out of step");
    for (double l : rest_length)
        if (!(l > 0.0)) throw std::invalid_argument("membrane rest length must be positive");
    if (attach_end < attach_begin || attach_end > n)
        throw std::invalid_argument("membrane attachment range invalid");
    if (attach_offset.size() != attach_end - attach_begin)
        throw std::invalid_argument("membrane attachment offsets out of step");
}

Membrane make_ring_membrane(const MembraneConfig& cfg, const Vec2& center) {
    cfg.validate();
    Membrane m;
    const std::size_t n = static_cast<std::size_t>(cfg.node_count);
    m.pos.resize(n);
    m.vel.assign(n, Vec2{});
    m.rest_length.assign(n, 2.0 * cfg.radius_rest * std::sin(kPi / static_cast<double>(n)));
    m.node_mass = cfg.node_mass;
    m.k_stretch = cfg.k_stretch;
    m.k_bend = cfg.k_bend;
    m.thickness = cfg.thickness;
    m.edge_damping_ratio = cfg.edge_damping_ratio;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        m.pos[i] = center + Vec2{cfg.radius_build * std::cos(a), cfg.radius_build * std::sin(a)};
    }
    // pin the arc straddling the top node (angle 90 deg)
    const double half_arc = cfg.attach_arc_deg * kPi / 180.0 / 2.0;
    const double per_node = 2.0 * kPi / static_cast<double>(n);
    const std::size_t top = n / 4;
    const std::size_t span = static_cast<std::size_t>(std::floor(half_arc / per_node));
    m.attach_begin = top - span;
    m.attach_end = top + span + 1;
    const Vec2 mount{center.x, center.y + cfg.radius_build};
    for (std::size_t i = m.attach_begin; i < m.attach_end; ++i)
        m.attach_offset.push_back(m.pos[i] - mount);
    m.validate();
    return m;
}

void membrane_forces(const Membrane& m, std::vector<Vec2>& out) {
    const std::size_t n = m.size();
    out.assign(n, Vec2{});
    const double c_e =
        normal_damping_coeff(m.k_stretch, m.node_mass * 0.5, m.edge_damping_ratio);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = m.next(i);
        const Vec2 d = m.pos[j] - m.pos[i];
        const double len = d.norm();
        if (len <= 0.0) continue;
        const Vec2 u = d * (1.0 / len);
        double f = m.k_stretch * (len - m.rest_length[i]);
        f += c_e * dot(m.vel[j] - m.vel[i], u);
        out[i] = out[i] + u * f;
        out[j] = out[j] - u * f;
    }
    if (m.k_bend > 0.0) {
        // Laplacian penalty pulling each node toward its neighbors' midpoint
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t prev = (i == 0) ? n - 1 : i - 1;
            const std::size_t nxt = m.next(i);
            const Vec2 lap = (m.pos[prev] + m.pos[nxt]) * 0.5 - m.pos[i];
            out[i] = out[i] + lap * m.k_bend;
        }
    }
}

double effective_delta_p(const PressureState& p, double t) {
    if (t <= 0.0) return 0.0;
    const double scale = std::min(1.0, t / p.ramp_time);
    return p.delta_p * scale;
}

void pressure_forces(const Membrane& m, const PressureState& p, double t, std::vector<Vec2>& out) {
    const std::size_t n = m.size();
    out.assign(n, Vec2{});
    const double dp = effective_delta_p(p, t) * 1.0e-3; // kPa -> N/mm^2
    if (dp == 0.0) return;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = m.next(i);
        // for a counterclockwise ring, perp(edge) points inward; length is
        // folded in, and the out-of-plane depth is 1 mm
        const Vec2 load = perp(m.pos[j] - m.pos[i]) * dp;
        out[i] = out[i] + load * 0.5;
        out[j] = out[j] + load * 0.5;
    }
}

double polygon_area(const std::vector<Vec2>& poly) {
    double twice = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1 == n) ? 0 : i + 1];
        twice += cross(a, b);
    }
    return 0.5 * twice;
}

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

} // namespace gripsim

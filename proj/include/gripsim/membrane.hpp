#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "gripsim/vec2.hpp"

namespace gripsim {

// Net pressure differential across the membrane. Positive delta_p pulls the
// membrane inward (vacuum inside). Effective value ramps linearly over
// ramp_time from activation.
struct PressureState {
    double delta_p = 0.0;   // kPa
    double ramp_time = 0.5; // s

    void validate() const {
        if (delta_p < 0.0) throw std::invalid_argument("delta_p must be non-negative");
        if (!(ramp_time > 0.0)) throw std::invalid_argument("ramp_time must be positive");
    }
};

struct MembraneConfig {
    int node_count = 96;
    double node_mass = 0.06;          // g
    double k_stretch = 8.0;           // N/mm
    double k_bend = 0.0;              // N*mm, 0 disables bending
    double thickness = 0.5;           // mm, contact radius of the surface
    double edge_damping_ratio = 0.4;  // fraction of critical, along-edge dashpot
    double radius_rest = 23.0;        // mm, unstretched ring radius
    double radius_build = 23.0;       // mm, as-assembled ring radius
    double attach_arc_deg = 3.0;     // arc of nodes pinned to the mount, centered on top
    double grain_mu = 0.5;           // friction of the rubbery skin against grains
    double stub_mu = 0.1;            // smooth clamped neck stub, segments touching the pinned arc

    void validate() const {
        if (node_count < 8) throw std::invalid_argument("membrane needs at least 8 nodes");
        if (!(node_mass > 0.0)) throw std::invalid_argument("node_mass must be positive");
        if (!(k_stretch > 0.0)) throw std::invalid_argument("k_stretch must be positive");
        if (k_bend < 0.0) throw std::invalid_argument("k_bend must be non-negative");
        if (!(thickness > 0.0)) throw std::invalid_argument("thickness must be positive");
        if (edge_damping_ratio < 0.0 || edge_damping_ratio > 1.0)
            throw std::invalid_argument("edge_damping_ratio must lie in [0, 1]");
        if (!(radius_rest > 0.0) || !(radius_build > 0.0))
            throw std::invalid_argument("ring radii must be positive");
        if (attach_arc_deg <= 0.0 || attach_arc_deg >= 180.0)
            throw std::invalid_argument("attach_arc_deg must lie in (0, 180)");
        if (grain_mu < 0.0) throw std::invalid_argument("grain_mu must be non-negative");
        if (stub_mu < 0.0) throw std::invalid_argument("stub_mu must be non-negative");
    }
};

// Closed ring of point masses joined by linear stretch springs, oriented
// counterclockwise. Nodes in [attach_begin, attach_end) are pinned to the rig
// mount and follow it kinematically.
struct Membrane {
    std::vector<Vec2> pos;
    std::vector<Vec2> vel;
    std::vector<double> rest_length;   // edge i joins node i to (i+1) % n
    std::vector<Vec2> attach_offset;   // pinned node position relative to the mount point
    double node_mass = 0.06;
    double k_stretch = 8.0;
    double k_bend = 0.0;
    double thickness = 0.5;
    double edge_damping_ratio = 0.4;
    std::size_t attach_begin = 0;
    std::size_t attach_end = 0;

    std::size_t size() const { return pos.size(); }
    bool pinned(std::size_t i) const { return i >= attach_begin && i < attach_end; }
    std::size_t next(std::size_t i) const { return i + 1 == pos.size() ? 0 : i + 1; }

    void validate() const;
};

// Ring centered on `center`, node 0 at angle 0 (+x), counterclockwise. Node
// positions use radius_build; rest lengths use radius_rest. The attachment
// arc is centered on the topmost node.
Membrane make_ring_membrane(const MembraneConfig& cfg, const Vec2& center);

// Stretch spring + along-edge dashpot (+ optional bending penalty) forces,
// accumulated into out (resized and zeroed to match).
void membrane_forces(const Membrane& m, std::vector<Vec2>& out);

// Pressure load at time t since activation: effective dP(t) scales each
// edge's inward normal load, split between the edge's endpoints. 2D forces
// use a 1 mm out-of-plane depth.
void pressure_forces(const Membrane& m, const PressureState& p, double t, std::vector<Vec2>& out);

// Instantaneous pressure differential in kPa at time t since activation.
double effective_delta_p(const PressureState& p, double t);

// Area enclosed by the node polygon (positive for counterclockwise rings).
double polygon_area(const std::vector<Vec2>& poly);

// Even-odd crossing test; points exactly on an edge may land either way.
bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p);

} // namespace gripsim

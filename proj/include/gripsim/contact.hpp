#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gripsim/vec2.hpp"

namespace gripsim {

// Linear spring-dashpot with Coulomb-capped tangential spring. Units:
// stiffness N/mm, mass g, velocity mm/s, force N.
struct ContactParams {
    double k_n = 100.0;         // normal stiffness N/mm
    double damping_ratio = 0.2; // fraction of critical
    double mu = 0.6;            // Coulomb friction coefficient
    double k_t = 50.0;          // tangential stiffness N/mm

    void validate() const {
        if (!(k_n > 0.0)) throw std::invalid_argument("k_n must be positive");
        if (damping_ratio < 0.0 || damping_ratio > 1.0)
            throw std::invalid_argument("damping_ratio must lie in [0, 1]");
        if (mu < 0.0) throw std::invalid_argument("mu must be non-negative");
        if (!(k_t > 0.0)) throw std::invalid_argument("k_t must be positive");
    }
};

// Viscous coefficient in N*s/mm for a spring-dashpot pair. The 1e-3 factor
// converts sqrt((N/mm)*g) to N*s/mm in the mm/g/s system.
inline double normal_damping_coeff(double k_n, double m_eff, double damping_ratio) {
    return 2.0e-3 * damping_ratio * std::sqrt(k_n * m_eff);
}

// Largest stable integration step for the stiffest pair, seconds. The 1e-3
// converts sqrt(g/(N/mm)) to seconds.
inline double stable_dt(double m_min, double k_n) {
    return 0.2e-3 * std::sqrt(m_min / k_n);
}

struct ContactForce {
    Vec2 force;  // on the body the normal points toward
    double f_n = 0.0;
    Vec2 slip;   // tangential spring elongation after Coulomb truncation
};

// Force on body A given overlap along `normal` (unit vector pointing from B
// to A) and rel_velocity = v_A - v_B. `slip` is the accumulated tangential
// spring elongation for this pair; the returned slip is the truncated value
// the caller should store back.
inline ContactForce contact_force(double overlap, const Vec2& rel_velocity, const Vec2& normal,
                                  const Vec2& slip, const ContactParams& p, double m_eff) {
    ContactForce out;
    const double v_n = dot(rel_velocity, normal);
    const double c_n = normal_damping_coeff(p.k_n, m_eff, p.damping_ratio);
    double f_n = p.k_n * overlap - c_n * v_n;
    if (f_n < 0.0) f_n = 0.0;
    out.f_n = f_n;

    // keep the tangential spring in the contact tangent plane; truncate the
    // stored elongation at the Coulomb cap so stick resumes cleanly
    Vec2 s = slip - normal * dot(slip, normal);
    const double s_len = s.norm();
    const double f_t_max = p.mu * f_n;
    if (p.k_t * s_len > f_t_max && s_len > 0.0)
        s = s * (f_t_max / (p.k_t * s_len));
    out.slip = s;
    out.force = normal * f_n - s * p.k_t;
    return out;
}

// Advance the tangential spring by one step of relative tangential motion.
inline Vec2 advance_slip(const Vec2& slip, const Vec2& rel_velocity, const Vec2& normal,
                         double dt) {
    const Vec2 v_t = rel_velocity - normal * dot(rel_velocity, normal);
    return slip + v_t * dt;
}

} // namespace gripsim

#include "gripsim/world.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gripsim {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    auto split = [](std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    };
    return split(split(split(split(a) + b) + c) + d);
}

double uniform01(std::uint64_t raw) {
    return static_cast<double>(raw >> 11) * 0x1.0p-53;
}

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (gravity < 0.0) throw std::invalid_argument("gravity must be non-negative");
    if (!(bounds_max.x > bounds_min.x) || !(bounds_max.y > bounds_min.y))
        throw std::invalid_argument("domain bounds must have positive extent");
    if (grain_count < 0) throw std::invalid_argument("grain_count must be non-negative");
    if (grain_count > 0) {
        if (!(radius_mean > 0.0) || radius_spread < 0.0 || radius_spread >= radius_mean)
            throw std::invalid_argument("grain radius distribution must stay positive");
        if (!(total_grain_mass > 0.0))
            throw std::invalid_argument("total_grain_mass must be positive");
    }
    if (!(skin > 0.0)) throw std::invalid_argument("skin must be positive");
    if (!(settle_max_time >= settle_min_time) || settle_min_time < 0.0)
        throw std::invalid_argument("settle window invalid");
    if (!(settle_energy > 0.0)) throw std::invalid_argument("settle_energy must be positive");
    contact.validate();
    if (membrane.node_count != 0) membrane.validate();
    if (geometry.object_enabled && !(geometry.object_radius > 0.0))
        throw std::invalid_argument("object_radius must be positive");
}

namespace {

const SimConfig& validated(const SimConfig& cfg) {
    cfg.validate();
    return cfg;
}

Membrane build_membrane(const SimConfig& cfg) {
    if (cfg.membrane.node_count == 0) return Membrane{};
    const Vec2 center{0.0, cfg.start_height - cfg.membrane.radius_build};
    return make_ring_membrane(cfg.membrane, center);
}

constexpr double kAccelToForce = 1.0e-6; // (g * mm/s^2) -> N
constexpr double kNmmToJoule = 1.0e-3;

} // namespace

GrainWorld::GrainWorld(const SimConfig& cfg)
    : cfg_(validated(cfg)),
      membrane_(build_membrane(cfg)),
      grid_(cfg.bounds_min, cfg.bounds_max,
            2.0 * (cfg.radius_mean + cfg.radius_spread) + cfg.skin) {
    mount_height_ = cfg_.start_height;
    prev_mount_y_ = cfg_.start_height;
    place_grains();
    if (!grains_.empty()) {
        double m_min = grains_.front().mass;
        for (const Grain& g : grains_) m_min = std::min(m_min, g.mass);
        if (cfg_.dt > stable_dt(m_min, cfg_.contact.k_n))
            throw std::invalid_argument("dt exceeds the contact stability bound");
    }
    grain_force_.assign(grains_.size(), Vec2{});
    node_force_.assign(membrane_.size(), Vec2{});
    grain_floor_slip_.assign(grains_.size(), Vec2{});
    grain_object_slip_.assign(grains_.size(), Vec2{});
    grain_plate_slip_.assign(grains_.size(), Vec2{});
    node_floor_slip_.assign(membrane_.size(), Vec2{});
    node_object_slip_.assign(membrane_.size(), Vec2{});
    node_plate_slip_.assign(membrane_.size(), Vec2{});
    grain_static_cn_.resize(grains_.size());
    for (std::size_t i = 0; i < grains_.size(); ++i)
        grain_static_cn_[i] =
            normal_damping_coeff(cfg_.contact.k_n, grains_[i].mass, cfg_.contact.damping_ratio);
    node_static_cn_ = normal_damping_coeff(cfg_.contact.k_n, cfg_.membrane.node_mass,
                                           cfg_.contact.damping_ratio);
}

void GrainWorld::place_grains() {
    const int count = cfg_.grain_count;
    grains_.clear();
    if (count == 0) return;
    grains_.reserve(static_cast<std::size_t>(count));

    std::mt19937_64 eng(cfg_.rng_seed);
    auto unit = [&eng]() { return uniform01(eng()); };

    const double scale = cfg_.grow_scale;
    if (!(scale > 0.0) || scale > 1.0)
        throw std::invalid_argument("grow_scale must lie in (0, 1]");
    const double r_max = (cfg_.radius_mean + cfg_.radius_spread) * scale;
    const double ring_r =
        (cfg_.membrane.node_count != 0) ? cfg_.membrane.radius_build : 25.0;
    const Vec2 center{0.0, cfg_.start_height - ring_r};
    const double inner = ring_r - cfg_.membrane.thickness - 0.1;
    const double gap = 0.06;     // guaranteed clearance between deposited grains
    const double jitter = 0.015; // per-grain position noise, within the clearance
    const double row_step = 2.0 * r_max + gap + 2.0 * jitter;

    final_radius_.clear();
    double y = center.y - inner + r_max;
    while (static_cast<int>(grains_.size()) < count) {
        if (y > center.y + inner - r_max)
            throw std::runtime_error("cannot place grain_count grains inside the membrane");
        double x = center.x - std::sqrt(std::max(0.0, inner * inner - (y - center.y) * (y - center.y)));
        double prev_r = 0.0;
        bool first = true;
        while (static_cast<int>(grains_.size()) < count) {
            const double r_final = cfg_.radius_mean + cfg_.radius_spread * (2.0 * unit() - 1.0);
            const double r = r_final * scale;
            const double jx = jitter * (2.0 * unit() - 1.0);
            const double jy = jitter * (2.0 * unit() - 1.0);
            x += first ? r : prev_r + r + gap + 2.0 * jitter;
            first = false;
            prev_r = r;
            const Vec2 p{x + jx, y + jy};
            const Vec2 off = p - center;
            if (off.norm() > inner - r) {
                if (x > center.x) break; // ran off the right side of the chord
                continue;                // still left of the chord, keep walking
            }
            grains_.push_back(Grain{p, Vec2{}, r, 0.0});
            final_radius_.push_back(r_final);
        }
        y += row_step;
    }

    double sum_r2 = 0.0;
    for (double r : final_radius_) sum_r2 += r * r;
    for (std::size_t i = 0; i < grains_.size(); ++i)
        grains_[i].mass =
            cfg_.total_grain_mass * final_radius_[i] * final_radius_[i] / sum_r2;
}

void GrainWorld::apply_growth(double scale) {
    if (!(scale > 0.0) || scale > 1.0)
        throw std::invalid_argument("growth scale must lie in (0, 1]");
    for (std::size_t i = 0; i < grains_.size(); ++i)
        grains_[i].radius = final_radius_[i] * scale;
    pairs_valid_ = false;
}

void GrainWorld::set_mount(double height_mm, double oscillation_mm) {
    mount_height_ = height_mm;
    mount_osc_ = oscillation_mm;
}

void GrainWorld::set_delta_p(double kpa) {
    if (kpa < 0.0) throw std::invalid_argument("delta_p must be non-negative");
    delta_p_ = kpa;
}

void GrainWorld::rebuild_pairs() {
    scratch_pos_.resize(grains_.size());
    for (std::size_t i = 0; i < grains_.size(); ++i) scratch_pos_[i] = grains_[i].pos;
    grid_.build(scratch_pos_);

    const double skin = cfg_.skin;
    const ContactParams& cp = cfg_.contact;

    std::vector<GrainPair> fresh;
    fresh.reserve(grain_pairs_.size() + 64);
    grid_.for_candidate_pairs([&](int i, int j) {
        const Grain& a = grains_[static_cast<std::size_t>(i)];
        const Grain& b = grains_[static_cast<std::size_t>(j)];
        const double reach = a.radius + b.radius + skin;
        if (norm_sq(a.pos - b.pos) >= reach * reach) return;
        GrainPair p;
        p.i = i;
        p.j = j;
        p.sum_r = a.radius + b.radius;
        p.m_eff = a.mass * b.mass / (a.mass + b.mass);
        p.c_n = normal_damping_coeff(cp.k_n, p.m_eff, cp.damping_ratio);
        p.slip = Vec2{};
        fresh.push_back(p);
    });
    std::sort(fresh.begin(), fresh.end(), [](const GrainPair& a, const GrainPair& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    // carry tangential springs over from the previous list (both sorted)
    std::size_t old_at = 0;
    for (GrainPair& p : fresh) {
        while (old_at < grain_pairs_.size() &&
               (grain_pairs_[old_at].i < p.i ||
                (grain_pairs_[old_at].i == p.i && grain_pairs_[old_at].j < p.j)))
            ++old_at;
        if (old_at < grain_pairs_.size() && grain_pairs_[old_at].i == p.i &&
            grain_pairs_[old_at].j == p.j)
            p.slip = grain_pairs_[old_at].slip;
    }
    grain_pairs_ = std::move(fresh);

    const std::size_t n_nodes = membrane_.size();
    std::vector<EdgePair> fresh_edges;
    fresh_edges.reserve(edge_pairs_.size() + 64);
    const double pad = cfg_.membrane.thickness + cfg_.radius_mean + cfg_.radius_spread + skin;
    for (std::size_t e = 0; e < n_nodes; ++e) {
        const Vec2& a = membrane_.pos[e];
        const Vec2& b = membrane_.pos[membrane_.next(e)];
        const Vec2 lo{std::min(a.x, b.x) - pad, std::min(a.y, b.y) - pad};
        const Vec2 hi{std::max(a.x, b.x) + pad, std::max(a.y, b.y) + pad};
        grid_.for_points_in_box(lo, hi, [&](int gi) {
            const Grain& g = grains_[static_cast<std::size_t>(gi)];
            const Vec2 ab = b - a;
            const double len2 = norm_sq(ab);
            const double t = std::clamp(dot(g.pos - a, ab) / len2, 0.0, 1.0);
            const Vec2 cp_pt = a + ab * t;
            const double reach = g.radius + cfg_.membrane.thickness + skin;
            if (norm_sq(g.pos - cp_pt) >= reach * reach) return;
            EdgePair ep;
            ep.grain = gi;
            ep.edge = static_cast<std::int32_t>(e);
            ep.m_eff = g.mass * membrane_.node_mass / (g.mass + membrane_.node_mass);
            ep.c_n = normal_damping_coeff(cp.k_n, ep.m_eff, cp.damping_ratio);
            ep.slip = Vec2{};
            fresh_edges.push_back(ep);
        });
    }
    std::sort(fresh_edges.begin(), fresh_edges.end(), [](const EdgePair& a, const EdgePair& b) {
        return a.grain != b.grain ? a.grain < b.grain : a.edge < b.edge;
    });
    old_at = 0;
    for (EdgePair& p : fresh_edges) {
        while (old_at < edge_pairs_.size() &&
               (edge_pairs_[old_at].grain < p.grain ||
                (edge_pairs_[old_at].grain == p.grain && edge_pairs_[old_at].edge < p.edge)))
            ++old_at;
        if (old_at < edge_pairs_.size() && edge_pairs_[old_at].grain == p.grain &&
            edge_pairs_[old_at].edge == p.edge)
            p.slip = edge_pairs_[old_at].slip;
    }
    edge_pairs_ = std::move(fresh_edges);

    disp_accum_ = 0.0;
    pairs_valid_ = true;
}

void GrainWorld::apply_contact_forces() {
    const ContactParams& cp = cfg_.contact;
    const double dt = cfg_.dt;

    for (GrainPair& p : grain_pairs_) {
        Grain& gi = grains_[static_cast<std::size_t>(p.i)];
        Grain& gj = grains_[static_cast<std::size_t>(p.j)];
        const Vec2 d = gi.pos - gj.pos;
        const double d2 = norm_sq(d);
        if (d2 >= p.sum_r * p.sum_r || d2 <= 0.0) {
            p.slip = Vec2{};
            continue;
        }
        const double dist = std::sqrt(d2);
        const Vec2 n = d * (1.0 / dist);
        const double overlap = p.sum_r - dist;
        const Vec2 vrel = gi.vel - gj.vel;
        const double vn = dot(vrel, n);
        double fn = cp.k_n * overlap - p.c_n * vn;
        if (fn < 0.0) fn = 0.0;
        Vec2 s = p.slip + (vrel - n * vn) * dt;
        s = s - n * dot(s, n);
        const double cap = cp.mu * fn;
        const double s2 = norm_sq(s);
        if (cp.k_t * cp.k_t * s2 > cap * cap)
            s = (s2 > 0.0) ? s * (cap / (cp.k_t * std::sqrt(s2))) : Vec2{};
        p.slip = s;
        const Vec2 f = n * fn - s * cp.k_t;
        grain_force_[static_cast<std::size_t>(p.i)] =
            grain_force_[static_cast<std::size_t>(p.i)] + f;
        grain_force_[static_cast<std::size_t>(p.j)] =
            grain_force_[static_cast<std::size_t>(p.j)] - f;
        const double small_r = std::min(gi.radius, gj.radius);
        if (overlap > max_overlap_ratio_ * small_r) {
            max_overlap_ratio_ = overlap / small_r;
            max_overlap_pos_ = (gi.pos + gj.pos) * 0.5;
        }
    }

    const double thick = membrane_.thickness;
    for (EdgePair& p : edge_pairs_) {
        Grain& g = grains_[static_cast<std::size_t>(p.grain)];
        const std::size_t ea = static_cast<std::size_t>(p.edge);
        const std::size_t eb = membrane_.next(ea);
        const Vec2& a = membrane_.pos[ea];
        const Vec2 ab = membrane_.pos[eb] - a;
        const double len2 = norm_sq(ab);
        if (len2 <= 0.0) continue;
        const double t = std::clamp(dot(g.pos - a, ab) / len2, 0.0, 1.0);
        const Vec2 d = g.pos - (a + ab * t);
        const double reach = g.radius + thick;
        const double d2 = norm_sq(d);
        if (d2 >= reach * reach || d2 <= 0.0) {
            p.slip = Vec2{};
            continue;
        }
        const double dist = std::sqrt(d2);
        const Vec2 n = d * (1.0 / dist);
        const double overlap = reach - dist;
        const Vec2 v_edge = membrane_.vel[ea] * (1.0 - t) + membrane_.vel[eb] * t;
        const Vec2 vrel = g.vel - v_edge;
        const double vn = dot(vrel, n);
        double fn = cp.k_n * overlap - p.c_n * vn;
        if (fn < 0.0) fn = 0.0;
        Vec2 s = p.slip + (vrel - n * vn) * dt;
        s = s - n * dot(s, n);
        const double mu_edge = (membrane_.pinned(ea) || membrane_.pinned(eb))
                                   ? cfg_.membrane.stub_mu
                                   : cfg_.membrane.grain_mu;
        const double cap = mu_edge * fn;
        const double s2 = norm_sq(s);
        if (cp.k_t * cp.k_t * s2 > cap * cap)
            s = (s2 > 0.0) ? s * (cap / (cp.k_t * std::sqrt(s2))) : Vec2{};
        p.slip = s;
        const Vec2 f = n * fn - s * cp.k_t;
        grain_force_[static_cast<std::size_t>(p.grain)] =
            grain_force_[static_cast<std::size_t>(p.grain)] + f;
        node_force_[ea] = node_force_[ea] - f * (1.0 - t);
        node_force_[eb] = node_force_[eb] - f * t;
    }

    // contacts against the floor plane and the target disk; each body keeps
    // one tangential spring per surface
    const StaticGeometry& geo = cfg_.geometry;
    object_fy_ = 0.0;
    object_fn_ = 0.0;
    auto static_contact = [&](const Vec2& pos, const Vec2& vel, double reach, double c_n,
                              Vec2& slip, const Vec2& n, double gap_dist, double mu) -> Vec2 {
        const double overlap = reach - gap_dist;
        if (overlap <= 0.0) {
            slip = Vec2{};
            return Vec2{};
        }
        const double vn = dot(vel, n);
        double fn = cp.k_n * overlap - c_n * vn;
        if (fn < 0.0) fn = 0.0;
        Vec2 s = slip + (vel - n * vn) * dt;
        s = s - n * dot(s, n);
        const double cap = mu * fn;
        const double s2 = norm_sq(s);
        if (cp.k_t * cp.k_t * s2 > cap * cap)
            s = (s2 > 0.0) ? s * (cap / (cp.k_t * std::sqrt(s2))) : Vec2{};
        slip = s;
        return n * fn - s * cp.k_t;
    };

    for (std::size_t i = 0; i < grains_.size(); ++i) {
        Grain& g = grains_[i];
        const double c_n = grain_static_cn_[i];
        {
            const Vec2 n{0.0, 1.0};
            const Vec2 f = static_contact(g.pos, g.vel, g.radius, c_n, grain_floor_slip_[i], n,
                                          g.pos.y - geo.floor_y, geo.grain_surface_mu);
            grain_force_[i] = grain_force_[i] + f;
        }
        if (geo.object_enabled) {
            const Vec2 d = g.pos - geo.object_center;
            const double dist = d.norm();
            if (dist > 0.0 && dist < g.radius + geo.object_radius + 1.0) {
                const Vec2 n = d * (1.0 / dist);
                const Vec2 f = static_contact(g.pos, g.vel, g.radius + geo.object_radius, c_n,
                                              grain_object_slip_[i], n, dist,
                                              geo.grain_surface_mu);
                grain_force_[i] = grain_force_[i] + f;
                object_fy_ += f.y;
                object_fn_ += dot(f, n);
            } else {
                grain_object_slip_[i] = Vec2{};
            }
        }
    }

    for (std::size_t i = 0; i < membrane_.size(); ++i) {
        const Vec2& pos = membrane_.pos[i];
        const Vec2& vel = membrane_.vel[i];
        {
            const Vec2 n{0.0, 1.0};
            const Vec2 f = static_contact(pos, vel, thick, node_static_cn_, node_floor_slip_[i],
                                          n, pos.y - geo.floor_y, geo.membrane_surface_mu);
            node_force_[i] = node_force_[i] + f;
        }
        if (geo.object_enabled) {
            const Vec2 d = pos - geo.object_center;
            const double dist = d.norm();
            if (dist > 0.0 && dist < thick + geo.object_radius + 1.0) {
                const Vec2 n = d * (1.0 / dist);
                const Vec2 f = static_contact(pos, vel, thick + geo.object_radius, node_static_cn_,
                                              node_object_slip_[i], n, dist,
                                              geo.membrane_surface_mu);
                node_force_[i] = node_force_[i] + f;
                object_fy_ += f.y;
                object_fn_ += dot(f, n);
            } else {
                node_object_slip_[i] = Vec2{};
            }
        }
    }

    // exciter face: a rigid plate at the mount point pressing everything
    // under it downward; it rides the oscillation, so contacts see its
    // vertical velocity
    plate_fz_ = 0.0;
    if (cfg_.plate_halfwidth > 0.0) {
        const double my = mount_height_ + mount_osc_;
        const double py = my + cfg_.plate_offset;
        const Vec2 plate_vel{0.0, (my - prev_mount_y_) / dt};
        const Vec2 n{0.0, -1.0};
        const double half_w = cfg_.plate_halfwidth;
        for (std::size_t i = 0; i < grains_.size(); ++i) {
            Grain& g = grains_[i];
            if (std::abs(g.pos.x) > half_w || py - g.pos.y >= g.radius) {
                grain_plate_slip_[i] = Vec2{};
                continue;
            }
            const Vec2 f = static_contact(g.pos, g.vel - plate_vel, g.radius, grain_static_cn_[i],
                                          grain_plate_slip_[i], n, py - g.pos.y,
                                          geo.grain_surface_mu);
            grain_force_[i] = grain_force_[i] + f;
            plate_fz_ -= f.y;
        }
        for (std::size_t i = 0; i < membrane_.size(); ++i) {
            if (membrane_.pinned(i)) continue;
            const Vec2& pos = membrane_.pos[i];
            if (std::abs(pos.x) > half_w || py - pos.y >= thick) {
                node_plate_slip_[i] = Vec2{};
                continue;
            }
            const Vec2 f = static_contact(pos, membrane_.vel[i] - plate_vel, thick,
                                          node_static_cn_, node_plate_slip_[i], n, py - pos.y,
                                          geo.membrane_surface_mu);
            node_force_[i] = node_force_[i] + f;
            plate_fz_ -= f.y;
        }
    }
}

void GrainWorld::integrate() {
    const double dt = cfg_.dt;
    const double g = cfg_.gravity;
    double max_v2 = 0.0;

    for (std::size_t i = 0; i < grains_.size(); ++i) {
        Grain& gr = grains_[i];
        Vec2 f = grain_force_[i];
        f.y -= gr.mass * g * kAccelToForce;
        if (drag_ != 0.0) f = f - gr.vel * (drag_ * gr.mass * kAccelToForce);
        gr.vel = gr.vel + f * (dt * kForceToAccel / gr.mass);
        gr.pos = gr.pos + gr.vel * dt;
        max_v2 = std::max(max_v2, norm_sq(gr.vel));
    }

    // load cell reads the applied force on the pinned arc plus the exciter
    // plate reaction, captured before the kinematic override
    double fz = 0.0;
    for (std::size_t i = membrane_.attach_begin; i < membrane_.attach_end; ++i)
        fz += node_force_[i].y;
    load_cell_ = fz + plate_fz_;

    const double inv_nm = (membrane_.node_mass > 0.0) ? 1.0 / membrane_.node_mass : 0.0;
    for (std::size_t i = 0; i < membrane_.size(); ++i) {
        if (membrane_.pinned(i)) continue;
        Vec2 f = node_force_[i];
        f.y -= membrane_.node_mass * g * kAccelToForce;
        if (drag_ != 0.0) f = f - membrane_.vel[i] * (drag_ * membrane_.node_mass * kAccelToForce);
        membrane_.vel[i] = membrane_.vel[i] + f * (dt * kForceToAccel * inv_nm);
        membrane_.pos[i] = membrane_.pos[i] + membrane_.vel[i] * dt;
        max_v2 = std::max(max_v2, norm_sq(membrane_.vel[i]));
    }

    const Vec2 mount_pt{0.0, mount_height_ + mount_osc_};
    for (std::size_t i = membrane_.attach_begin; i < membrane_.attach_end; ++i) {
        const Vec2 target = mount_pt + membrane_.attach_offset[i - membrane_.attach_begin];
        membrane_.vel[i] = (target - membrane_.pos[i]) * (1.0 / dt);
        membrane_.pos[i] = target;
        max_v2 = std::max(max_v2, norm_sq(membrane_.vel[i]));
    }
    prev_mount_y_ = mount_pt.y;

    max_speed_ = std::sqrt(max_v2);
    disp_accum_ += max_speed_ * dt;
    if (disp_accum_ > 0.5 * cfg_.skin) pairs_valid_ = false;

    time_ += dt;
    ++step_count_;
    if ((step_count_ & 127u) == 0u) check_finite();
}

void GrainWorld::step() {
    if (!pairs_valid_) rebuild_pairs();

    if (membrane_.size() != 0) {
        membrane_forces(membrane_, node_force_);
        if (delta_p_ > 0.0) {
            PressureState ps{delta_p_, 1.0};
            pressure_forces(membrane_, ps, ps.ramp_time, scratch_force_);
            for (std::size_t i = 0; i < node_force_.size(); ++i)
                node_force_[i] = node_force_[i] + scratch_force_[i];
        }
    }
    std::fill(grain_force_.begin(), grain_force_.end(), Vec2{});

    apply_contact_forces();
    integrate();
}

void GrainWorld::advance_time_frozen(double dt_s) {
    if (!(dt_s >= 0.0)) throw std::invalid_argument("frozen advance must be non-negative");
    time_ += dt_s;
}

double GrainWorld::kinetic_energy() const {
    double e = 0.0;
    for (const Grain& g : grains_) e += 0.5 * g.mass * norm_sq(g.vel);
    return e * kEnergyToJoule;
}

double GrainWorld::total_mechanical_energy() const {
    double e = 0.0; // g*mm^2/s^2
    for (const Grain& g : grains_)
        e += 0.5 * g.mass * norm_sq(g.vel) + g.mass * cfg_.gravity * g.pos.y;
    for (std::size_t i = 0; i < membrane_.size(); ++i) {
        if (membrane_.pinned(i)) continue;
        e += 0.5 * membrane_.node_mass * norm_sq(membrane_.vel[i]) +
             membrane_.node_mass * cfg_.gravity * membrane_.pos[i].y;
    }
    double spring = 0.0; // N*mm
    for (std::size_t i = 0; i < membrane_.size(); ++i) {
        const double len = (membrane_.pos[membrane_.next(i)] - membrane_.pos[i]).norm();
        const double x = len - membrane_.rest_length[i];
        spring += 0.5 * membrane_.k_stretch * x * x;
    }
    const ContactParams& cp = cfg_.contact;
    for (const GrainPair& p : grain_pairs_) {
        const Grain& a = grains_[static_cast<std::size_t>(p.i)];
        const Grain& b = grains_[static_cast<std::size_t>(p.j)];
        const double overlap = p.sum_r - (a.pos - b.pos).norm();
        if (overlap > 0.0) spring += 0.5 * cp.k_n * overlap * overlap;
        spring += 0.5 * cp.k_t * norm_sq(p.slip);
    }
    for (const EdgePair& p : edge_pairs_) {
        const Grain& g = grains_[static_cast<std::size_t>(p.grain)];
        const std::size_t ea = static_cast<std::size_t>(p.edge);
        const Vec2& a = membrane_.pos[ea];
        const Vec2 ab = membrane_.pos[membrane_.next(ea)] - a;
        const double len2 = norm_sq(ab);
        if (len2 <= 0.0) continue;
        const double t = std::clamp(dot(g.pos - a, ab) / len2, 0.0, 1.0);
        const double overlap = g.radius + membrane_.thickness - (g.pos - (a + ab * t)).norm();
        if (overlap > 0.0) spring += 0.5 * cp.k_n * overlap * overlap;
        spring += 0.5 * cp.k_t * norm_sq(p.slip);
    }
    auto static_pe = [&](const Vec2& pos, double reach, const Vec2& slip) {
        double pe = 0.5 * cp.k_t * norm_sq(slip);
        const double overlap_floor = reach - (pos.y - cfg_.geometry.floor_y);
        if (overlap_floor > 0.0) pe += 0.5 * cp.k_n * overlap_floor * overlap_floor;
        return pe;
    };
    for (std::size_t i = 0; i < grains_.size(); ++i) {
        spring += static_pe(grains_[i].pos, grains_[i].radius, grain_floor_slip_[i]);
        if (cfg_.geometry.object_enabled) {
            const double ov = grains_[i].radius + cfg_.geometry.object_radius -
                              (grains_[i].pos - cfg_.geometry.object_center).norm();
            if (ov > 0.0) spring += 0.5 * cp.k_n * ov * ov;
            spring += 0.5 * cp.k_t * norm_sq(grain_object_slip_[i]);
        }
    }
    for (std::size_t i = 0; i < membrane_.size(); ++i) {
        spring += static_pe(membrane_.pos[i], membrane_.thickness, node_floor_slip_[i]);
        if (cfg_.geometry.object_enabled) {
            const double ov = membrane_.thickness + cfg_.geometry.object_radius -
                              (membrane_.pos[i] - cfg_.geometry.object_center).norm();
            if (ov > 0.0) spring += 0.5 * cp.k_n * ov * ov;
            spring += 0.5 * cp.k_t * norm_sq(node_object_slip_[i]);
        }
    }
    return e * kEnergyToJoule + spring * kNmmToJoule;
}

double GrainWorld::max_speed() const {
    double v2 = 0.0;
    for (const Grain& g : grains_) v2 = std::max(v2, norm_sq(g.vel));
    for (const Vec2& v : membrane_.vel) v2 = std::max(v2, norm_sq(v));
    return std::sqrt(v2);
}

namespace {

// Andrew monotone chain; returns hull in counterclockwise order.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    const std::size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<Vec2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

} // namespace

double GrainWorld::packing_fraction() const {
    if (grains_.empty()) return 0.0;
    std::vector<Vec2> centers(grains_.size());
    double grain_area = 0.0;
    double r_mean = 0.0;
    for (std::size_t i = 0; i < grains_.size(); ++i) {
        centers[i] = grains_[i].pos;
        grain_area += kPi * grains_[i].radius * grains_[i].radius;
        r_mean += grains_[i].radius;
    }
    r_mean /= static_cast<double>(grains_.size());
    const std::vector<Vec2> hull = convex_hull(std::move(centers));
    if (hull.size() < 3) return 0.0;
    double perim = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i)
        perim += (hull[(i + 1) % hull.size()] - hull[i]).norm();
    // hull of centers inflated by the mean radius
    const double area = polygon_area(hull) + perim * r_mean + kPi * r_mean * r_mean;
    return grain_area / area;
}

double GrainWorld::contact_low_y() const {
    if (!cfg_.geometry.object_enabled) return 99.0;
    double low = 99.0;
    for (std::size_t i = 0; i < membrane_.size(); ++i) {
        const Vec2& p = membrane_.pos[i];
        const double d = (p - cfg_.geometry.object_center).norm();
        if (d < cfg_.geometry.object_radius + membrane_.thickness + 0.05 && p.y < low)
            low = p.y;
    }
    return low;
}

int GrainWorld::object_contact_count() const {
    if (!cfg_.geometry.object_enabled || membrane_.size() == 0) return 0;
    const std::size_t n = membrane_.size();
    std::vector<char> edge_on_object(n, 0);
    for (std::size_t e = 0; e < n; ++e) {
        const Vec2& a = membrane_.pos[e];
        const Vec2 ab = membrane_.pos[membrane_.next(e)] - a;
        const double len2 = norm_sq(ab);
        if (len2 <= 0.0) continue;
        const double t =
            std::clamp(dot(cfg_.geometry.object_center - a, ab) / len2, 0.0, 1.0);
        const double d = (cfg_.geometry.object_center - (a + ab * t)).norm();
        if (d < cfg_.geometry.object_radius + membrane_.thickness) edge_on_object[e] = 1;
    }
    int count = 0;
    for (const Grain& g : grains_) {
        bool bearing = false;
        for (std::size_t e = 0; e < n && !bearing; ++e) {
            if (!edge_on_object[e]) continue;
            const Vec2& a = membrane_.pos[e];
            const Vec2 ab = membrane_.pos[membrane_.next(e)] - a;
            const double len2 = norm_sq(ab);
            if (len2 <= 0.0) continue;
            const double t = std::clamp(dot(g.pos - a, ab) / len2, 0.0, 1.0);
            const double d = (g.pos - (a + ab * t)).norm();
            if (d < g.radius + membrane_.thickness) bearing = true;
        }
        if (bearing) ++count;
    }
    return count;
}

std::vector<std::pair<int, int>> GrainWorld::neighbor_pairs() const {
    std::vector<std::pair<int, int>> out;
    if (grains_.empty()) return out;
    UniformGrid grid(cfg_.bounds_min, cfg_.bounds_max,
                     2.0 * (cfg_.radius_mean + cfg_.radius_spread) + cfg_.skin);
    std::vector<Vec2> pos(grains_.size());
    for (std::size_t i = 0; i < grains_.size(); ++i) pos[i] = grains_[i].pos;
    grid.build(pos);
    grid.for_candidate_pairs([&](int i, int j) {
        const Grain& a = grains_[static_cast<std::size_t>(i)];
        const Grain& b = grains_[static_cast<std::size_t>(j)];
        const double reach = a.radius + b.radius;
        if (norm_sq(a.pos - b.pos) < reach * reach) out.emplace_back(i, j);
    });
    std::sort(out.begin(), out.end());
    return out;
}

bool GrainWorld::grains_inside_membrane() const {
    if (membrane_.size() == 0) return true;
    for (const Grain& g : grains_)
        if (!point_in_polygon(membrane_.pos, g.pos)) return false;
    return true;
}

void GrainWorld::check_finite() const {
    for (const Grain& g : grains_)
        if (!std::isfinite(g.pos.x) || !std::isfinite(g.pos.y) || !std::isfinite(g.vel.x) ||
            !std::isfinite(g.vel.y))
            throw BlowupError("non-finite grain state", step_count_);
    for (std::size_t i = 0; i < membrane_.size(); ++i)
        if (!std::isfinite(membrane_.pos[i].x) || !std::isfinite(membrane_.pos[i].y) ||
            !std::isfinite(membrane_.vel[i].x) || !std::isfinite(membrane_.vel[i].y))
            throw BlowupError("non-finite membrane state", step_count_);
}

GrainWorld build_world(const SimConfig& cfg) {
    GrainWorld world(cfg);
    world.set_drag(cfg.settle_drag);
    const double threshold =
        cfg.settle_energy * static_cast<double>(std::max(1, cfg.grain_count));
    bool growing = cfg.grow_scale < 1.0 && cfg.grain_count > 0;
    while (world.time() < cfg.settle_max_time) {
        world.step();
        if (growing && (world.step_count() & 511u) == 0u) {
            const double frac = std::min(1.0, world.time() / cfg.grow_time);
            world.apply_growth(cfg.grow_scale + (1.0 - cfg.grow_scale) * frac);
            if (frac >= 1.0) growing = false;
        }
        if ((world.step_count() & 63u) != 0u) continue;
        if (growing) continue;
        if (world.time() >= cfg.settle_min_time && world.kinetic_energy() < threshold &&
            world.max_speed() < 5.0)
            break;
    }
    world.set_drag(cfg.ambient_drag);
    for (Grain& g : world.grains_mut()) g.vel = Vec2{};
    Membrane& m = world.membrane_mut();
    std::fill(m.vel.begin(), m.vel.end(), Vec2{});
    world.reset_clock();
    world.reset_max_overlap();
    return world;
}

} // namespace gripsim

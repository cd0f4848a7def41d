#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gripsim/contact.hpp"
#include "gripsim/grid.hpp"
#include "gripsim/membrane.hpp"
#include "gripsim/vec2.hpp"

namespace gripsim {

struct Grain {
    Vec2 pos;
    Vec2 vel;
    double radius = 1.0; // mm
    double mass = 0.09;  // g
};

// Floor plane plus the target: a disk resting on the floor, both immovable.
struct StaticGeometry {
    double floor_y = 0.0;
    bool object_enabled = true;
    Vec2 object_center{0.0, 12.5};
    double object_radius = 12.5;
    // Friction against the printed floor/object surfaces, split by material:
    // rubbery membrane on plastic grips much harder than hard grains do.
    double membrane_surface_mu = 0.8;
    double grain_surface_mu = 0.35;
};

struct SimConfig {
    double dt = 3.0e-6;      // s
    double gravity = 9810.0; // mm/s^2, +y is up
    Vec2 bounds_min{-60.0, -10.0};
    Vec2 bounds_max{60.0, 160.0};
    int grain_count = 240;
    double radius_mean = 0.85;   // mm
    double radius_spread = 0.17; // mm, uniform in mean +- spread
    double total_grain_mass = 27.0; // g, split over grains proportional to r^2
    std::uint64_t rng_seed = 1;
    ContactParams contact{240.0, 0.5, 0.50, 120.0};
    MembraneConfig membrane;
    StaticGeometry geometry;
    double skin = 0.5;          // mm, neighbor-list margin
    double start_height = 100.0; // mm, mount height the world is assembled at
    // Exciter face riding above the mount point: a rigid plate pressing the
    // bag from above once it compresses against it. The offset is the clamped
    // neck stub between the attachment and the face. Halfwidth 0 disables.
    double plate_halfwidth = 18.0; // mm
    double plate_offset = 12.0;     // mm above the mount point
    // grains deposit at grow_scale of final size so they fit loosely, then
    // inflate to full size over grow_time while settling
    double grow_scale = 0.8;
    double grow_time = 0.25;        // s
    double settle_drag = 40.0;      // 1/s, extra viscous drag during initial settling
    double ambient_drag = 2.0;      // 1/s, air and internal dissipation during the run
    double settle_energy = 2.0e-11; // J per grain, settling stop threshold
    double settle_min_time = 0.6;   // s
    double settle_max_time = 2.5;   // s

    void validate() const;
};

struct BlowupError : std::runtime_error {
    BlowupError(const std::string& what, std::uint64_t step)
        : std::runtime_error(what + " at step " + std::to_string(step)), step_index(step) {}
    std::uint64_t step_index;
};

// Pair entries carry the tangential spring so contact history survives
// neighbor-list rebuilds.
struct GrainPair {
    std::int32_t i, j;
    double sum_r;    // r_i + r_j
    double m_eff;    // g
    double c_n;      // N*s/mm
    Vec2 slip;
};

struct EdgePair {
    std::int32_t grain, edge;
    double m_eff;
    double c_n;
    Vec2 slip;
};

class GrainWorld {
public:
    explicit GrainWorld(const SimConfig& cfg);

    // Kinematic drive, applied over the next step.
    void set_mount(double height_mm, double oscillation_mm);
    double mount_height() const { return mount_height_; }
    double mount_oscillation() const { return mount_osc_; }
    double mount_point_y() const { return mount_height_ + mount_osc_; }

    void set_delta_p(double kpa); // effective differential, ramping is the caller's job
    double delta_p() const { return delta_p_; }
    void set_drag(double per_s) { drag_ = per_s; }

    // Rescale all grains toward their deposit-time target size; scale in
    // (0, 1]. Used only while assembling a world.
    void apply_growth(double scale);

    void step();
    // Bookkeeping-only advance used when the pack is asleep: time moves,
    // state does not.
    void advance_time_frozen(double dt_s);
    void reset_clock() {
        time_ = 0.0;
        step_count_ = 0;
    }

    double time() const { return time_; }
    std::uint64_t step_count() const { return step_count_; }
    double dt() const { return cfg_.dt; }

    // N, push (upward reaction on the mount) positive; value from the last step
    double load_cell() const { return load_cell_; }

    double kinetic_energy() const;          // J, grains only
    double total_mechanical_energy() const; // J, includes free membrane nodes and springs
    double max_speed() const;               // mm/s over grains and nodes
    double packing_fraction() const;
    // Worst grain-grain overlap seen since the last reset, as a fraction of
    // the smaller radius of the pair.
    double max_overlap_ratio() const { return max_overlap_ratio_; }
    Vec2 max_overlap_pos() const { return max_overlap_pos_; }
    void reset_max_overlap() { max_overlap_ratio_ = 0.0; }

    // Grains pressing on the target through the membrane: grain has an active
    // edge contact whose edge also touches the object.
    int object_contact_count() const;
    // net vertical / total normal contact force the target disk applies to the
    // bag (grains + membrane), from the latest step
    double object_fy() const { return object_fy_; }
    double object_fn() const { return object_fn_; }
    // Lowest membrane-node y currently touching the target disk (99 if none).
    double contact_low_y() const;

    // Unordered grain pairs that actually overlap, ascending (i, j).
    std::vector<std::pair<int, int>> neighbor_pairs() const;

    bool grains_inside_membrane() const;

    const std::vector<Grain>& grains() const { return grains_; }
    // Mutating accessors invalidate cached neighbor lists.
    std::vector<Grain>& grains_mut() {
        pairs_valid_ = false;
        return grains_;
    }
    const Membrane& membrane() const { return membrane_; }
    Membrane& membrane_mut() {
        pairs_valid_ = false;
        return membrane_;
    }
    const SimConfig& config() const { return cfg_; }
    const StaticGeometry& geometry() const { return cfg_.geometry; }

    void check_finite() const; // throws BlowupError

private:
    void place_grains();
    void rebuild_pairs();
    void apply_contact_forces();
    void integrate();

    SimConfig cfg_;
    std::vector<Grain> grains_;
    std::vector<double> final_radius_;
    Membrane membrane_;
    UniformGrid grid_;

    std::vector<Vec2> grain_force_;
    std::vector<Vec2> node_force_;
    std::vector<Vec2> scratch_pos_;
    std::vector<Vec2> scratch_force_;
    std::vector<GrainPair> grain_pairs_;
    std::vector<EdgePair> edge_pairs_;
    std::vector<Vec2> grain_floor_slip_, grain_object_slip_, grain_plate_slip_;
    std::vector<Vec2> node_floor_slip_, node_object_slip_, node_plate_slip_;
    std::vector<double> grain_static_cn_;
    double plate_fz_ = 0.0;
    double node_static_cn_ = 0.0;

    double mount_height_ = 100.0;
    double mount_osc_ = 0.0;
    double prev_mount_y_ = 100.0;
    double delta_p_ = 0.0;
    double drag_ = 0.0;
    double load_cell_ = 0.0;
    double time_ = 0.0;
    std::uint64_t step_count_ = 0;
    double disp_accum_ = 0.0;
    double object_fy_ = 0.0;
    double object_fn_ = 0.0;
    double max_overlap_ratio_ = 0.0;
    Vec2 max_overlap_pos_{};
    double max_speed_ = 0.0;
    bool pairs_valid_ = false;
};

// Assemble and settle: place grains, relax under gravity with extra drag
// until the kinetic energy per grain drops below the threshold, then zero
// velocities and reset the clock.
GrainWorld build_world(const SimConfig& cfg);

// splitmix64; used wherever the project needs seeded integers mixed from
// several indices.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                       std::uint64_t d = 0);

// Uniform double in [0, 1) from an engine-agnostic 64-bit draw.
double uniform01(std::uint64_t raw);

} // namespace gripsim

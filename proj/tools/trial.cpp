// Scratch driver for a single grip cycle; not installed.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "gripsim/metrics.hpp"
#include "gripsim/rig.hpp"
#include "gripsim/world.hpp"

using namespace gripsim;

static void render_scene(const GrainWorld& w, const char* path) {
    std::ofstream out(path);
    const double s = 6.0; // px per mm
    auto X = [&](double x) { return 300.0 + s * x; };
    auto Y = [&](double y) { return 700.0 - s * y; };
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='600' height='720'>\n";
    out << "<line x1='0' y1='" << Y(0) << "' x2='600' y2='" << Y(0)
        << "' stroke='black'/>\n";
    const auto& geo = w.geometry();
    if (geo.object_enabled)
        out << "<circle cx='" << X(geo.object_center.x) << "' cy='"
            << Y(geo.object_center.y) << "' r='" << s * geo.object_radius
            << "' fill='#bbb'/>\n";
    out << "<polygon points='";
    for (const auto& p : w.membrane().pos) out << X(p.x) << "," << Y(p.y) << " ";
    out << "' fill='none' stroke='red'/>\n";
    for (const auto& g : w.grains())
        out << "<circle cx='" << X(g.pos.x) << "' cy='" << Y(g.pos.y) << "' r='"
            << s * g.radius << "' fill='none' stroke='blue'/>\n";
    out << "<line x1='" << X(-5) << "' y1='" << Y(w.mount_point_y()) << "' x2='"
        << X(5) << "' y2='" << Y(w.mount_point_y()) << "' stroke='green'/>\n";
    out << "</svg>\n";
}

int main(int argc, char** argv) {
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
    const double volume = argc > 2 ? std::atof(argv[2]) : 150.0;
    const double freq = argc > 3 ? std::atof(argv[3]) : 200.0;

    SimConfig cfg;
    cfg.rng_seed = seed;

    GripCycleConfig rig;
    WaveformSpec wf = WaveformSpec::tone(freq, volume, 25.0);
    PressureState vacuum;

    if (argc > 6 && argv[6][0] == 'a') { // vibrate during the dwell instead
        rig.vibration_window = VibrationWindow::AfterPushdown;
        rig.after_pushdown_duration = 1.0;
    }

    if (argc > 7) { // probe mode: overlap/load/contact depth through a shortened cycle
        rig.vacuum_hold = 2.0;
        GrainWorld w3 = build_world(cfg);
        RigState st;
        st.phase = Phase::PreGrip;
        st.mount_height = rig.start_height;
        w3.set_mount(st.mount_height, 0.0);
        double next_report = 0.0;
        double prev_mount = rig.start_height;
        while (st.phase != Phase::Release) {
            st = advance(st, rig, wf, w3.dt());
            if (st.phase == Phase::Vacuum)
                w3.set_delta_p(effective_delta_p(vacuum, st.phase_elapsed));
            else if (st.phase == Phase::Lift)
                w3.set_delta_p(effective_delta_p(vacuum, rig.vacuum_hold));
            w3.set_mount(st.mount_height, st.mount_oscillation_offset);
            w3.step();
            if (st.elapsed >= next_report) {
                std::printf("  t %6.2f mount %6.2f load %9.3f ovl %.3f at (%6.2f,%6.2f) "
                            "ctc %2d low %5.1f vmax %8.1f ofy %7.3f ofn %7.3f\n",
                            st.elapsed, st.mount_height, w3.load_cell(),
                            w3.max_overlap_ratio(), w3.max_overlap_pos().x,
                            w3.max_overlap_pos().y, w3.object_contact_count(),
                            w3.contact_low_y(), w3.max_speed(), w3.object_fy(),
                            w3.object_fn());
                w3.reset_max_overlap();
                next_report += st.elapsed > 2.3 && st.elapsed < 2.7 ? 0.02 : 0.1;
            }
            if (st.phase == Phase::Lift) {
                static const double snaps[] = {36.0, 44.0, 52.0, 60.0, 68.0};
                for (double h : snaps)
                    if (prev_mount < h && st.mount_height >= h) {
                        char path[64];
                        std::snprintf(path, sizeof path, "/tmp/lift_m%02d.svg", (int)h);
                        render_scene(w3, path);
                    }
            }
            prev_mount = st.mount_height;
        }
        return 0;
    }

    auto t0 = std::chrono::steady_clock::now();
    GrainWorld world = build_world(cfg);
    auto t1 = std::chrono::steady_clock::now();
    ForceTrace trace = run_grip_cycle(world, rig, wf, vacuum);
    auto t2 = std::chrono::steady_clock::now();

    const double settle_s = std::chrono::duration<double>(t1 - t0).count();
    const double cycle_s = std::chrono::duration<double>(t2 - t1).count();
    std::printf("seed %llu vol %.0f%% f %.0f Hz: settle %.2f s, cycle %.2f s wall\n",
                (unsigned long long)seed, volume, freq, settle_s, cycle_s);
    for (const auto& m : trace.marks)
        std::printf("  %-8s starts %8.3f s\n", phase_name(m.phase), m.t);

    ForceMetrics fm = extract_metrics(trace);
    {
        const double t_lift = trace.mark_time(Phase::Lift);
        const double t_rel = trace.mark_time(Phase::Release);
        double lo = 1e30, lo_t = 0.0;
        for (const auto& e : trace.entries)
            if (e.first >= t_lift && e.first <= t_rel && e.second < lo) {
                lo = e.second;
                lo_t = e.first;
            }
        std::printf("  lift min load %.3f N at %.2f s\n", lo, lo_t);
    }
    std::printf("  push %.3f N at %.2f s\n", fm.push_force, fm.push_time);
    if (fm.hold_detected)
        std::printf("  holding %.3f N at %.2f s (crossed zero at %.2f s)\n",
                    fm.holding_force, fm.holding_time, fm.zero_crossing_time);
    else
        std::printf("  no hold detected\n");
    if (fm.interlock_force)
        std::printf("  interlock %.3f N\n", *fm.interlock_force);
    std::printf("  contacts on object at end: %d, contained %d, max overlap %.3f\n",
                world.object_contact_count(), (int)world.grains_inside_membrane(),
                world.max_overlap_ratio());

    if (argc > 4) {
        write_trace_csv(trace, argv[4]);
        std::printf("  trace -> %s\n", argv[4]);
    }

    if (argc > 5 && argv[5][0] != '-') { // dump scene snapshots at phase ends into directory argv[5]
        const Phase stops[] = {Phase::Descend, Phase::Dwell, Phase::Vacuum,
                               Phase::Lift};
        for (Phase stop : stops) {
            GrainWorld w2 = build_world(cfg);
            run_grip_cycle(w2, rig, wf, vacuum, stop);
            std::string p = std::string(argv[5]) + "/scene_" + phase_name(stop) + ".svg";
            render_scene(w2, p.c_str());
            std::printf("  %s (mount %.1f, contacts %d)\n", p.c_str(),
                        w2.mount_height(), w2.object_contact_count());
        }
    }
    return 0;
}

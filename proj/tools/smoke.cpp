// scratch harness used while bringing the engine up; not installed
#include <chrono>
#include <cstdio>
#include <string>

#include "gripsim/world.hpp"

using namespace gripsim;

int main(int argc, char** argv) {
    SimConfig cfg;
    if (argc > 1) cfg.rng_seed = std::stoull(argv[1]);
    auto t0 = std::chrono::steady_clock::now();
    GrainWorld world = build_world(cfg);
    auto t1 = std::chrono::steady_clock::now();
    std::printf("settled in %.2f s wall, %llu steps\n",
                std::chrono::duration<double>(t1 - t0).count(),
                static_cast<unsigned long long>(world.step_count()));

    double lo = 1e9, hi = -1e9, left = 1e9, right = -1e9;
    for (const Grain& g : world.grains()) {
        lo = std::min(lo, g.pos.y - g.radius);
        hi = std::max(hi, g.pos.y + g.radius);
        left = std::min(left, g.pos.x - g.radius);
        right = std::max(right, g.pos.x + g.radius);
    }
    double mlo = 1e9, mhi = -1e9, mleft = 1e9, mright = -1e9;
    for (const Vec2& p : world.membrane().pos) {
        mlo = std::min(mlo, p.y);
        mhi = std::max(mhi, p.y);
        mleft = std::min(mleft, p.x);
        mright = std::max(mright, p.x);
    }
    std::printf("grains y [%.2f, %.2f] x [%.2f, %.2f]\n", lo, hi, left, right);
    std::printf("membrane y [%.2f, %.2f] x [%.2f, %.2f] (hang below mount %.2f)\n", mlo, mhi,
                mleft, mright, 100.0 - mlo);
    std::printf("packing fraction %.3f\n", world.packing_fraction());
    std::printf("contained %d  pairs %zu  max overlap ratio %.3f\n",
                world.grains_inside_membrane() ? 1 : 0, world.neighbor_pairs().size(),
                world.max_overlap_ratio());
    std::printf("load cell %.4f N (bag weight %.4f N)\n", world.load_cell(),
                (27.0 + 96 * 0.08) * 9810.0 * 1e-6);

    // raw stepping rate
    t0 = std::chrono::steady_clock::now();
    const int n = 50000;
    for (int i = 0; i < n; ++i) world.step();
    t1 = std::chrono::steady_clock::now();
    std::printf("step rate: %.2f us/step\n",
                std::chrono::duration<double>(t1 - t0).count() / n * 1e6);
    std::printf("KE after %.0f ms free run: %.3e J, max overlap %.3f\n", n * cfg.dt * 1e3,
                world.kinetic_energy(), world.max_overlap_ratio());
    return 0;
}

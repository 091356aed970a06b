// Minimal end-to-end usage example: build a vehicle from a mesh, drive it
// into a wall, and print how the damage spreads front to back.

#include <cstdio>
#include <vector>

#include "crumple/crumple.hpp"

int main(int argc, char** argv) {
    using namespace crumple;

    if (argc != 2) {
        std::fprintf(stderr, "usage: crash_demo <car.obj>\n");
        return 1;
    }

    Scenario scenario;
    scenario.mesh_path = argv[1];
    scenario.control_points = 32;
    scenario.initial_pose.position = {0.0, 0.78, 0.0};
    scenario.initial_velocity = {20.0, 0.0, 0.0};
    scenario.obstacles.push_back({HalfSpace{{0, 0, 0}, {0, 1, 0}}, 0.3});   // ground
    scenario.obstacles.push_back({HalfSpace{{6, 0, 0}, {-1, 0, 0}}, 0.5});  // wall

    const SurfaceMesh mesh = load_obj_file(scenario.mesh_path.string());
    BuildResult build = build_vehicle(scenario, mesh);
    VehicleWorld& world = build.world;
    std::printf("control mesh: %d points (%d on hull), %zu constraints\n",
                static_cast<int>(world.nodes.size()), build.achieved_points,
                world.constraints.size());

    std::uint64_t plastic = 0;
    for (int i = 0; i < 360; ++i) {
        plastic += step(world).plastic_events;
        if (i % 60 == 59) {
            std::printf("t=%5.2f s  x=%7.3f m  speed=%7.3f m/s  plastic=%llu\n", world.clock,
                        world.core.position.x, world.core.linear_velocity.norm(),
                        static_cast<unsigned long long>(plastic));
        }
    }

    // Damage profile along the body, front (largest x) to rear.
    double lo = 1e30, hi = -1e30;
    for (const NodeState& n : world.nodes) {
        lo = std::min(lo, n.body_rest_initial.x);
        hi = std::max(hi, n.body_rest_initial.x);
    }
    constexpr int kBins = 8;
    double dent[kBins] = {};
    int count[kBins] = {};
    for (const NodeState& n : world.nodes) {
        int bin = static_cast<int>((hi - n.body_rest_initial.x) / (hi - lo) * kBins);
        bin = std::min(bin, kBins - 1);
        dent[bin] += (n.body_rest - n.body_rest_initial).norm();
        ++count[bin];
    }
    std::printf("\nmean permanent dent by longitudinal slice (front -> rear):\n");
    for (int b = 0; b < kBins; ++b) {
        std::printf("  slice %d: %6.1f mm%s\n", b,
                    count[b] ? dent[b] / count[b] * 1000.0 : 0.0, count[b] ? "" : " (empty)");
    }
    return 0;
}

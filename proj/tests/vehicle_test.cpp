#include <gtest/gtest.h>

#include <cstring>
#include <random>
#include <vector>

#include "crumple/harness.hpp"
#include "crumple/vehicle.hpp"
#include "support/test_meshes.hpp"

using namespace crumple;

namespace {

const SurfaceMesh& car_mesh() {
    static const SurfaceMesh mesh = crumple::testing::make_car_mesh();
    return mesh;
}

Scenario base_scenario() {
    Scenario s;
    s.mesh_path = "unused";
    s.control_points = 32;
    return s;
}

Scenario crash_scenario() {
    Scenario s = base_scenario();
    s.initial_pose.position = {0, 0.78, 0};
    s.initial_velocity = {20, 0, 0};
    s.obstacles.push_back({HalfSpace{{0, 0, 0}, {0, 1, 0}}, 0.3});
    s.obstacles.push_back({HalfSpace{{6, 0, 0}, {-1, 0, 0}}, 0.5});
    return s;
}

/// Mean permanent body-frame displacement over a longitudinal slice.
double mean_rest_delta(const VehicleWorld& world, double x_lo, double x_hi) {
    double sum = 0.0;
    int count = 0;
    for (const NodeState& n : world.nodes) {
        if (n.body_rest_initial.x >= x_lo && n.body_rest_initial.x <= x_hi) {
            sum += (n.body_rest - n.body_rest_initial).norm();
            ++count;
        }
    }
    return count ? sum / count : 0.0;
}

}  // namespace

TEST(Assemble, ConstraintCountMatchesEdgeList) {
    // The unit cube control mesh has 18 hull edges plus 8 centroid spokes.
    const auto pts = crumple::testing::unit_cube_corners();
    const HullMesh hull = convex_hull(pts);
    const ControlMesh control = tetrahedralize_and_mass(hull, 100.0);

    SurfaceMesh surface;
    surface.vertices = pts;
    surface.triangles = hull.triangles;

    BindingTable binding = compute_weights(surface, control.rest_points, 3.5);
    const VehicleWorld world = assemble(surface, control, std::move(binding), AssemblyConfig{});
    EXPECT_EQ(world.constraints.size(), control.edges.size());
    EXPECT_EQ(world.constraints.size(), 26u);
    EXPECT_EQ(world.nodes.size(), control.rest_points.size());
}

TEST(Assemble, MismatchedBindingRejected) {
    const auto pts = crumple::testing::unit_cube_corners();
    const HullMesh hull = convex_hull(pts);
    const ControlMesh control = tetrahedralize_and_mass(hull, 100.0);

    SurfaceMesh surface;
    surface.vertices = pts;
    surface.triangles = hull.triangles;

    // Built against the hull points only, missing the centroid node.
    BindingTable binding = compute_weights(surface, hull.points, 3.5);
    EXPECT_THROW(assemble(surface, control, std::move(binding), AssemblyConfig{}), AssemblyError);
}

TEST(Assemble, RestStateIsStable) {
    Scenario s = base_scenario();
    s.gravity = {0, 0, 0};
    BuildResult build = build_vehicle(s, car_mesh());

    const auto initial = sync_surface(build.world);
    const std::vector<Vec3> reference(initial.begin(), initial.end());
    for (int i = 0; i < 100; ++i) step(build.world);
    const auto after = sync_surface(build.world);
    double worst = 0.0;
    for (std::size_t j = 0; j < reference.size(); ++j) {
        worst = std::max(worst, distance(after[j], reference[j]));
    }
    EXPECT_LT(worst, 1e-6);
}

TEST(Vehicle, RigidTransportProducesNoStrain) {
    BuildResult build = build_vehicle(base_scenario(), car_mesh());
    VehicleWorld& world = build.world;

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst_strain = 0.0;
    double worst_surface = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const Pose pose{{20.0 * u(rng), 20.0 * u(rng), 20.0 * u(rng)},
                        Quat::from_axis_angle({u(rng), u(rng) + 1.5, u(rng)}, 3.0 * u(rng))};
        set_pose(world, pose);

        for (const DistanceConstraint& c : world.constraints) {
            const double len = distance(world.nodes[c.node_a].position,
                                        world.nodes[c.node_b].position);
            worst_strain = std::max(worst_strain, std::abs(len - c.rest_length) / c.rest_length);
        }
        const auto surf = sync_surface(world);
        for (std::size_t j = 0; j < surf.size(); ++j) {
            worst_surface =
                std::max(worst_surface, distance(surf[j], pose.apply(world.rest_surface_body[j])));
        }
    }
    EXPECT_LT(worst_strain, 1e-9);
    EXPECT_LT(worst_surface, 1e-6);
}

TEST(Vehicle, CoastingStaysPlasticFree) {
    Scenario s = base_scenario();
    s.initial_pose.position = {0, 0.78, 0};
    s.initial_velocity = {6, 0, 0};
    s.obstacles.push_back({HalfSpace{{0, 0, 0}, {0, 1, 0}}, 0.2});
    BuildResult build = build_vehicle(s, car_mesh());

    std::uint64_t plastic = 0;
    for (int i = 0; i < 360; ++i) plastic += step(build.world).plastic_events;
    EXPECT_EQ(plastic, 0u);
    for (const NodeState& n : build.world.nodes) {
        EXPECT_EQ(n.body_rest, n.body_rest_initial);
    }
}

TEST(Vehicle, WallCrashDeformsFrontMoreThanRear) {
    BuildResult build = build_vehicle(crash_scenario(), car_mesh());
    VehicleWorld& world = build.world;

    std::uint64_t plastic = 0;
    std::uint64_t previous_cumulative = 0;
    for (int i = 0; i < 360; ++i) {
        plastic += step(world).plastic_events;
        // Damage only accumulates.
        EXPECT_GE(world.cumulative_plastic_events, previous_cumulative);
        previous_cumulative = world.cumulative_plastic_events;
        // Visual clamp holds after every step.
        for (const NodeState& n : world.nodes) {
            EXPECT_LE(distance(n.body_rest, n.body_rest_initial),
                      world.params.max_deviation + 1e-12);
        }
    }
    EXPECT_GT(plastic, 0u);

    double lo = 1e30, hi = -1e30;
    for (const NodeState& n : world.nodes) {
        lo = std::min(lo, n.body_rest_initial.x);
        hi = std::max(hi, n.body_rest_initial.x);
    }
    const double third = (hi - lo) / 3.0;
    const double front = mean_rest_delta(world, hi - third, hi + 1.0);
    const double rear = mean_rest_delta(world, lo - 1.0, lo + third);
    EXPECT_GT(front, 0.01);
    EXPECT_GE(front, rear);
    EXPECT_LT(rear, front);

    // Front nodes moved rearward in the body frame.
    int moved_back = 0, moved_forward = 0;
    for (const NodeState& n : world.nodes) {
        if (n.body_rest_initial.x < hi - third) continue;
        const double dx = (n.body_rest - n.body_rest_initial).x;
        if (dx < -1e-3) ++moved_back;
        if (dx > 1e-3) ++moved_forward;
    }
    EXPECT_GT(moved_back, 0);
    EXPECT_EQ(moved_forward, 0);
}

TEST(Vehicle, CrashComesToRest) {
    BuildResult build = build_vehicle(crash_scenario(), car_mesh());
    for (int i = 0; i < 360; ++i) step(build.world);
    EXPECT_LT(build.world.core.linear_velocity.norm(), 0.1);
}

TEST(Vehicle, IdenticalRunsProduceIdenticalReports) {
    auto run = [&]() {
        BuildResult build = build_vehicle(crash_scenario(), car_mesh());
        std::vector<FrameReport> reports;
        for (int i = 0; i < 240; ++i) reports.push_back(step(build.world));
        return reports;
    };
    const auto a = run();
    const auto b = run();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].clock, b[i].clock);
        EXPECT_EQ(a[i].max_strain, b[i].max_strain);
        EXPECT_EQ(a[i].plastic_events, b[i].plastic_events);
        EXPECT_EQ(a[i].contacts, b[i].contacts);
    }
}

TEST(Drive, ZeroThrottleAppliesNoForce) {
    Scenario s = base_scenario();
    s.gravity = {0, 0, 0};
    BuildResult build = build_vehicle(s, car_mesh());
    drive(build.world, 0.0, 0.3);
    for (int i = 0; i < 50; ++i) step(build.world);
    EXPECT_EQ(build.world.core.linear_velocity.norm(), 0.0);
}

TEST(Drive, FullThrottleMatchesImpulseEstimate) {
    Scenario s = base_scenario();
    s.gravity = {0, 0, 0};
    BuildResult build = build_vehicle(s, car_mesh());
    drive(build.world, 1.0, 0.0);
    const double t = 0.25;
    const int steps = static_cast<int>(t / s.dt);
    for (int i = 0; i < steps; ++i) step(build.world);
    const double expected = s.core.max_drive_force * (steps * s.dt) / s.mass;
    EXPECT_NEAR(build.world.core.linear_velocity.norm(), expected, expected * 0.05);
}

TEST(Drive, StraightLineStaysInVerticalPlane) {
    // An analytically z-symmetric box car: the hull is exactly its 8 corners.
    SurfaceMesh box;
    for (const double x : {-2.0, 2.0}) {
        for (const double y : {-0.5, 0.5}) {
            for (const double z : {-0.8, 0.8}) {
                box.vertices.push_back({x, y, z});
            }
        }
    }
    const HullMesh hull = convex_hull(box.vertices);
    box.triangles = hull.triangles;

    Scenario s = base_scenario();
    s.control_points = 8;
    s.gravity = {0, 0, 0};
    BuildResult build = build_vehicle(s, box);
    drive(build.world, 1.0, 0.0);
    for (int i = 0; i < 120; ++i) step(build.world);
    EXPECT_LT(std::abs(build.world.core.position.z), 1e-6);
    EXPECT_GT(build.world.core.position.x, 1.0);
}

TEST(Drive, SteeringTurnsTheVehicle) {
    Scenario s = base_scenario();
    s.initial_pose.position = {0, 0.78, 0};
    s.obstacles.push_back({HalfSpace{{0, 0, 0}, {0, 1, 0}}, 0.05});
    BuildResult build = build_vehicle(s, car_mesh());
    drive(build.world, 1.0, 0.3);
    for (int i = 0; i < 240; ++i) step(build.world);
    EXPECT_GT(std::abs(build.world.core.angular_velocity.y), 1e-4);
}

TEST(Vehicle, ThrottleClampedToUnitRange) {
    Scenario s = base_scenario();
    BuildResult build = build_vehicle(s, car_mesh());
    drive(build.world, 7.5, 0.0);
    EXPECT_EQ(build.world.throttle, 1.0);
    drive(build.world, -3.0, 0.0);
    EXPECT_EQ(build.world.throttle, -1.0);
}

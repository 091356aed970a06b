#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <span>
#include <vector>

#include "crumple/binding.hpp"
#include "crumple/collision.hpp"
#include "crumple/control_mesh.hpp"
#include "crumple/dynamics.hpp"
#include "crumple/error.hpp"
#include "crumple/math.hpp"
#include "crumple/rigid_core.hpp"
#include "crumple/surface_mesh.hpp"

namespace crumple {

/// Shell material behavior plus the shell-to-chassis coupling strength.
/// attachment_yield is the deviation (meters) past which a node's body-frame
/// rest position migrates, making the dent permanent.
struct MaterialParams {
    double stiffness = 0.9;
    double yield_strain = 0.08;
    double break_strain = 0.5;
    double max_deviation = 0.4;
    double attachment_stiffness = 0.9;
    double attachment_yield = 0.05;
};

/// Rigid-chassis configuration. Wheel offsets are given in mesh coordinates
/// (FL, FR, RL, RR) and re-centered on the mass centroid during assembly;
/// they should sit below the body shell so the vehicle rides on its wheels.
/// A zero inertia vector requests the diagonal derived from the control-node
/// masses.
struct CoreParams {
    Vec3 inertia_diag{0.0, 0.0, 0.0};
    std::array<Vec3, 4> wheel_offsets{
        Vec3{1.3, -0.75, 0.75}, Vec3{1.3, -0.75, -0.75},
        Vec3{-1.3, -0.75, 0.75}, Vec3{-1.3, -0.75, -0.75}};
    double max_drive_force = 8000.0;
};

struct AssemblyConfig {
    MaterialParams material;
    SolverParams solver;
    CoreParams core;
    Vec3 gravity{0.0, -9.81, 0.0};
    Pose initial_pose;
    Vec3 initial_velocity;
    Vec3 initial_angular_velocity;
    std::vector<Obstacle> obstacles;
};

/// Per-frame record. The wall-clock fields are measurements, not simulation
/// state; deterministic artifacts must not include them.
struct FrameReport {
    std::uint64_t frame = 0;
    double clock = 0.0;
    double max_strain = 0.0;
    std::uint32_t plastic_events = 0;
    std::uint32_t contacts = 0;
    double step_us = 0.0;
    double apply_us = 0.0;
};

/// Fraction of a contact's position correction fed back to the chassis per
/// step. Full feedback rings at the time-step frequency; this value settles.
inline constexpr double kContactBias = 0.2;

/// Wheel-ground coupling. Each wheel carries a quarter of the chassis mass.
/// The support impulse cancels the wheel point's normal velocity and steers
/// the sink depth toward kWheelRest (think tire squash); at that depth the
/// bias term vanishes and the velocity term alone carries the weight, which
/// makes standing still an exact fixed point instead of a limit cycle. The
/// grip factor scales how much tangential velocity the ground's friction
/// removes per step (rolling resistance, not a hard skid).
inline constexpr double kWheelBias = 0.3;
inline constexpr double kWheelRest = 0.005;
inline constexpr double kWheelGrip = 0.1;

struct VehicleWorld {
    RigidCore core;
    double max_drive_force = 0.0;
    std::vector<NodeState> nodes;
    std::vector<DistanceConstraint> constraints;
    MaterialParams material;
    SolverParams params;
    Vec3 gravity;
    BindingTable binding;
    std::vector<Vec3> rest_surface_body;  // surface vertices, mass-centered body frame
    std::vector<std::array<int, 3>> surface_triangles;
    std::vector<Obstacle> obstacles;
    double throttle = 0.0;
    double steer = 0.0;
    double clock = 0.0;
    std::uint64_t frame = 0;
    std::uint64_t cumulative_plastic_events = 0;

    // Scratch reused across steps.
    std::vector<Vec3> deformed_surface;
    std::vector<AttachmentConstraint> attachments;
    std::vector<Vec3> accelerations;
    std::vector<Vec3> scratch_rest;
    std::vector<Vec3> scratch_control_rest;
    std::vector<Vec3> scratch_control_current;
};

/// Builds the simulated vehicle: distance constraints from the control-mesh
/// edges, node masses from the tetrahedral distribution, body-frame rests
/// re-centered on the mass centroid, and world state placed at the initial
/// pose.
inline VehicleWorld assemble(const SurfaceMesh& surface, const ControlMesh& control,
                             BindingTable binding, const AssemblyConfig& config) {
    if (!binding.built_against(surface.vertices.size(), control.rest_points.size())) {
        throw AssemblyError("binding table was built for different vertex/control counts");
    }
    if (control.node_masses.size() != control.rest_points.size()) {
        throw AssemblyError("control mesh is missing node masses");
    }

    VehicleWorld world;
    world.material = config.material;
    world.params = config.solver;
    world.params.max_deviation = config.material.max_deviation;
    world.gravity = config.gravity;
    world.binding = std::move(binding);
    world.surface_triangles = surface.triangles;
    world.obstacles = config.obstacles;
    world.max_drive_force = config.core.max_drive_force;

    double total_mass = 0.0;
    Vec3 com;
    for (std::size_t i = 0; i < control.rest_points.size(); ++i) {
        total_mass += control.node_masses[i];
        com += control.rest_points[i] * control.node_masses[i];
    }
    com = com / total_mass;

    world.core.mass = total_mass;
    world.core.position = config.initial_pose.apply(com);
    world.core.orientation = config.initial_pose.orientation;
    world.core.linear_velocity = config.initial_velocity;
    world.core.angular_velocity = config.initial_angular_velocity;
    for (std::size_t w = 0; w < 4; ++w) {
        world.core.wheel_offsets[w] = config.core.wheel_offsets[w] - com;
    }

    world.nodes.resize(control.rest_points.size());
    const Pose core_pose = world.core.pose();
    for (std::size_t i = 0; i < control.rest_points.size(); ++i) {
        NodeState& n = world.nodes[i];
        n.body_rest = control.rest_points[i] - com;
        n.body_rest_initial = n.body_rest;
        n.position = core_pose.apply(n.body_rest);
        n.prev_position = n.position;
        n.inverse_mass = 1.0 / control.node_masses[i];
    }

    if (config.core.inertia_diag == Vec3{0.0, 0.0, 0.0}) {
        Vec3 inertia;
        for (const NodeState& n : world.nodes) {
            const Vec3& r = n.body_rest;
            const double m = 1.0 / n.inverse_mass;
            inertia += Vec3{m * (r.y * r.y + r.z * r.z), m * (r.x * r.x + r.z * r.z),
                            m * (r.x * r.x + r.y * r.y)};
        }
        world.core.inertia_diag = inertia;
    } else {
        world.core.inertia_diag = config.core.inertia_diag;
    }

    world.constraints.reserve(control.edges.size());
    for (const auto& e : control.edges) {
        DistanceConstraint c;
        c.node_a = e[0];
        c.node_b = e[1];
        c.rest_length = distance(world.nodes[e[0]].body_rest, world.nodes[e[1]].body_rest);
        c.stiffness = config.material.stiffness;
        c.yield_strain = config.material.yield_strain;
        c.break_strain = config.material.break_strain;
        world.constraints.push_back(c);
    }

    world.rest_surface_body.reserve(surface.vertices.size());
    for (const Vec3& v : surface.vertices) {
        world.rest_surface_body.push_back(v - com);
    }

    world.deformed_surface.resize(surface.vertices.size());
    world.attachments.resize(world.nodes.size());
    world.accelerations.assign(world.nodes.size(), world.gravity);
    return world;
}

/// Sets the persistent drive command. Forces materialize at the wheels during
/// each step: rear wheels push along body forward, front wheels along forward
/// rotated by the steering angle about body up. Throttle is clamped to
/// [-1, 1].
inline void drive(VehicleWorld& world, double throttle, double steer) {
    world.throttle = std::clamp(throttle, -1.0, 1.0);
    world.steer = steer;
}

/// Rigid transport: moves the core and every node to the new pose while
/// preserving all body-frame state and zeroing velocities.
inline void set_pose(VehicleWorld& world, const Pose& pose) {
    world.core.position = pose.position;
    world.core.orientation = pose.orientation;
    world.core.linear_velocity = Vec3{};
    world.core.angular_velocity = Vec3{};
    for (NodeState& n : world.nodes) {
        n.position = pose.apply(n.body_rest);
        n.prev_position = n.position;
    }
}

/// Recomputes the deformed surface from the current node positions. The
/// deformation is expressed relative to the moving rigid frame: both the rest
/// vertices and the rest control points are mapped through the core pose, so
/// an undeformed shell reproduces the rigidly transported rest surface.
inline std::span<const Vec3> sync_surface(VehicleWorld& world) {
    const Pose pose = world.core.pose();
    auto& rest = world.scratch_rest;
    auto& c_rest = world.scratch_control_rest;
    auto& c_cur = world.scratch_control_current;

    rest.resize(world.rest_surface_body.size());
    for (std::size_t j = 0; j < rest.size(); ++j) {
        rest[j] = pose.apply(world.rest_surface_body[j]);
    }
    c_rest.resize(world.nodes.size());
    c_cur.resize(world.nodes.size());
    for (std::size_t i = 0; i < world.nodes.size(); ++i) {
        c_rest[i] = pose.apply(world.nodes[i].body_rest_initial);
        c_cur[i] = world.nodes[i].position;
    }
    apply_deformation(rest, world.binding, c_rest, c_cur, world.deformed_surface);
    return world.deformed_surface;
}

/// The settled damage shape: the surface driven by the plastically migrated
/// body rests under the current pose, with all transient elastic offsets
/// removed. This is exactly the state a deformation snapshot captures.
inline std::vector<Vec3> permanent_surface(const VehicleWorld& world) {
    const Pose pose = world.core.pose();
    std::vector<Vec3> rest(world.rest_surface_body.size());
    for (std::size_t j = 0; j < rest.size(); ++j) {
        rest[j] = pose.apply(world.rest_surface_body[j]);
    }
    std::vector<Vec3> c_rest(world.nodes.size());
    std::vector<Vec3> c_cur(world.nodes.size());
    for (std::size_t i = 0; i < world.nodes.size(); ++i) {
        c_rest[i] = pose.apply(world.nodes[i].body_rest_initial);
        c_cur[i] = pose.apply(world.nodes[i].body_rest);
    }
    return apply_deformation(rest, world.binding, c_rest, c_cur);
}

/// Advances one frame: rigid core under gravity and wheel forces, shell solve
/// with attachments and contacts, contact impulses fed back to the core,
/// attachment plasticity with the deviation clamp, then surface refresh.
inline FrameReport step(VehicleWorld& world) {
    const auto t_begin = std::chrono::steady_clock::now();
    const double dt = world.params.dt;

    // (1) Wheel forces and core integration.
    Vec3 force, torque;
    if (world.throttle != 0.0) {
        const double per_wheel = world.throttle * world.max_drive_force / 4.0;
        const Quat steer_rot = Quat::from_axis_angle({0, 1, 0}, world.steer);
        for (std::size_t w = 0; w < 4; ++w) {
            const bool front = w < 2;
            const Vec3 dir_body = front ? steer_rot.rotate({1, 0, 0}) : Vec3{1, 0, 0};
            const Vec3 f = world.core.orientation.rotate(dir_body) * per_wheel;
            force += f;
            torque += world.core.orientation.rotate(world.core.wheel_offsets[w]).cross(f);
        }
    }
    integrate_velocities(world.core, force, torque, world.gravity, dt);

    // (1b) Ground reaction at the wheels, against half-space obstacles only:
    // the vehicle rides on its wheels while every deformable contact (walls,
    // posts, rollovers) still flows through the shell nodes. Each wheel
    // cancels its quarter-mass share of approach velocity plus a bias on the
    // remaining sink, and bleeds tangential speed per the ground friction.
    // Running between the velocity and pose halves of the integrator makes a
    // parked vehicle an exact fixed point.
    const double quarter_mass = world.core.mass / 4.0;
    for (const Vec3& offset : world.core.wheel_offsets) {
        const Vec3 p = world.core.pose().apply(offset);
        for (const Obstacle& ob : world.obstacles) {
            const HalfSpace* ground = std::get_if<HalfSpace>(&ob.shape);
            if (!ground) continue;
            const double pen = -(p - ground->point).dot(ground->normal);
            if (pen <= 0.0) continue;
            const Vec3 arm = p - world.core.position;
            const Vec3 v_point =
                world.core.linear_velocity + world.core.angular_velocity.cross(arm);
            const double normal_speed = std::max(
                0.0, kWheelBias * (pen - kWheelRest) / dt - v_point.dot(ground->normal));
            const Vec3 tangential =
                v_point - ground->normal * v_point.dot(ground->normal);
            const Vec3 impulse = ground->normal * (quarter_mass * normal_speed) -
                                 tangential * (quarter_mass * kWheelGrip * ob.friction);
            apply_impulse(world.core, impulse, p);
        }
    }
    advance_pose(world.core, dt);

    // (2) Attachment targets under the new pose.
    const Pose pose = world.core.pose();
    for (std::size_t i = 0; i < world.nodes.size(); ++i) {
        world.attachments[i] = {static_cast<int>(i), pose.apply(world.nodes[i].body_rest),
                                world.material.attachment_stiffness};
    }

    // (3) Shell solve with collision resolution. The callback fires before and
    // after the projection rounds; contacts from both passes accumulate.
    std::vector<Contact> contacts;
    const StepReport solver_report =
        solve_step(std::span<NodeState>(world.nodes), std::span<DistanceConstraint>(world.constraints),
                   world.attachments, world.params, world.accelerations,
                   [&](std::span<NodeState> nodes) {
                       auto pass = resolve_contacts(nodes, world.obstacles);
                       contacts.insert(contacts.end(), pass.begin(), pass.end());
                   });

    // (3b) Attachment plasticity: past the yield deviation the body rest
    // migrates toward where the node actually sits, then the visual clamp
    // bounds the total dent.
    std::uint32_t attachment_plastic = 0;
    for (NodeState& n : world.nodes) {
        const Vec3 body_pos = pose.to_body(n.position);
        const Vec3 dev = body_pos - n.body_rest;
        const double d = dev.norm();
        if (d > world.material.attachment_yield) {
            n.body_rest += dev * (1.0 - world.material.attachment_yield / d);
            ++attachment_plastic;
        }
        clamp_deviation(n, world.params.max_deviation);
    }

    // (4) Contact impulses back to the core; this is what makes the vehicle
    // stop against a wall while the deformation itself stays cosmetic. Each
    // contact cancels the chassis's remaining approach velocity at the point
    // (weighted by node mass, so it can slow but never fling the vehicle) and
    // adds a small slice of the position correction as static support; the
    // tangential term hands the friction loss to the chassis.
    for (const Contact& c : contacts) {
        const NodeState& n = world.nodes[c.node];
        const double m = 1.0 / n.inverse_mass;
        const Vec3 normal = c.correction.normalized();
        const Vec3 arm = n.position - world.core.position;
        const Vec3 point_velocity =
            world.core.linear_velocity + world.core.angular_velocity.cross(arm);
        const double approach = std::max(0.0, -point_velocity.dot(normal));
        const double normal_speed = approach + kContactBias * c.penetration / dt;
        const Vec3 impulse = normal * (m * normal_speed) - c.tangential_loss * (m / dt);
        apply_impulse(world.core, impulse, n.position);
    }

    // (5) Surface refresh.
    const auto t_apply = std::chrono::steady_clock::now();
    sync_surface(world);
    const auto t_end = std::chrono::steady_clock::now();

    world.clock += dt;
    ++world.frame;

    FrameReport report;
    report.frame = world.frame;
    report.clock = world.clock;
    report.max_strain = solver_report.max_strain;
    report.plastic_events =
        static_cast<std::uint32_t>(solver_report.plastic_constraints.size()) + attachment_plastic;
    report.contacts = static_cast<std::uint32_t>(contacts.size());
    world.cumulative_plastic_events += report.plastic_events;
    report.step_us = std::chrono::duration<double, std::micro>(t_end - t_begin).count();
    report.apply_us = std::chrono::duration<double, std::micro>(t_end - t_apply).count();
    return report;
}

}  // namespace crumple

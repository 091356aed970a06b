#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "crumple/error.hpp"
#include "crumple/math.hpp"

namespace crumple {

/// One simulated point mass. Velocity lives implicitly in the gap between
/// `position` and `prev_position`. `body_rest` is the node's rest location in
/// the vehicle body frame and migrates under plastic deformation;
/// `body_rest_initial` never changes and anchors the visual deviation clamp.
struct NodeState {
    Vec3 position;
    Vec3 prev_position;
    double inverse_mass = 1.0;  // 0 pins the node
    Vec3 body_rest;
    Vec3 body_rest_initial;
};

/// Distance constraint with an elastic range up to `yield_strain`; past it the
/// rest length is rewritten (plastic flow). `break_strain` marks where the
/// material would fracture; crossing it is only recorded, constraints are
/// never removed here.
struct DistanceConstraint {
    int node_a = 0;
    int node_b = 0;
    double rest_length = 1.0;
    double stiffness = 1.0;    // in (0, 1], applied per solver iteration
    double yield_strain = 0.1;
    double break_strain = 0.5;
};

/// Zero-rest-length pull of a node toward a world-space target, used to couple
/// the shell to the rigid frame.
struct AttachmentConstraint {
    int node = 0;
    Vec3 target;
    double stiffness = 1.0;
};

struct SolverParams {
    double dt = 1.0 / 120.0;
    int iterations = 8;
    double max_deviation = 0.4;  // meters, radius of the visual clamp
    double damping = 0.02;       // in [0, 1), velocity bleed per step
};

/// What happened during one solve_step.
struct StepReport {
    double max_strain = 0.0;                  // largest |strain| seen at the plasticity phase
    std::vector<std::uint32_t> plastic_constraints;
    int would_break_events = 0;
    int degenerate_projections = 0;
};

/// Position Verlet with per-step velocity damping. Pinned nodes never move.
inline void integrate_verlet(std::span<NodeState> nodes, std::span<const Vec3> accelerations,
                             double dt, double damping = 0.0) {
    const double keep = 1.0 - damping;
    const double dt2 = dt * dt;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        NodeState& n = nodes[i];
        if (n.inverse_mass <= 0.0) continue;
        const Vec3 old = n.position;
        n.position += keep * (n.position - n.prev_position) + accelerations[i] * dt2;
        n.prev_position = old;
    }
}

/// Projects one constraint: endpoints move along their axis toward the rest
/// length, split by inverse mass and scaled by stiffness. Returns false (and
/// leaves the pair untouched) when the endpoints coincide and no direction
/// exists.
inline bool project_distance(std::span<NodeState> nodes, const DistanceConstraint& c) {
    NodeState& a = nodes[c.node_a];
    NodeState& b = nodes[c.node_b];
    const double w_sum = a.inverse_mass + b.inverse_mass;
    if (w_sum <= 0.0) return true;  // both pinned, nothing to do

    const Vec3 axis = b.position - a.position;
    const double len = axis.norm();
    if (len < 1e-12) return false;

    const Vec3 correction = axis * (c.stiffness * (len - c.rest_length) / (len * w_sum));
    a.position += correction * a.inverse_mass;
    b.position -= correction * b.inverse_mass;
    return true;
}

inline void project_attachment(std::span<NodeState> nodes, const AttachmentConstraint& c) {
    NodeState& n = nodes[c.node];
    if (n.inverse_mass <= 0.0) return;
    n.position += (c.target - n.position) * c.stiffness;
}

/// Elastic range: no change. Past yield the rest length is recalculated so
/// that exactly yield-level elastic strain remains, which is what lets a dented
/// shell still spring back part of the way. Returns true on a plastic event.
inline bool apply_plasticity(DistanceConstraint& c, double current_length) {
    const double strain = (current_length - c.rest_length) / c.rest_length;
    if (std::abs(strain) <= c.yield_strain) return false;
    const double sign = strain > 0.0 ? 1.0 : -1.0;
    c.rest_length = current_length / (1.0 + sign * c.yield_strain);
    return true;
}

/// Pulls body_rest back onto the closed ball of radius `max_deviation` around
/// body_rest_initial. Positions follow through the next attachment projection.
inline void clamp_deviation(NodeState& n, double max_deviation) {
    const Vec3 offset = n.body_rest - n.body_rest_initial;
    const double d = offset.norm();
    if (d > max_deviation) {
        n.body_rest = n.body_rest_initial + offset * (max_deviation / d);
    }
}

namespace detail {

inline void check_finite(std::span<const NodeState> nodes, const char* phase) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!nodes[i].position.is_finite()) {
            throw DivergedError(phase, static_cast<int>(i));
        }
    }
}

}  // namespace detail

/// One full solver step: Verlet integration, the collision callback, a fixed
/// number of Gauss-Seidel rounds over all constraints (distance then
/// attachments, in construction order), plasticity, and the deviation clamp.
/// The collision callback runs again after the projection rounds: the
/// projections can push nodes back into obstacles, and only a held contact can
/// strain constraints past yield or leave the step penetration-free.
/// Deterministic for identical inputs and constraint ordering.
template <typename CollisionFn>
StepReport solve_step(std::span<NodeState> nodes, std::span<DistanceConstraint> constraints,
                      std::span<const AttachmentConstraint> attachments, const SolverParams& params,
                      std::span<const Vec3> external_accelerations, CollisionFn&& resolve_collisions) {
    StepReport report;

    integrate_verlet(nodes, external_accelerations, params.dt, params.damping);
    detail::check_finite(nodes, "integrate");

    resolve_collisions(nodes);
    detail::check_finite(nodes, "collision");

    for (int round = 0; round < params.iterations; ++round) {
        for (const DistanceConstraint& c : constraints) {
            if (!project_distance(nodes, c)) ++report.degenerate_projections;
        }
        for (const AttachmentConstraint& c : attachments) {
            project_attachment(nodes, c);
        }
    }
    detail::check_finite(nodes, "projection");

    resolve_collisions(nodes);
    detail::check_finite(nodes, "post-collision");

    for (std::size_t i = 0; i < constraints.size(); ++i) {
        DistanceConstraint& c = constraints[i];
        const double len = distance(nodes[c.node_a].position, nodes[c.node_b].position);
        const double strain = std::abs((len - c.rest_length) / c.rest_length);
        report.max_strain = std::max(report.max_strain, strain);
        if (strain > c.break_strain) ++report.would_break_events;
        if (apply_plasticity(c, len)) {
            report.plastic_constraints.push_back(static_cast<std::uint32_t>(i));
        }
    }

    for (NodeState& n : nodes) clamp_deviation(n, params.max_deviation);
    return report;
}

inline StepReport solve_step(std::span<NodeState> nodes, std::span<DistanceConstraint> constraints,
                             std::span<const AttachmentConstraint> attachments,
                             const SolverParams& params,
                             std::span<const Vec3> external_accelerations) {
    return solve_step(nodes, constraints, attachments, params, external_accelerations,
                      [](std::span<NodeState>) {});
}

}  // namespace crumple

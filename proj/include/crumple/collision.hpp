#pragma once

#include <cmath>
#include <span>
#include <variant>
#include <vector>

#include "crumple/dynamics.hpp"
#include "crumple/math.hpp"

namespace crumple {

struct HalfSpace {
    Vec3 point;
    Vec3 normal;  // unit, outward (the allowed side)
};

struct SphereObstacle {
    Vec3 center;
    double radius = 1.0;
};

struct BoxObstacle {
    Vec3 center;
    Vec3 half_extents{0.5, 0.5, 0.5};
    Quat orientation;
};

struct Obstacle {
    std::variant<HalfSpace, SphereObstacle, BoxObstacle> shape;
    double friction = 0.0;  // in [0, 1]
};

/// One resolved penetration. `correction` is the displacement that pushed the
/// node out; `tangential_loss` is the slice of tangential motion removed by
/// friction (already applied to prev_position). Both feed the rigid-core
/// contact impulses.
struct Contact {
    int node = 0;
    int obstacle = 0;
    double penetration = 0.0;
    Vec3 correction;
    Vec3 tangential_loss;
};

namespace detail {

/// Ignore sub-nanometer penetrations so that resolving twice in a row is a
/// clean no-op despite floating-point residue.
inline constexpr double kContactSlop = 1e-12;

struct Projection {
    bool hit = false;
    Vec3 surface_point;
    Vec3 normal;
    double depth = 0.0;
};

inline Projection project_out(const HalfSpace& h, const Vec3& p) {
    const double d = (p - h.point).dot(h.normal);
    if (d >= -kContactSlop) return {};
    return {true, p - h.normal * d, h.normal, -d};
}

inline Projection project_out(const SphereObstacle& s, const Vec3& p) {
    const Vec3 offset = p - s.center;
    const double d = offset.norm();
    if (d >= s.radius - kContactSlop) return {};
    // A node dead on the center gets pushed out along +x, arbitrarily but
    // deterministically.
    const Vec3 n = d > 1e-12 ? offset / d : Vec3{1, 0, 0};
    return {true, s.center + n * s.radius, n, s.radius - d};
}

inline Projection project_out(const BoxObstacle& b, const Vec3& p) {
    const Vec3 local = b.orientation.rotate_inverse(p - b.center);
    const double px = b.half_extents.x - std::abs(local.x);
    const double py = b.half_extents.y - std::abs(local.y);
    const double pz = b.half_extents.z - std::abs(local.z);
    if (px <= kContactSlop || py <= kContactSlop || pz <= kContactSlop) return {};

    // Push out through the nearest face; ties resolve in axis order x, y, z.
    Vec3 local_out = local;
    Vec3 local_normal;
    double depth;
    if (px <= py && px <= pz) {
        local_out.x = local.x >= 0.0 ? b.half_extents.x : -b.half_extents.x;
        local_normal = {local.x >= 0.0 ? 1.0 : -1.0, 0, 0};
        depth = px;
    } else if (py <= pz) {
        local_out.y = local.y >= 0.0 ? b.half_extents.y : -b.half_extents.y;
        local_normal = {0, local.y >= 0.0 ? 1.0 : -1.0, 0};
        depth = py;
    } else {
        local_out.z = local.z >= 0.0 ? b.half_extents.z : -b.half_extents.z;
        local_normal = {0, 0, local.z >= 0.0 ? 1.0 : -1.0};
        depth = pz;
    }
    return {true, b.orientation.rotate(local_out) + b.center, b.orientation.rotate(local_normal),
            depth};
}

}  // namespace detail

/// Projects every penetrating node to the nearest obstacle surface point and
/// scales its tangential motion since the last step by (1 - friction) via the
/// previous position. Pure per node; obstacles are visited in list order.
inline std::vector<Contact> resolve_contacts(std::span<NodeState> nodes,
                                             std::span<const Obstacle> obstacles) {
    std::vector<Contact> contacts;
    for (std::size_t ni = 0; ni < nodes.size(); ++ni) {
        NodeState& n = nodes[ni];
        for (std::size_t oi = 0; oi < obstacles.size(); ++oi) {
            const Obstacle& ob = obstacles[oi];
            const auto proj = std::visit(
                [&](const auto& shape) { return detail::project_out(shape, n.position); },
                ob.shape);
            if (!proj.hit) continue;

            Contact contact;
            contact.node = static_cast<int>(ni);
            contact.obstacle = static_cast<int>(oi);
            contact.penetration = proj.depth;
            contact.correction = proj.surface_point - n.position;
            n.position = proj.surface_point;

            // Inelastic contact: cancel the normal component of the implied
            // velocity (both the approach and the separation the projection
            // itself would inject), then scale the tangential part by
            // friction.
            const Vec3 motion = n.position - n.prev_position;
            const Vec3 normal_part = proj.normal * motion.dot(proj.normal);
            const Vec3 tangential = motion - normal_part;
            contact.tangential_loss = tangential * ob.friction;
            n.prev_position += normal_part + contact.tangential_loss;
            contacts.push_back(contact);
        }
    }
    return contacts;
}

}  // namespace crumple

#pragma once

#include <array>

#include "crumple/math.hpp"

namespace crumple {

/// Minimal rigid body standing in for the vehicle chassis. Body axes: +x
/// forward, +y up, +z right. Inertia is a principal-axis diagonal in the body
/// frame; the orientation is renormalized every step so unit-length drift
/// stays below the solver's tolerances.
struct RigidCore {
    Vec3 position;
    Quat orientation;
    Vec3 linear_velocity;
    Vec3 angular_velocity;  // rad/s, world frame
    double mass = 1.0;
    Vec3 inertia_diag{1.0, 1.0, 1.0};  // kg m^2
    std::array<Vec3, 4> wheel_offsets{};  // body frame: FL, FR, RL, RR

    Pose pose() const { return {position, orientation}; }

    Vec3 forward() const { return orientation.rotate({1, 0, 0}); }
    Vec3 up() const { return orientation.rotate({0, 1, 0}); }

    /// World-frame application of the inverse inertia tensor: R I^-1 R^T.
    Vec3 inverse_inertia_world(const Vec3& v) const {
        const Vec3 body = orientation.rotate_inverse(v);
        const Vec3 scaled{body.x / inertia_diag.x, body.y / inertia_diag.y,
                          body.z / inertia_diag.z};
        return orientation.rotate(scaled);
    }

    Vec3 inertia_world(const Vec3& v) const {
        const Vec3 body = orientation.rotate_inverse(v);
        const Vec3 scaled{body.x * inertia_diag.x, body.y * inertia_diag.y,
                          body.z * inertia_diag.z};
        return orientation.rotate(scaled);
    }
};

inline void integrate_velocities(RigidCore& core, const Vec3& force, const Vec3& torque,
                                 const Vec3& gravity, double dt) {
    core.linear_velocity += (force / core.mass + gravity) * dt;
    const Vec3 gyro = core.angular_velocity.cross(core.inertia_world(core.angular_velocity));
    core.angular_velocity += core.inverse_inertia_world(torque - gyro) * dt;
}

inline void advance_pose(RigidCore& core, double dt) {
    core.position += core.linear_velocity * dt;
    core.orientation = core.orientation.integrated(core.angular_velocity, dt);
}

/// Semi-implicit Euler: velocities first, then pose, with the gyroscopic term
/// included and the quaternion renormalized. Impulses applied between the two
/// halves act on the pose update of the same step.
inline void integrate_core(RigidCore& core, const Vec3& force, const Vec3& torque,
                           const Vec3& gravity, double dt) {
    integrate_velocities(core, force, torque, gravity, dt);
    advance_pose(core, dt);
}

/// Applies an instantaneous impulse (kg m/s) at a world-space point.
inline void apply_impulse(RigidCore& core, const Vec3& impulse, const Vec3& world_point) {
    core.linear_velocity += impulse / core.mass;
    const Vec3 arm = world_point - core.position;
    core.angular_velocity += core.inverse_inertia_world(arm.cross(impulse));
}

}  // namespace crumple

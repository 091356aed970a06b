#pragma once

#include <array>
#include <cmath>

namespace crumple {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }

    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    constexpr bool operator==(const Vec3& o) const = default;

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }

    constexpr Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }

    constexpr double norm_squared() const { return dot(*this); }
    double norm() const { return std::sqrt(norm_squared()); }

    Vec3 normalized() const {
        const double n = norm();
        return n > 0.0 ? *this / n : Vec3{};
    }

    constexpr Vec3 component_min(const Vec3& o) const {
        return {x < o.x ? x : o.x, y < o.y ? y : o.y, z < o.z ? z : o.z};
    }
    constexpr Vec3 component_max(const Vec3& o) const {
        return {x > o.x ? x : o.x, y > o.y ? y : o.y, z > o.z ? z : o.z};
    }

    bool is_finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Unit quaternion for rigid orientations. Identity is {1, 0, 0, 0}.
struct Quat {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Quat() = default;
    constexpr Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    constexpr bool operator==(const Quat& o) const = default;

    static Quat from_axis_angle(const Vec3& axis, double angle) {
        const Vec3 u = axis.normalized();
        const double h = 0.5 * angle;
        const double s = std::sin(h);
        return {std::cos(h), u.x * s, u.y * s, u.z * s};
    }

    constexpr Quat operator*(const Quat& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }

    constexpr Quat conjugate() const { return {w, -x, -y, -z}; }

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

    Quat normalized() const {
        const double n = norm();
        return n > 0.0 ? Quat{w / n, x / n, y / n, z / n} : Quat{};
    }

    /// Rotate a vector: q v q*.
    constexpr Vec3 rotate(const Vec3& v) const {
        // Expanded form, one cross fewer than the quaternion sandwich.
        const Vec3 u{x, y, z};
        const Vec3 t = 2.0 * u.cross(v);
        return v + w * t + u.cross(t);
    }

    constexpr Vec3 rotate_inverse(const Vec3& v) const { return conjugate().rotate(v); }

    /// One explicit integration step of dq/dt = 0.5 * omega * q, renormalized.
    Quat integrated(const Vec3& omega, double dt) const {
        const Quat dq = Quat{0.0, omega.x, omega.y, omega.z} * (*this);
        const Quat q{w + 0.5 * dt * dq.w, x + 0.5 * dt * dq.x,
                     y + 0.5 * dt * dq.y, z + 0.5 * dt * dq.z};
        return q.normalized();
    }

    bool is_finite() const {
        return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

/// Rigid transform: body frame -> world frame.
struct Pose {
    Vec3 position;
    Quat orientation;

    Vec3 apply(const Vec3& body) const { return orientation.rotate(body) + position; }
    Vec3 to_body(const Vec3& world) const { return orientation.rotate_inverse(world - position); }
};

struct Aabb {
    Vec3 lo{0, 0, 0};
    Vec3 hi{0, 0, 0};

    double diagonal() const { return (hi - lo).norm(); }
};

template <typename PointRange>
Aabb bounding_box(const PointRange& points) {
    Aabb box;
    bool first = true;
    for (const Vec3& p : points) {
        if (first) {
            box.lo = box.hi = p;
            first = false;
        } else {
            box.lo = box.lo.component_min(p);
            box.hi = box.hi.component_max(p);
        }
    }
    return box;
}

}  // namespace crumple

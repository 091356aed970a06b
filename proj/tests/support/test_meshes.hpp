#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "crumple/math.hpp"
#include "crumple/surface_mesh.hpp"

namespace crumple::testing {

/// Closed sedan-ish body of revolution with a cabin bump and shallow inward
/// panel dimples (so only ridge curves reach the convex hull). Vertex count is
/// (nu - 1) * nv + 2.
inline SurfaceMesh make_car_mesh(int nu = 33, int nv = 31, double panel_depth = 0.03) {
    using std::numbers::pi;
    SurfaceMesh mesh;

    const double half_length = 2.1;
    const double half_height = 0.65;
    const double half_width = 0.9;
    const double box_exponent = 3.0;  // rounded-rectangle cross-section

    const auto super = [&](double s) {
        return (s < 0 ? -1.0 : 1.0) * std::pow(std::abs(s), 2.0 / box_exponent);
    };

    mesh.vertices.push_back({half_length, 0.0, 0.0});  // nose pole
    for (int i = 1; i < nu; ++i) {
        const double u = pi * i / nu;
        const double x = half_length * std::cos(u);
        const double taper = std::sin(u);
        const double cabin = std::exp(-std::pow(std::cos(u) / 0.45, 2.0));
        for (int j = 0; j < nv; ++j) {
            const double v = 2.0 * pi * j / nv;
            const double sy = super(std::sin(v));
            const double sz = super(std::cos(v));
            const double roof = 1.0 + 0.35 * cabin * std::max(0.0, sy);
            const double dimple =
                1.0 - panel_depth * std::pow(std::sin(6.0 * u) * std::sin(4.0 * v), 2.0);
            mesh.vertices.push_back({x, half_height * taper * sy * roof * dimple,
                                     half_width * taper * sz * dimple});
        }
    }
    mesh.vertices.push_back({-half_length, 0.0, 0.0});  // tail pole
    const int tail = static_cast<int>(mesh.vertices.size()) - 1;

    const auto ring = [&](int i, int j) { return 1 + (i - 1) * nv + (j % nv); };
    for (int j = 0; j < nv; ++j) {
        mesh.triangles.push_back({0, ring(1, j), ring(1, j + 1)});
    }
    for (int i = 1; i + 1 < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            const int a = ring(i, j), b = ring(i, j + 1);
            const int c = ring(i + 1, j), d = ring(i + 1, j + 1);
            mesh.triangles.push_back({a, c, b});
            mesh.triangles.push_back({b, c, d});
        }
    }
    for (int j = 0; j < nv; ++j) {
        mesh.triangles.push_back({tail, ring(nu - 1, j + 1), ring(nu - 1, j)});
    }
    return mesh;
}

inline std::vector<Vec3> unit_cube_corners() {
    std::vector<Vec3> pts;
    for (int i = 0; i < 8; ++i) {
        pts.push_back({static_cast<double>(i & 1), static_cast<double>((i >> 1) & 1),
                       static_cast<double>((i >> 2) & 1)});
    }
    return pts;
}

inline std::vector<Vec3> icosahedron_points(double scale = 1.0) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> pts = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                             {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                             {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    for (Vec3& p : pts) p *= scale;
    return pts;
}

inline std::vector<Vec3> random_cloud(int count, std::mt19937_64& rng, double extent = 0.5) {
    std::uniform_real_distribution<double> u(0.0, extent);
    std::vector<Vec3> pts(count);
    for (Vec3& p : pts) p = {u(rng), u(rng), u(rng)};
    return pts;
}

}  // namespace crumple::testing

#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "crumple/convex_hull.hpp"
#include "crumple/error.hpp"
#include "crumple/math.hpp"

namespace crumple {

/// Coarse deformation control model: the hull vertices plus one interior
/// centroid node, tetrahedralized so each element carries a share of the
/// vehicle mass. Edges cover every hull-triangle edge once plus one spoke from
/// each hull node to the centroid; the spokes give the closed shell interior
/// resistance so it cannot collapse through itself.
struct ControlMesh {
    std::vector<Vec3> rest_points;
    std::vector<std::array<int, 2>> edges;
    std::vector<std::array<int, 3>> hull_triangles;
    int centroid_index = -1;
    std::vector<std::array<int, 4>> tetrahedra;
    std::vector<double> node_masses;

    int point_count() const { return static_cast<int>(rest_points.size()); }
};

/// Appends the centroid node, forms one tetrahedron per hull triangle, and
/// distributes `total_mass` by element volume, a quarter to each corner node.
inline ControlMesh tetrahedralize_and_mass(const HullMesh& hull, double total_mass) {
    if (total_mass <= 0.0) {
        throw ConfigError("total mass must be positive");
    }
    const int n = hull.point_count();
    if (n < 4 || hull.triangles.empty()) {
        throw GeometryError("control mesh needs a closed hull with at least 4 points");
    }

    ControlMesh cm;
    cm.rest_points = hull.points;
    cm.hull_triangles = hull.triangles;
    cm.centroid_index = n;

    Vec3 centroid;
    for (const Vec3& p : hull.points) centroid += p;
    centroid = centroid / static_cast<double>(n);
    cm.rest_points.push_back(centroid);

    std::vector<double> tet_volumes;
    double volume = 0.0;
    for (const auto& t : hull.triangles) {
        cm.tetrahedra.push_back({t[0], t[1], t[2], cm.centroid_index});
        const double v = (hull.points[t[1]] - centroid)
                             .cross(hull.points[t[2]] - centroid)
                             .dot(hull.points[t[0]] - centroid) /
                         6.0;
        tet_volumes.push_back(v);
        volume += v;
    }
    const Aabb box = bounding_box(hull.points);
    if (volume <= 1e-12 * box.diagonal() * box.diagonal() * box.diagonal()) {
        throw GeometryError("degenerate solid: hull volume is zero");
    }

    cm.node_masses.assign(cm.rest_points.size(), 0.0);
    for (std::size_t i = 0; i < cm.tetrahedra.size(); ++i) {
        const double share = total_mass * (tet_volumes[i] / volume) * 0.25;
        for (const int node : cm.tetrahedra[i]) cm.node_masses[node] += share;
    }

    std::vector<std::array<int, 2>> edges;
    for (const auto& t : hull.triangles) {
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            edges.push_back({std::min(a, b), std::max(a, b)});
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (int i = 0; i < n; ++i) edges.push_back({i, cm.centroid_index});
    cm.edges = std::move(edges);
    return cm;
}

/// Enclosed volume of the tetrahedralization (sum of element volumes).
inline double control_mesh_volume(const ControlMesh& cm) {
    double volume = 0.0;
    for (const auto& tet : cm.tetrahedra) {
        const Vec3& d = cm.rest_points[tet[3]];
        volume += (cm.rest_points[tet[1]] - d)
                      .cross(cm.rest_points[tet[2]] - d)
                      .dot(cm.rest_points[tet[0]] - d) /
                  6.0;
    }
    return volume;
}

}  // namespace crumple

#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "crumple/error.hpp"
#include "crumple/math.hpp"

namespace crumple {

/// High-resolution render/collision geometry. Triangles index into `vertices`;
/// `normals` is either empty or one entry per vertex.
struct SurfaceMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Vec3> normals;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t triangle_count() const { return triangles.size(); }

    /// Checks the structural invariants: indices in range, no repeated index
    /// inside a triangle, normals absent or matching the vertex count.
    void validate() const {
        const int n = static_cast<int>(vertices.size());
        for (const auto& t : triangles) {
            for (int k = 0; k < 3; ++k) {
                if (t[k] < 0 || t[k] >= n) {
                    throw GeometryError("triangle index out of range");
                }
            }
            if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
                throw GeometryError("degenerate triangle with repeated index");
            }
        }
        if (!normals.empty() && normals.size() != vertices.size()) {
            throw GeometryError("normal count does not match vertex count");
        }
    }
};

}  // namespace crumple

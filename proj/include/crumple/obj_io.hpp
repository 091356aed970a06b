#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "crumple/error.hpp"
#include "crumple/surface_mesh.hpp"

namespace crumple {

namespace detail {

inline bool parse_double(const std::string& token, double& out) {
    try {
        std::size_t used = 0;
        out = std::stod(token, &used);
        return used == token.size();
    } catch (const std::exception&) {
        return false;
    }
}

/// Parses the vertex index of an `f` token, i.e. the part before the first '/'.
inline bool parse_face_index(const std::string& token, long& out) {
    const std::size_t slash = token.find('/');
    const std::string head = slash == std::string::npos ? token : token.substr(0, slash);
    if (head.empty()) return false;
    try {
        std::size_t used = 0;
        out = std::stol(head, &used);
        return used == head.size();
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace detail

/// Reads a Wavefront OBJ stream: `v` and `f` records only, everything else is
/// skipped. Polygon faces are fan-triangulated, indices are rebased to zero and
/// negative (relative) indices are resolved. Triangles that collapse onto a
/// repeated vertex are dropped.
inline SurfaceMesh load_obj(std::istream& in) {
    SurfaceMesh mesh;
    std::string line;
    int line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;

        if (tag == "v") {
            double x, y, z;
            std::string sx, sy, sz;
            if (!(ls >> sx >> sy >> sz) || !detail::parse_double(sx, x) ||
                !detail::parse_double(sy, y) || !detail::parse_double(sz, z)) {
                throw ParseError("malformed vertex record", line_no);
            }
            mesh.vertices.push_back({x, y, z});
        } else if (tag == "f") {
            std::vector<int> face;
            std::string token;
            while (ls >> token) {
                long raw = 0;
                if (!detail::parse_face_index(token, raw)) {
                    throw ParseError("malformed face index '" + token + "'", line_no);
                }
                long idx = raw > 0 ? raw - 1 : static_cast<long>(mesh.vertices.size()) + raw;
                if (idx < 0 || idx >= static_cast<long>(mesh.vertices.size())) {
                    throw ParseError("face index out of range", line_no);
                }
                face.push_back(static_cast<int>(idx));
            }
            if (face.size() < 3) {
                throw ParseError("face with fewer than 3 indices", line_no);
            }
            for (std::size_t k = 1; k + 1 < face.size(); ++k) {
                const std::array<int, 3> tri{face[0], face[k], face[k + 1]};
                if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
                mesh.triangles.push_back(tri);
            }
        }
    }

    if (mesh.vertices.empty()) {
        throw ParseError("empty mesh: no vertex records");
    }
    if (mesh.triangles.empty()) {
        throw ParseError("empty mesh: no face records");
    }
    mesh.validate();
    return mesh;
}

inline SurfaceMesh load_obj_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mesh file: " + path);
    try {
        return load_obj(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

/// Writes positions and faces (and optional per-vertex normals). %.9g keeps the
/// files compact while staying well below any tolerance used in this project.
inline void save_obj(std::ostream& out, std::span<const Vec3> vertices,
                     std::span<const std::array<int, 3>> triangles,
                     std::span<const Vec3> normals = {}) {
    char buf[128];
    for (const Vec3& v : vertices) {
        std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
        out << buf;
    }
    for (const Vec3& n : normals) {
        std::snprintf(buf, sizeof buf, "vn %.9g %.9g %.9g\n", n.x, n.y, n.z);
        out << buf;
    }
    for (const auto& t : triangles) {
        out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
}

inline void save_obj_file(const std::string& path, std::span<const Vec3> vertices,
                          std::span<const std::array<int, 3>> triangles,
                          std::span<const Vec3> normals = {}) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write mesh file: " + path);
    save_obj(out, vertices, triangles, normals);
}

}  // namespace crumple

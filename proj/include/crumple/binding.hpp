#pragma once

#include <cstdint>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "crumple/error.hpp"
#include "crumple/math.hpp"
#include "crumple/surface_mesh.hpp"

namespace crumple {

/// Default weighting exponent; larger values localize each control point's
/// influence to its own region of the surface.
inline constexpr double kDefaultAlpha = 3.5;

/// Distance below which a surface vertex is treated as sitting on a control
/// point and bound to it exclusively.
inline constexpr double kCoincidenceDistance = 1e-9;

/// Normalized inverse-distance coupling between control points and surface
/// vertices. Weights are computed once against the rest configuration and are
/// immutable afterwards; per vertex they sum to 1. Stored as parallel arrays
/// (offsets / control indices / weights); a full table in canonical ascending
/// order is flagged dense so the transfer loop can skip the index stream.
struct BindingTable {
    double alpha = kDefaultAlpha;
    std::uint32_t vertex_count = 0;
    std::uint32_t control_count = 0;
    std::vector<std::uint32_t> offsets;   // vertex_count + 1 prefix offsets
    std::vector<std::uint32_t> controls;  // per entry
    std::vector<double> weights;          // per entry
    bool canonical_dense = false;

    std::size_t entry_count() const { return weights.size(); }

    std::span<const std::uint32_t> controls_for(std::uint32_t vertex) const {
        return {controls.data() + offsets[vertex], controls.data() + offsets[vertex + 1]};
    }
    std::span<const double> weights_for(std::uint32_t vertex) const {
        return {weights.data() + offsets[vertex], weights.data() + offsets[vertex + 1]};
    }

    bool built_against(std::size_t vertices, std::size_t ctrl_count) const {
        return vertex_count == vertices && control_count == ctrl_count;
    }

    /// True when every vertex row lists every control point in ascending
    /// order. Recomputed after deserialization.
    bool detect_canonical_dense() const {
        if (entry_count() != static_cast<std::size_t>(vertex_count) * control_count) {
            return false;
        }
        for (std::size_t k = 0; k < controls.size(); ++k) {
            if (controls[k] != k % control_count) return false;
        }
        return true;
    }
};

/// Computes the binding weights: raw 1/||c_i - v_j||^alpha per control point,
/// normalized per vertex. A vertex coincident with a control point binds to it
/// with weight exactly 1. `weight_floor`, when positive, drops normalized
/// weights below it and renormalizes; this trades a little smoothness for a
/// sparser table and is off by default.
inline BindingTable compute_weights(std::span<const Vec3> surface_vertices,
                                    std::span<const Vec3> control_rest, double alpha,
                                    double weight_floor = 0.0) {
    if (control_rest.empty()) {
        throw ConfigError("binding requires at least one control point");
    }
    if (!(alpha > 0.0)) {
        throw ConfigError("binding exponent alpha must be positive");
    }
    for (std::size_t i = 0; i < control_rest.size(); ++i) {
        for (std::size_t j = i + 1; j < control_rest.size(); ++j) {
            if (distance(control_rest[i], control_rest[j]) < kCoincidenceDistance) {
                throw ConfigError("control points " + std::to_string(i) + " and " +
                                  std::to_string(j) + " are coincident");
            }
        }
    }

    const std::uint32_t nc = static_cast<std::uint32_t>(control_rest.size());
    BindingTable table;
    table.alpha = alpha;
    table.vertex_count = static_cast<std::uint32_t>(surface_vertices.size());
    table.control_count = nc;
    table.offsets.reserve(surface_vertices.size() + 1);
    table.offsets.push_back(0);
    table.controls.reserve(surface_vertices.size() * nc);
    table.weights.reserve(surface_vertices.size() * nc);

    std::vector<double> raw(nc);
    for (const Vec3& v : surface_vertices) {
        std::uint32_t nearest = 0;
        double nearest_dist = std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (std::uint32_t i = 0; i < nc; ++i) {
            const double d = distance(control_rest[i], v);
            if (d < nearest_dist) {
                nearest_dist = d;
                nearest = i;
            }
            raw[i] = std::pow(d, -alpha);
            sum += raw[i];
        }

        if (nearest_dist < kCoincidenceDistance) {
            table.controls.push_back(nearest);
            table.weights.push_back(1.0);
        } else if (weight_floor > 0.0) {
            double kept = 0.0;
            for (std::uint32_t i = 0; i < nc; ++i) {
                if (raw[i] / sum >= weight_floor) kept += raw[i];
            }
            for (std::uint32_t i = 0; i < nc; ++i) {
                if (raw[i] / sum >= weight_floor) {
                    table.controls.push_back(i);
                    table.weights.push_back(raw[i] / kept);
                }
            }
        } else {
            for (std::uint32_t i = 0; i < nc; ++i) {
                table.controls.push_back(i);
                table.weights.push_back(raw[i] / sum);
            }
        }
        table.offsets.push_back(static_cast<std::uint32_t>(table.weights.size()));
    }
    table.canonical_dense = table.detect_canonical_dense();
    return table;
}

inline BindingTable compute_weights(const SurfaceMesh& surface, std::span<const Vec3> control_rest,
                                    double alpha, double weight_floor = 0.0) {
    return compute_weights(std::span<const Vec3>(surface.vertices), control_rest, alpha,
                           weight_floor);
}

/// Moves every surface vertex by its weighted blend of control-point
/// displacements: v' = v + sum_i phi_ij (c_i - c_i0). Each output vertex
/// depends on its own weights only, so any parallel split over vertices would
/// reproduce the sequential result exactly.
inline void apply_deformation(std::span<const Vec3> rest_vertices, const BindingTable& binding,
                              std::span<const Vec3> control_rest,
                              std::span<const Vec3> control_current, std::span<Vec3> out) {
    if (!binding.built_against(rest_vertices.size(), control_rest.size()) ||
        control_current.size() != control_rest.size()) {
        throw BindingError("stale binding: table was built against different counts");
    }
    if (out.size() != rest_vertices.size()) {
        throw BindingError("output span size does not match vertex count");
    }

    std::vector<Vec3> deltas(control_rest.size());
    for (std::size_t i = 0; i < control_rest.size(); ++i) {
        deltas[i] = control_current[i] - control_rest[i];
    }

    if (binding.canonical_dense) {
        const std::uint32_t nc = binding.control_count;
        const double* w = binding.weights.data();
        for (std::uint32_t j = 0; j < binding.vertex_count; ++j, w += nc) {
            Vec3 shift;
            for (std::uint32_t i = 0; i < nc; ++i) {
                shift += deltas[i] * w[i];
            }
            out[j] = rest_vertices[j] + shift;
        }
        return;
    }

    for (std::uint32_t j = 0; j < binding.vertex_count; ++j) {
        Vec3 shift;
        const auto controls = binding.controls_for(j);
        const auto weights = binding.weights_for(j);
        for (std::size_t k = 0; k < controls.size(); ++k) {
            shift += deltas[controls[k]] * weights[k];
        }
        out[j] = rest_vertices[j] + shift;
    }
}

inline std::vector<Vec3> apply_deformation(std::span<const Vec3> rest_vertices,
                                           const BindingTable& binding,
                                           std::span<const Vec3> control_rest,
                                           std::span<const Vec3> control_current) {
    std::vector<Vec3> out(rest_vertices.size());
    apply_deformation(rest_vertices, binding, control_rest, control_current, out);
    return out;
}

}  // namespace crumple

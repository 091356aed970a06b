#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "crumple/error.hpp"
#include "crumple/math.hpp"

namespace crumple {

/// Convex hull of a point set. `points` are copies of the winning input points,
/// `source_indices` maps them back to the input, `triangles` index into
/// `points` and wind outward.
struct HullMesh {
    std::vector<Vec3> points;
    std::vector<int> source_indices;
    std::vector<std::array<int, 3>> triangles;

    int point_count() const { return static_cast<int>(points.size()); }
};

namespace detail {

struct HullFace {
    std::array<int, 3> v{};         // input point indices, outward winding
    std::array<int, 3> neighbor{};  // face across edge (v[i], v[(i+1)%3])
    Vec3 normal;                    // unnormalized
    double offset = 0.0;
    double normal_len = 0.0;
    std::vector<int> outside;
    int furthest = -1;
    double furthest_dist = 0.0;
    bool alive = true;
    std::uint32_t visited_iter = 0;
    bool visible = false;
};

class QuickHullBuilder {
public:
    explicit QuickHullBuilder(std::span<const Vec3> pts) : pts_(pts) {}

    HullMesh build() {
        if (pts_.size() < 4) {
            throw GeometryError("convex hull needs at least 4 points");
        }
        const Aabb box = bounding_box(pts_);
        eps_ = 1e-9 * box.diagonal();
        if (!(eps_ > 0.0)) {
            throw GeometryError("degenerate point set: zero extent");
        }

        build_initial_simplex();
        assign_initial_conflicts();

        std::uint32_t iter = 0;
        while (!pending_.empty()) {
            const int fi = pending_.back();
            pending_.pop_back();
            HullFace& f = faces_[fi];
            if (!f.alive || f.outside.empty()) continue;
            ++iter;
            insert_point(fi, f.furthest, iter);
        }
        return extract();
    }

private:
    double raw_dist(const HullFace& f, const Vec3& p) const {
        return f.normal.dot(p) - f.offset;
    }

    void set_plane(HullFace& f) {
        const Vec3& a = pts_[f.v[0]];
        const Vec3& b = pts_[f.v[1]];
        const Vec3& c = pts_[f.v[2]];
        f.normal = (b - a).cross(c - a);
        f.offset = f.normal.dot(a);
        f.normal_len = f.normal.norm();
    }

    int allocate_face() {
        if (!free_slots_.empty()) {
            const int id = free_slots_.back();
            free_slots_.pop_back();
            faces_[id] = HullFace{};
            return id;
        }
        faces_.emplace_back();
        return static_cast<int>(faces_.size()) - 1;
    }

    void retire_face(int id) {
        faces_[id].alive = false;
        faces_[id].outside.clear();
        free_slots_.push_back(id);
    }

    void build_initial_simplex() {
        const int n = static_cast<int>(pts_.size());

        int i0 = 0;
        for (int i = 1; i < n; ++i) {
            const Vec3 &p = pts_[i], &q = pts_[i0];
            if (p.x < q.x || (p.x == q.x && (p.y < q.y || (p.y == q.y && p.z < q.z)))) i0 = i;
        }

        int i1 = -1;
        double best = eps_ * eps_;
        for (int i = 0; i < n; ++i) {
            const double d2 = (pts_[i] - pts_[i0]).norm_squared();
            if (d2 > best) { best = d2; i1 = i; }
        }
        if (i1 < 0) throw GeometryError("degenerate point set: all points coincident");

        const Vec3 axis = pts_[i1] - pts_[i0];
        int i2 = -1;
        best = eps_ * eps_ * axis.norm_squared();
        for (int i = 0; i < n; ++i) {
            const double d2 = (pts_[i] - pts_[i0]).cross(axis).norm_squared();
            if (d2 > best) { best = d2; i2 = i; }
        }
        if (i2 < 0) throw GeometryError("degenerate point set: collinear");

        Vec3 plane_n = (pts_[i1] - pts_[i0]).cross(pts_[i2] - pts_[i0]);
        const double plane_len = plane_n.norm();
        int i3 = -1;
        best = eps_ * plane_len;
        for (int i = 0; i < n; ++i) {
            const double d = std::abs(plane_n.dot(pts_[i] - pts_[i0]));
            if (d > best) { best = d; i3 = i; }
        }
        if (i3 < 0) throw GeometryError("degenerate point set: coplanar");

        simplex_ = {i0, i1, i2, i3};
        static constexpr int kFaceOf[4][3] = {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}};
        for (int fi = 0; fi < 4; ++fi) {
            const int id = allocate_face();
            HullFace& f = faces_[id];
            f.v = {simplex_[kFaceOf[fi][0]], simplex_[kFaceOf[fi][1]], simplex_[kFaceOf[fi][2]]};
            const int opposite = simplex_[0] + simplex_[1] + simplex_[2] + simplex_[3]
                                 - f.v[0] - f.v[1] - f.v[2];
            set_plane(f);
            if (raw_dist(f, pts_[opposite]) > 0.0) {
                std::swap(f.v[1], f.v[2]);
                set_plane(f);
            }
        }
        // Stitch tetrahedron adjacency by matching reversed edges.
        for (int a = 0; a < 4; ++a) {
            for (int e = 0; e < 3; ++e) {
                const int u = faces_[a].v[e], w = faces_[a].v[(e + 1) % 3];
                for (int b = 0; b < 4; ++b) {
                    if (b == a) continue;
                    for (int e2 = 0; e2 < 3; ++e2) {
                        if (faces_[b].v[e2] == w && faces_[b].v[(e2 + 1) % 3] == u) {
                            faces_[a].neighbor[e] = b;
                        }
                    }
                }
            }
        }
    }

    void assign_initial_conflicts() {
        const int n = static_cast<int>(pts_.size());
        for (int i = 0; i < n; ++i) {
            if (i == simplex_[0] || i == simplex_[1] || i == simplex_[2] || i == simplex_[3]) {
                continue;
            }
            claim_point(i, 0, 4);
        }
        for (int fi = 0; fi < 4; ++fi) {
            if (!faces_[fi].outside.empty()) pending_.push_back(fi);
        }
    }

    /// Assigns point `p` to the first face in [first, last) it is strictly
    /// outside of; interior points are dropped.
    void claim_point(int p, int first, int last) {
        for (int fi = first; fi < last; ++fi) {
            HullFace& f = faces_[fi];
            if (!f.alive) continue;
            const double d = raw_dist(f, pts_[p]);
            if (d > eps_ * f.normal_len) {
                f.outside.push_back(p);
                if (d > f.furthest_dist) {
                    f.furthest_dist = d;
                    f.furthest = p;
                }
                return;
            }
        }
    }

    void claim_point_list(int p, const std::vector<int>& face_ids) {
        for (const int fi : face_ids) {
            HullFace& f = faces_[fi];
            const double d = raw_dist(f, pts_[p]);
            if (d > eps_ * f.normal_len) {
                f.outside.push_back(p);
                if (d > f.furthest_dist) {
                    f.furthest_dist = d;
                    f.furthest = p;
                }
                return;
            }
        }
    }

    struct HorizonEdge {
        int a, b;        // directed edge of a visible face
        int outer;       // alive face on the far side
    };

    /// Floods the faces the apex can see. Lenient mode counts a face within
    /// the epsilon band of the apex's plane as visible: coplanar facets
    /// (cube-like inputs, flat panels whose plane-side sign is pure noise)
    /// flood coherently instead of leaving pinholes that break the horizon
    /// loop. Strict mode demands clearance and yields a smaller region; it is
    /// the fallback when the lenient horizon fails to chain.
    void flood_visible(int start_face, const Vec3& apex_pos, std::uint32_t iter, bool strict,
                       std::vector<int>& visible, std::vector<HorizonEdge>& horizon) {
        visible.clear();
        horizon.clear();
        struct Crossing { int face; int from_face; int from_edge; };
        std::vector<Crossing> stack;
        stack.push_back({start_face, -1, -1});

        while (!stack.empty()) {
            const Crossing c = stack.back();
            stack.pop_back();
            HullFace& f = faces_[c.face];
            if (f.visited_iter == iter && f.visible) continue;
            if (f.visited_iter != iter) {
                f.visited_iter = iter;
                const double d = raw_dist(f, apex_pos);
                f.visible = strict ? d > eps_ * f.normal_len : d >= -eps_ * f.normal_len;
                if (f.visible) {
                    visible.push_back(c.face);
                    for (int e = 0; e < 3; ++e) {
                        stack.push_back({f.neighbor[e], c.face, e});
                    }
                    continue;
                }
            }
            if (!f.visible && c.from_face >= 0) {
                // The edge we crossed is part of the horizon.
                const HullFace& from = faces_[c.from_face];
                horizon.push_back({from.v[c.from_edge], from.v[(c.from_edge + 1) % 3], c.face});
            }
        }
    }

    void insert_point(int start_face, int apex, std::uint32_t& iter) {
        const Vec3& apex_pos = pts_[apex];

        std::vector<int> visible;
        std::vector<HorizonEdge> horizon;
        flood_visible(start_face, apex_pos, iter, false, visible, horizon);

        if (!order_horizon(horizon)) {
            // A coplanar band pinched the visible region into something that
            // is not a disk. Strict visibility stays simply connected in all
            // but hopeless cases.
            ++iter;
            flood_visible(start_face, apex_pos, iter, true, visible, horizon);
        }
        if (!order_horizon(horizon)) {
            // Numerical dead end: discard the apex and carry on with the rest
            // of this face's conflict list.
            HullFace& f = faces_[start_face];
            std::erase(f.outside, apex);
            for (const int v : visible) faces_[v].visible = false;
            refresh_furthest(f);
            if (!f.outside.empty()) pending_.push_back(start_face);
            return;
        }

        // Build the fan of new faces around the horizon loop.
        const int h = static_cast<int>(horizon.size());
        std::vector<int> new_ids(h);
        for (int i = 0; i < h; ++i) new_ids[i] = allocate_face();
        for (int i = 0; i < h; ++i) {
            HullFace& f = faces_[new_ids[i]];
            f.v = {horizon[i].a, horizon[i].b, apex};
            set_plane(f);
            const int outer = horizon[i].outer;
            f.neighbor[0] = outer;
            f.neighbor[1] = new_ids[(i + 1) % h];
            f.neighbor[2] = new_ids[(i - 1 + h) % h];
            HullFace& g = faces_[outer];
            for (int e = 0; e < 3; ++e) {
                if (g.v[e] == horizon[i].b && g.v[(e + 1) % 3] == horizon[i].a) {
                    g.neighbor[e] = new_ids[i];
                }
            }
        }

        // Re-home the orphaned conflict points.
        std::vector<int> orphans;
        for (const int vi : visible) {
            for (const int p : faces_[vi].outside) {
                if (p != apex) orphans.push_back(p);
            }
            retire_face(vi);
        }
        for (const int p : orphans) claim_point_list(p, new_ids);
        for (const int id : new_ids) {
            if (!faces_[id].outside.empty()) pending_.push_back(id);
        }
    }

    void refresh_furthest(HullFace& f) {
        f.furthest = -1;
        f.furthest_dist = 0.0;
        for (const int p : f.outside) {
            const double d = raw_dist(f, pts_[p]);
            if (d > f.furthest_dist) {
                f.furthest_dist = d;
                f.furthest = p;
            }
        }
    }

    /// Chains the horizon edges into a single loop (in place). Fails only under
    /// numerical breakdown of the visible region.
    static bool order_horizon(std::vector<HorizonEdge>& edges) {
        if (edges.size() < 3) return false;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            bool found = false;
            for (std::size_t j = i + 1; j < edges.size(); ++j) {
                if (edges[j].a == edges[i].b) {
                    std::swap(edges[i + 1], edges[j]);
                    found = true;
                    break;
                }
            }
            if (!found) return false;
        }
        return edges.back().b == edges.front().a;
    }

    HullMesh extract() const {
        HullMesh out;
        std::vector<int> remap(pts_.size(), -1);
        std::vector<int> used;
        for (const HullFace& f : faces_) {
            if (!f.alive) continue;
            for (const int v : f.v) {
                if (remap[v] == -1) {
                    remap[v] = 0;
                    used.push_back(v);
                }
            }
        }
        std::sort(used.begin(), used.end());
        for (std::size_t i = 0; i < used.size(); ++i) {
            remap[used[i]] = static_cast<int>(i);
            out.points.push_back(pts_[used[i]]);
            out.source_indices.push_back(used[i]);
        }
        for (const HullFace& f : faces_) {
            if (!f.alive) continue;
            out.triangles.push_back({remap[f.v[0]], remap[f.v[1]], remap[f.v[2]]});
        }
        return out;
    }

    std::span<const Vec3> pts_;
    double eps_ = 0.0;
    std::array<int, 4> simplex_{};
    std::vector<HullFace> faces_;
    std::vector<int> free_slots_;
    std::vector<int> pending_;
};

}  // namespace detail

/// Convex hull by incremental conflict-list construction. Plane-side tests use
/// an epsilon of 1e-9 times the bounding-box diagonal. Throws GeometryError for
/// fewer than 4 points or a coplanar/collinear set.
inline HullMesh convex_hull(std::span<const Vec3> points) {
    return detail::QuickHullBuilder(points).build();
}

/// Largest signed plane distance of any query point over all hull faces.
/// Non-positive means every point is inside or on the hull.
inline double hull_max_signed_distance(const HullMesh& hull, std::span<const Vec3> queries) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& t : hull.triangles) {
        const Vec3& a = hull.points[t[0]];
        const Vec3 n = (hull.points[t[1]] - a).cross(hull.points[t[2]] - a).normalized();
        for (const Vec3& q : queries) {
            worst = std::max(worst, n.dot(q - a));
        }
    }
    return worst;
}

}  // namespace crumple

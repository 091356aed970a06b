#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include "crumple/convex_hull.hpp"
#include "crumple/error.hpp"
#include "crumple/math.hpp"

namespace crumple {

struct SimplifyResult {
    HullMesh hull;
    int requested = 0;
    int achieved = 0;  // may undershoot when the re-hull drops redundant points
};

namespace detail {

inline double tet_volume_signed(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return (b - a).cross(c - a).dot(d - a) / 6.0;
}

/// Greedy level-of-detail reduction: repeatedly removes the vertex whose star,
/// replaced by a fan over its link polygon, loses the least enclosed volume.
class HullDecimator {
public:
    HullDecimator(const HullMesh& input) : input_(input) {
        pts_ = input.points;
        faces_.assign(input.triangles.begin(), input.triangles.end());
        face_alive_.assign(faces_.size(), true);
        incident_.resize(pts_.size());
        for (std::size_t f = 0; f < faces_.size(); ++f) {
            for (const int v : faces_[f]) incident_[v].push_back(static_cast<int>(f));
        }
        vertex_alive_.assign(pts_.size(), true);
        alive_count_ = static_cast<int>(pts_.size());
        generation_.assign(pts_.size(), 0);
    }

    /// Runs the removal queue until the target is reached or no vertex has a
    /// cleanly walkable link anymore (fan patches slowly erode manifoldness).
    /// Returns the surviving points mapped back to original source indices.
    std::pair<std::vector<Vec3>, std::vector<int>> decimate(int target) {
        for (int v = 0; v < static_cast<int>(pts_.size()); ++v) push_candidate(v);

        while (alive_count_ > target && !queue_.empty()) {
            const Candidate c = queue_.top();
            queue_.pop();
            if (!vertex_alive_[c.vertex] || c.generation != generation_[c.vertex]) continue;
            std::vector<int> link;
            if (!ordered_link(c.vertex, link)) continue;
            remove_vertex(c.vertex, link);
        }

        std::pair<std::vector<Vec3>, std::vector<int>> survivors;
        for (std::size_t v = 0; v < pts_.size(); ++v) {
            if (vertex_alive_[v]) {
                survivors.first.push_back(pts_[v]);
                survivors.second.push_back(input_.source_indices.empty()
                                               ? static_cast<int>(v)
                                               : input_.source_indices[v]);
            }
        }
        return survivors;
    }

private:
    struct Candidate {
        double loss;
        int vertex;
        std::uint32_t generation;
        bool operator>(const Candidate& o) const {
            return loss != o.loss ? loss > o.loss : vertex > o.vertex;
        }
    };

    /// Walks the faces around `v` into one closed vertex cycle, wound like the
    /// surface. Fails on anything non-manifold. Vertex degrees are small, so
    /// linear scans beat any associative container here.
    bool ordered_link(int v, std::vector<int>& link) const {
        auto& edges = link_scratch_;
        edges.clear();
        for (const int f : incident_[v]) {
            if (!face_alive_[f]) continue;
            const auto& t = faces_[f];
            const int k = t[0] == v ? 0 : (t[1] == v ? 1 : 2);
            const int a = t[(k + 1) % 3], b = t[(k + 2) % 3];
            for (const auto& e : edges) {
                if (e.first == a) return false;
            }
            edges.emplace_back(a, b);
        }
        const int count = static_cast<int>(edges.size());
        if (count < 3) return false;
        link.clear();
        int cur = edges.front().first;
        const int start = cur;
        do {
            link.push_back(cur);
            int next = -1;
            for (const auto& e : edges) {
                if (e.first == cur) {
                    next = e.second;
                    break;
                }
            }
            if (next < 0) return false;
            cur = next;
        } while (cur != start && static_cast<int>(link.size()) <= count);
        return static_cast<int>(link.size()) == count;
    }

    double fan_loss(int v, const std::vector<int>& link) const {
        double loss = 0.0;
        for (std::size_t i = 1; i + 1 < link.size(); ++i) {
            loss += tet_volume_signed(pts_[link[0]], pts_[link[i]], pts_[link[i + 1]], pts_[v]);
        }
        return loss;
    }

    void push_candidate(int v) {
        if (!vertex_alive_[v]) return;
        std::vector<int> link;
        if (!ordered_link(v, link)) return;
        queue_.push({fan_loss(v, link), v, generation_[v]});
    }

    void remove_vertex(int v, const std::vector<int>& link) {
        for (const int f : incident_[v]) face_alive_[f] = false;
        incident_[v].clear();
        for (std::size_t i = 1; i + 1 < link.size(); ++i) {
            const int id = static_cast<int>(faces_.size());
            faces_.push_back({link[0], link[i], link[i + 1]});
            face_alive_.push_back(true);
            incident_[link[0]].push_back(id);
            incident_[link[i]].push_back(id);
            incident_[link[i + 1]].push_back(id);
        }
        vertex_alive_[v] = false;
        --alive_count_;
        for (const int u : link) {
            prune_incident(u);
            ++generation_[u];
            push_candidate(u);
        }
    }

    void prune_incident(int v) {
        auto& list = incident_[v];
        std::erase_if(list, [&](int f) { return !face_alive_[f]; });
    }

    const HullMesh& input_;
    mutable std::vector<std::pair<int, int>> link_scratch_;
    std::vector<Vec3> pts_;
    std::vector<std::array<int, 3>> faces_;
    std::vector<bool> face_alive_;
    std::vector<std::vector<int>> incident_;
    std::vector<bool> vertex_alive_;
    std::vector<std::uint32_t> generation_;
    int alive_count_ = 0;
    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<Candidate>> queue_;
};

}  // namespace detail

/// Reduces a hull to roughly `target_points` control points by discarding the
/// vertices cheapest in enclosed volume, re-hulling the survivors so the
/// result is convex again. When a removal pass gets stuck on a degraded local
/// triangulation, the intermediate set is re-hulled and the pass restarted;
/// every round strictly shrinks the set, so this terminates. The achieved
/// count can land below the target when a re-hull finds survivors redundant;
/// it is reported, not an error.
inline SimplifyResult simplify_hull(const HullMesh& input, int target_points) {
    if (target_points < 4) {
        throw GeometryError("invalid target: a control hull needs at least 4 points");
    }
    SimplifyResult result;
    result.requested = target_points;
    if (target_points >= input.point_count()) {
        result.hull = input;
        result.achieved = input.point_count();
        return result;
    }

    HullMesh current = input;
    while (true) {
        auto [points, sources] = detail::HullDecimator(current).decimate(target_points);
        HullMesh rehulled = convex_hull(points);
        for (int& s : rehulled.source_indices) s = sources[s];
        const bool done = rehulled.point_count() <= target_points ||
                          rehulled.point_count() >= current.point_count();
        current = std::move(rehulled);
        if (done) break;
    }
    result.hull = std::move(current);
    result.achieved = result.hull.point_count();
    return result;
}

}  // namespace crumple

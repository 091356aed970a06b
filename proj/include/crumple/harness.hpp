#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "crumple/binding.hpp"
#include "crumple/control_mesh.hpp"
#include "crumple/convex_hull.hpp"
#include "crumple/error.hpp"
#include "crumple/hull_simplify.hpp"
#include "crumple/obj_io.hpp"
#include "crumple/scenario.hpp"
#include "crumple/snapshot.hpp"
#include "crumple/surface_mesh.hpp"
#include "crumple/vehicle.hpp"

namespace crumple {

struct BuildResult {
    VehicleWorld world;
    int hull_points = 0;      // full hull before any reduction
    int requested_points = 0;
    int achieved_points = 0;  // control points excluding the centroid node
    bool clamped = false;     // budget exceeded the hull vertex count
};

/// Runs the geometry pipeline end to end: hull, level-of-detail reduction,
/// tetrahedral mass distribution, binding, assembly. Deterministic for a given
/// mesh and scenario.
inline BuildResult build_vehicle(const Scenario& scenario, const SurfaceMesh& mesh) {
    BuildResult result;
    const HullMesh hull = convex_hull(mesh.vertices);
    result.hull_points = hull.point_count();
    result.requested_points = scenario.control_points;
    result.clamped = scenario.control_points > hull.point_count();
    const int budget = result.clamped ? hull.point_count() : scenario.control_points;

    const SimplifyResult simplified = simplify_hull(hull, budget);
    result.achieved_points = simplified.achieved;

    const ControlMesh control = tetrahedralize_and_mass(simplified.hull, scenario.mass);
    BindingTable binding =
        compute_weights(mesh, control.rest_points, scenario.alpha, scenario.weight_floor);
    result.world = assemble(mesh, control, std::move(binding), scenario.assembly_config());
    return result;
}

inline std::uint64_t scenario_step_count(const Scenario& s) {
    return static_cast<std::uint64_t>(std::llround(s.duration / s.dt));
}

struct RunSummary {
    std::uint64_t steps = 0;
    std::uint64_t frames_exported = 0;
    std::uint64_t plastic_total = 0;
    std::uint64_t contact_total = 0;
    double max_strain = 0.0;
    double final_core_speed = 0.0;
    std::filesystem::path report_path;
    std::filesystem::path timing_path;
    std::filesystem::path snapshot_path;
    std::filesystem::path final_surface_path;
};

namespace detail {

inline std::string frame_file_name(std::uint64_t step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%06llu.obj", static_cast<unsigned long long>(step));
    return buf;
}

inline std::string report_row(const FrameReport& r) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%llu %.6f %.9e %u %u\n",
                  static_cast<unsigned long long>(r.frame), r.clock, r.max_strain,
                  r.plastic_events, r.contacts);
    return buf;
}

}  // namespace detail

/// Executes a scenario headless: steps the vehicle, exports numbered OBJ
/// frames at the configured cadence, writes the per-frame report table and a
/// final snapshot plus the settled damage surface. Timing goes to a separate
/// sidecar so the report file stays byte-reproducible.
inline RunSummary run_scenario(const Scenario& scenario,
                               const std::filesystem::path& out_dir) {
    const SurfaceMesh mesh = load_obj_file(scenario.mesh_path.string());

    std::error_code ec;
    std::filesystem::create_directories(out_dir / "frames", ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir.string());

    BuildResult build = build_vehicle(scenario, mesh);
    VehicleWorld& world = build.world;

    RunSummary summary;
    summary.report_path = out_dir / "report.txt";
    summary.timing_path = out_dir / "timing.txt";
    summary.snapshot_path = out_dir / "final.crsn";
    summary.final_surface_path = out_dir / "final_surface.obj";

    std::ofstream report(summary.report_path);
    std::ofstream timing(summary.timing_path);
    if (!report || !timing) throw IoError("cannot write into " + out_dir.string());
    report << "# frame clock max_strain plastic_events contacts\n";
    timing << "# frame step_us apply_us (wall-clock, not reproducible)\n";

    const std::uint64_t steps = scenario_step_count(scenario);
    std::size_t next_drive = 0;

    for (std::uint64_t i = 1; i <= steps; ++i) {
        while (next_drive < scenario.drive_script.size() &&
               scenario.drive_script[next_drive].at <= world.clock + 1e-12) {
            const DriveEvent& ev = scenario.drive_script[next_drive];
            drive(world, ev.throttle, ev.steer);
            ++next_drive;
        }

        const FrameReport r = step(world);
        report << detail::report_row(r);
        {
            char buf[96];
            std::snprintf(buf, sizeof buf, "%llu %.3f %.3f\n",
                          static_cast<unsigned long long>(r.frame), r.step_us, r.apply_us);
            timing << buf;
        }
        summary.plastic_total += r.plastic_events;
        summary.contact_total += r.contacts;
        summary.max_strain = std::max(summary.max_strain, r.max_strain);

        if (i % static_cast<std::uint64_t>(scenario.output_cadence) == 0) {
            save_obj_file((out_dir / "frames" / detail::frame_file_name(i)).string(),
                          world.deformed_surface, world.surface_triangles);
            ++summary.frames_exported;
        }
    }

    summary.steps = steps;
    summary.final_core_speed = world.core.linear_velocity.norm();

    const DeformationSnapshot snap = take_snapshot(world, scenario.vehicle_id);
    wire::write_bytes_file(summary.snapshot_path, encode_snapshot(snap));
    const std::vector<Vec3> settled = permanent_surface(world);
    save_obj_file(summary.final_surface_path.string(), settled, world.surface_triangles);
    return summary;
}

/// Rebuilds the vehicle from mesh and scenario alone and applies a decoded
/// snapshot; the returned surface must match the exporter's settled surface.
/// This is the receiving end of the shareable damage state.
inline std::vector<Vec3> reconstruct_surface(const Scenario& scenario, const SurfaceMesh& mesh,
                                             const DeformationSnapshot& snap) {
    BuildResult build = build_vehicle(scenario, mesh);
    apply_snapshot(build.world, snap);
    return permanent_surface(build.world);
}

struct BenchRow {
    int requested = 0;
    int achieved = 0;       // control points excluding the centroid
    bool clamped = false;
    double mean_step_us = 0.0;
    double mean_apply_us = 0.0;
};

/// Times warm steps of a freshly built vehicle per control-point budget.
/// The hull is computed once and reduced per budget. Measures only; any
/// assertions about scaling live with the callers.
inline std::vector<BenchRow> bench_scaling(const SurfaceMesh& mesh, std::span<const int> budgets,
                                           int steps, int warmup = 50,
                                           const Scenario& base = Scenario{}) {
    if (budgets.empty()) throw ConfigError("bench needs at least one budget");
    for (std::size_t i = 0; i < budgets.size(); ++i) {
        if (budgets[i] < 4) throw ConfigError("bench budgets must be at least 4");
        if (i > 0 && budgets[i] < budgets[i - 1]) {
            throw ConfigError("bench budgets must be sorted ascending");
        }
    }
    if (steps < 1) throw ConfigError("bench needs at least one measured step");

    const HullMesh hull = convex_hull(mesh.vertices);
    std::vector<BenchRow> rows(budgets.size());
    // Walk the budgets from largest to smallest so each level of detail is
    // carved out of the previous one instead of the full hull every time.
    HullMesh working = hull;
    for (std::size_t bi = budgets.size(); bi-- > 0;) {
        BenchRow& row = rows[bi];
        row.requested = budgets[bi];
        row.clamped = budgets[bi] > hull.point_count();
        const int budget = row.clamped ? hull.point_count() : budgets[bi];

        SimplifyResult simplified = simplify_hull(working, budget);
        working = std::move(simplified.hull);
        row.achieved = simplified.achieved;
        const ControlMesh control = tetrahedralize_and_mass(working, base.mass);
        BindingTable binding =
            compute_weights(mesh, control.rest_points, base.alpha, base.weight_floor);

        AssemblyConfig config = base.assembly_config();
        config.obstacles.clear();
        VehicleWorld world = assemble(mesh, control, std::move(binding), config);

        for (int i = 0; i < warmup; ++i) step(world);

        // Median of block means: preempted or page-faulting stretches must
        // not poison the whole estimate on a shared machine.
        constexpr int kBlocks = 7;
        const int block_len = std::max(1, steps / kBlocks);
        std::vector<double> step_means, apply_means;
        for (int b = 0; b < kBlocks; ++b) {
            double step_sum = 0.0, apply_sum = 0.0;
            for (int i = 0; i < block_len; ++i) {
                const FrameReport r = step(world);
                step_sum += r.step_us;
                apply_sum += r.apply_us;
            }
            step_means.push_back(step_sum / block_len);
            apply_means.push_back(apply_sum / block_len);
        }
        std::sort(step_means.begin(), step_means.end());
        std::sort(apply_means.begin(), apply_means.end());
        row.mean_step_us = step_means[kBlocks / 2];
        row.mean_apply_us = apply_means[kBlocks / 2];
    }
    return rows;
}

}  // namespace crumple

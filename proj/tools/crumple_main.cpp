// crumple - headless vehicle deformation pipeline and scenario runner.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crumple/binding_io.hpp"
#include "crumple/crumple.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitDiverged = 3;

std::string default_output(const std::string& input, const std::string& suffix) {
    return std::filesystem::path(input).stem().string() + suffix;
}

int cmd_hull(const std::string& mesh_path, int points, std::string out_path) {
    if (points != 0 && points < 4) {
        throw crumple::ConfigError("--points must be at least 4");
    }
    const crumple::SurfaceMesh mesh = crumple::load_obj_file(mesh_path);
    crumple::HullMesh hull = crumple::convex_hull(mesh.vertices);
    const int full_count = hull.point_count();
    int achieved = full_count;
    if (points > 0) {
        const int budget = std::min(points, full_count);
        if (budget < points) {
            std::fprintf(stderr, "warning: budget %d exceeds hull vertex count %d, clamped\n",
                         points, full_count);
        }
        crumple::SimplifyResult res = crumple::simplify_hull(hull, budget);
        hull = std::move(res.hull);
        achieved = res.achieved;
    }
    if (out_path.empty()) out_path = default_output(mesh_path, "_hull.obj");
    crumple::save_obj_file(out_path, hull.points, hull.triangles);
    std::printf("hull: %d -> %d points, %zu triangles -> %s\n", full_count, achieved,
                hull.triangles.size(), out_path.c_str());
    return kExitOk;
}

int cmd_bind(const std::string& mesh_path, const std::string& hull_path, double alpha,
             std::string out_path) {
    const crumple::SurfaceMesh mesh = crumple::load_obj_file(mesh_path);
    const crumple::SurfaceMesh hull = crumple::load_obj_file(hull_path);
    const crumple::BindingTable table = crumple::compute_weights(mesh, hull.vertices, alpha);
    if (out_path.empty()) out_path = default_output(mesh_path, ".crbw");
    crumple::write_binding_file(out_path, table);
    std::printf("binding: %u vertices x %u control points, alpha %.3f, %zu entries -> %s\n",
                table.vertex_count, table.control_count, table.alpha, table.entry_count(),
                out_path.c_str());
    return kExitOk;
}

int cmd_simulate(const std::string& config_path, std::string out_dir) {
    const crumple::Scenario scenario = crumple::parse_scenario_file(config_path);
    if (out_dir.empty()) out_dir = default_output(config_path, "_out");
    const crumple::RunSummary summary = crumple::run_scenario(scenario, out_dir);
    std::printf("simulated %llu steps, %llu frames exported\n",
                static_cast<unsigned long long>(summary.steps),
                static_cast<unsigned long long>(summary.frames_exported));
    std::printf("plastic events %llu, contacts %llu, max strain %.4g\n",
                static_cast<unsigned long long>(summary.plastic_total),
                static_cast<unsigned long long>(summary.contact_total), summary.max_strain);
    std::printf("final core speed %.4g m/s\n", summary.final_core_speed);
    std::printf("report   %s\n", summary.report_path.c_str());
    std::printf("snapshot %s\n", summary.snapshot_path.c_str());
    std::printf("surface  %s\n", summary.final_surface_path.c_str());
    return kExitOk;
}

int cmd_bench(const std::string& mesh_path, std::vector<int> budgets, int steps) {
    const crumple::SurfaceMesh mesh = crumple::load_obj_file(mesh_path);
    const auto rows = crumple::bench_scaling(mesh, budgets, steps);
    std::printf("%10s %10s %14s %15s\n", "requested", "achieved", "step us", "bind-apply us");
    for (const auto& r : rows) {
        std::printf("%10d %10d %14.1f %15.1f%s\n", r.requested, r.achieved, r.mean_step_us,
                    r.mean_apply_us, r.clamped ? "  (clamped to hull size)" : "");
    }
    return kExitOk;
}

int cmd_snapshot_decode(const std::string& path) {
    const auto bytes = crumple::wire::read_bytes_file(path);
    const crumple::DeformationSnapshot snap = crumple::decode_snapshot(bytes);
    std::printf("vehicle id  %u\n", snap.vehicle_id);
    std::printf("frame       %u\n", snap.frame);
    std::printf("clock       %.6f s\n", snap.clock);
    std::printf("position    %.6g %.6g %.6g\n", snap.position[0], snap.position[1],
                snap.position[2]);
    std::printf("orientation %.6g %.6g %.6g %.6g (w x y z)\n", snap.orientation[0],
                snap.orientation[1], snap.orientation[2], snap.orientation[3]);
    std::printf("deltas      %zu nodes\n", snap.deltas.size());
    for (std::size_t i = 0; i < snap.deltas.size(); ++i) {
        std::printf("  [%3zu] %12.6g %12.6g %12.6g\n", i, snap.deltas[i][0], snap.deltas[i][1],
                    snap.deltas[i][2]);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"crumple: real-time vehicle deformation pipeline"};
    app.require_subcommand(1);

    std::string mesh_path, hull_path, config_path, snapshot_path, out_path;
    int points = 0;
    int steps = 30;
    double alpha = crumple::kDefaultAlpha;
    std::vector<int> budgets;

    auto* hull = app.add_subcommand("hull", "Build (and optionally reduce) the convex hull");
    hull->add_option("mesh", mesh_path, "input OBJ mesh")->required();
    hull->add_option("--points", points, "target control-point count");
    hull->add_option("-o,--output", out_path, "output OBJ path");

    auto* bind = app.add_subcommand("bind", "Compute inverse-distance binding weights");
    bind->add_option("mesh", mesh_path, "input OBJ mesh")->required();
    bind->add_option("hull", hull_path, "control hull OBJ")->required();
    bind->add_option("--alpha", alpha, "weighting exponent");
    bind->add_option("-o,--output", out_path, "output .crbw path");

    auto* simulate = app.add_subcommand("simulate", "Run a crash scenario headless");
    simulate->add_option("scenario", config_path, "scenario config file")->required();
    simulate->add_option("--out", out_path, "output directory");

    auto* bench = app.add_subcommand("bench", "Time stepping across control budgets");
    bench->add_option("mesh", mesh_path, "input OBJ mesh")->required();
    bench->add_option("--budgets", budgets, "control-point budgets, ascending")
        ->required()
        ->delimiter(',');
    bench->add_option("--steps", steps, "measured steps per budget");

    auto* snapshot = app.add_subcommand("snapshot", "Deformation snapshot utilities");
    auto* decode = snapshot->add_subcommand("decode", "Print a snapshot file");
    decode->add_option("file", snapshot_path, "snapshot .crsn file")->required();
    snapshot->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (hull->parsed()) return cmd_hull(mesh_path, points, out_path);
        if (bind->parsed()) return cmd_bind(mesh_path, hull_path, alpha, out_path);
        if (simulate->parsed()) return cmd_simulate(config_path, out_path);
        if (bench->parsed()) return cmd_bench(mesh_path, budgets, steps);
        if (snapshot->parsed() && decode->parsed()) return cmd_snapshot_decode(snapshot_path);
    } catch (const crumple::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const crumple::DivergedError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDiverged;
    } catch (const crumple::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kExitIo;
    }
    return kExitUsage;
}

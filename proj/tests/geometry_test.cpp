#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "crumple/control_mesh.hpp"
#include "crumple/convex_hull.hpp"
#include "crumple/hull_simplify.hpp"
#include "crumple/obj_io.hpp"
#include "support/oracles.hpp"
#include "support/test_meshes.hpp"

using namespace crumple;
using crumple::testing::brute_force_hull_vertices;
using crumple::testing::divergence_volume;

namespace {

std::set<int> hull_source_set(const HullMesh& hull) {
    return {hull.source_indices.begin(), hull.source_indices.end()};
}

}  // namespace

TEST(ObjIo, MinimalFile) {
    std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    const SurfaceMesh mesh = load_obj(in);
    EXPECT_EQ(mesh.vertices.size(), 3u);
    ASSERT_EQ(mesh.triangles.size(), 1u);
    EXPECT_EQ(mesh.triangles[0], (std::array<int, 3>{0, 1, 2}));
}

TEST(ObjIo, QuadFanTriangulation) {
    std::istringstream in("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    const SurfaceMesh mesh = load_obj(in);
    ASSERT_EQ(mesh.triangles.size(), 2u);
    EXPECT_EQ(mesh.triangles[0], (std::array<int, 3>{0, 1, 2}));
    EXPECT_EQ(mesh.triangles[1], (std::array<int, 3>{0, 2, 3}));
}

TEST(ObjIo, FaceWithTwoIndicesFails) {
    std::istringstream in("v 0 0 0\nv 1 0 0\nf 1 2\n");
    try {
        load_obj(in);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("fewer than 3"), std::string::npos);
        EXPECT_EQ(e.line(), 3);
    }
}

TEST(ObjIo, MalformedVertexReportsLine) {
    std::istringstream in("v 0 0 0\nv nope 0 0\n");
    try {
        load_obj(in);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
    }
}

TEST(ObjIo, EmptyMeshFails) {
    std::istringstream no_verts("# nothing\n");
    EXPECT_THROW(load_obj(no_verts), ParseError);
    std::istringstream no_faces("v 0 0 0\nv 1 0 0\nv 0 1 0\n");
    EXPECT_THROW(load_obj(no_faces), ParseError);
}

TEST(ObjIo, IndexOutOfRangeFails) {
    std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 7\n");
    EXPECT_THROW(load_obj(in), ParseError);
}

TEST(ObjIo, NegativeAndSlashedIndices) {
    std::istringstream in(
        "v 0 0 0\nv 1 0 0\nv 0 1 0\n"
        "f -3/1/1 -2/2/2 -1/3/3\n");
    const SurfaceMesh mesh = load_obj(in);
    ASSERT_EQ(mesh.triangles.size(), 1u);
    EXPECT_EQ(mesh.triangles[0], (std::array<int, 3>{0, 1, 2}));
}

TEST(ObjIo, DegenerateTriangleDropped) {
    std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 1 2\nf 1 2 3\n");
    const SurfaceMesh mesh = load_obj(in);
    EXPECT_EQ(mesh.triangles.size(), 1u);
}

TEST(ObjIo, RoundTripThroughWriter) {
    const SurfaceMesh mesh = crumple::testing::make_car_mesh(9, 8);
    std::ostringstream out;
    save_obj(out, mesh.vertices, mesh.triangles);
    std::istringstream in(out.str());
    const SurfaceMesh back = load_obj(in);
    ASSERT_EQ(back.vertices.size(), mesh.vertices.size());
    ASSERT_EQ(back.triangles, mesh.triangles);
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        EXPECT_NEAR(distance(back.vertices[i], mesh.vertices[i]), 0.0, 1e-7);
    }
}

TEST(ConvexHull, CubeWithInteriorPoints) {
    std::vector<Vec3> pts = crumple::testing::unit_cube_corners();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.2, 0.8);
    for (int i = 0; i < 10; ++i) pts.push_back({u(rng), u(rng), u(rng)});

    const HullMesh hull = convex_hull(pts);
    EXPECT_EQ(hull.point_count(), 8);
    EXPECT_EQ(hull.triangles.size(), 12u);
    EXPECT_EQ(hull_source_set(hull), (std::set<int>{0, 1, 2, 3, 4, 5, 6, 7}));
    EXPECT_EQ(hull_source_set(hull), brute_force_hull_vertices(pts, 1e-9));
    EXPECT_LE(hull_max_signed_distance(hull, pts), 1e-9);
}

TEST(ConvexHull, RegularTetrahedron) {
    const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0},
                                {0.5, std::sqrt(3.0) / 6.0, std::sqrt(2.0 / 3.0)}};
    const HullMesh hull = convex_hull(pts);
    EXPECT_EQ(hull.point_count(), 4);
    EXPECT_EQ(hull.triangles.size(), 4u);
}

TEST(ConvexHull, CoplanarPointsFail) {
    const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.5, 0.5, 0}};
    EXPECT_THROW(convex_hull(pts), GeometryError);
}

TEST(ConvexHull, TooFewPointsFail) {
    const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    EXPECT_THROW(convex_hull(pts), GeometryError);
}

TEST(ConvexHull, MatchesBruteForceOracleOnRandomClouds) {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> size(4, 40);
    for (int trial = 0; trial < 50; ++trial) {
        const auto pts = crumple::testing::random_cloud(size(rng), rng);
        const HullMesh hull = convex_hull(pts);
        EXPECT_EQ(hull_source_set(hull), brute_force_hull_vertices(pts, 1e-9))
            << "trial " << trial;
        EXPECT_LE(hull_max_signed_distance(hull, pts), 1e-9) << "trial " << trial;
    }
}

TEST(ConvexHull, OutwardOrientation) {
    std::mt19937_64 rng(3);
    const auto pts = crumple::testing::random_cloud(30, rng);
    const HullMesh hull = convex_hull(pts);
    // Outward winding makes the divergence-theorem volume positive.
    EXPECT_GT(divergence_volume(hull.points, hull.triangles), 0.0);
}

TEST(ConvexHull, Deterministic) {
    std::mt19937_64 rng(5);
    const auto pts = crumple::testing::random_cloud(200, rng);
    const HullMesh a = convex_hull(pts);
    const HullMesh b = convex_hull(pts);
    EXPECT_EQ(a.source_indices, b.source_indices);
    EXPECT_EQ(a.triangles, b.triangles);
}

TEST(SimplifyHull, IdentityWhenTargetEqualsCount) {
    const auto pts = crumple::testing::unit_cube_corners();
    const HullMesh hull = convex_hull(pts);
    const SimplifyResult res = simplify_hull(hull, 8);
    EXPECT_EQ(res.achieved, 8);
    EXPECT_EQ(res.hull.source_indices, hull.source_indices);
    EXPECT_EQ(res.hull.triangles, hull.triangles);
}

TEST(SimplifyHull, IcosahedronToTetrahedron) {
    const HullMesh hull = convex_hull(crumple::testing::icosahedron_points());
    ASSERT_EQ(hull.point_count(), 12);
    const SimplifyResult res = simplify_hull(hull, 4);
    EXPECT_EQ(res.achieved, 4);
    EXPECT_EQ(res.hull.triangles.size(), 4u);
    const double before = divergence_volume(hull.points, hull.triangles);
    const double after = divergence_volume(res.hull.points, res.hull.triangles);
    EXPECT_GT(after, 0.0);
    EXPECT_LE(after, before);
}

TEST(SimplifyHull, TargetBelowSimplexFails) {
    const HullMesh hull = convex_hull(crumple::testing::unit_cube_corners());
    EXPECT_THROW(simplify_hull(hull, 3), GeometryError);
}

TEST(SimplifyHull, ResultStaysConvex) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const auto pts = crumple::testing::random_cloud(120, rng);
        const HullMesh hull = convex_hull(pts);
        const int target = 4 + static_cast<int>(rng() % 12);
        const SimplifyResult res = simplify_hull(hull, std::min(target, hull.point_count()));
        // Re-hulling the simplified points returns the same vertex set.
        const HullMesh again = convex_hull(res.hull.points);
        EXPECT_EQ(again.point_count(), res.hull.point_count()) << "trial " << trial;
        EXPECT_LE(res.achieved, std::min(target, hull.point_count()));
    }
}

TEST(Tetrahedralize, UnitCubeMassDistribution) {
    const HullMesh hull = convex_hull(crumple::testing::unit_cube_corners());
    const ControlMesh cm = tetrahedralize_and_mass(hull, 1000.0);

    EXPECT_EQ(cm.tetrahedra.size(), 12u);
    EXPECT_EQ(cm.centroid_index, 8);
    EXPECT_NEAR(control_mesh_volume(cm), 1.0, 1e-12);

    double mass_sum = 0.0;
    for (const double m : cm.node_masses) mass_sum += m;
    EXPECT_NEAR(mass_sum, 1000.0, 1000.0 * 1e-9);

    // Independent summation: the centroid joins every tetrahedron, so it
    // collects a quarter of each element's share.
    double centroid_expected = 0.0;
    const Vec3 c = cm.rest_points[cm.centroid_index];
    for (const auto& t : hull.triangles) {
        const double vol = std::abs((hull.points[t[1]] - c)
                                        .cross(hull.points[t[2]] - c)
                                        .dot(hull.points[t[0]] - c)) /
                           6.0;
        centroid_expected += 1000.0 * vol / 1.0 * 0.25;
    }
    EXPECT_NEAR(cm.node_masses[cm.centroid_index], centroid_expected, 1e-9);
    EXPECT_NEAR(cm.node_masses[cm.centroid_index], 250.0, 1e-9);
}

TEST(Tetrahedralize, RegularTetrahedronSymmetry) {
    const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0},
                                {0.5, std::sqrt(3.0) / 6.0, std::sqrt(2.0 / 3.0)}};
    const ControlMesh cm = tetrahedralize_and_mass(convex_hull(pts), 4.0);
    ASSERT_EQ(cm.node_masses.size(), 5u);
    for (int i = 1; i < 4; ++i) {
        EXPECT_NEAR(cm.node_masses[i], cm.node_masses[0], 1e-12);
    }
    double sum = 0.0;
    for (const double m : cm.node_masses) sum += m;
    EXPECT_NEAR(sum, 4.0, 4.0 * 1e-9);
}

TEST(Tetrahedralize, DegenerateSolidFails) {
    HullMesh flat;
    flat.points = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    flat.source_indices = {0, 1, 2, 3};
    flat.triangles = {{0, 1, 2}, {1, 3, 2}, {0, 2, 1}, {1, 2, 3}};
    EXPECT_THROW(tetrahedralize_and_mass(flat, 10.0), GeometryError);
}

TEST(Tetrahedralize, NonPositiveMassFails) {
    const HullMesh hull = convex_hull(crumple::testing::unit_cube_corners());
    EXPECT_THROW(tetrahedralize_and_mass(hull, 0.0), ConfigError);
    EXPECT_THROW(tetrahedralize_and_mass(hull, -5.0), ConfigError);
}

TEST(Tetrahedralize, EdgeListInvariant) {
    const HullMesh hull = convex_hull(crumple::testing::unit_cube_corners());
    const ControlMesh cm = tetrahedralize_and_mass(hull, 1.0);

    // Every hull-triangle edge exactly once plus one spoke per hull node.
    std::set<std::array<int, 2>> expected;
    for (const auto& t : hull.triangles) {
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            expected.insert({std::min(a, b), std::max(a, b)});
        }
    }
    const std::size_t hull_edges = expected.size();
    EXPECT_EQ(hull_edges, 18u);  // 8 vertices, 12 faces: E = V + F - 2
    for (int i = 0; i < hull.point_count(); ++i) expected.insert({i, cm.centroid_index});

    const std::set<std::array<int, 2>> actual(cm.edges.begin(), cm.edges.end());
    EXPECT_EQ(actual, expected);
    EXPECT_EQ(cm.edges.size(), hull_edges + 8u);
}

TEST(Tetrahedralize, CentroidTetraCoverageInvariant) {
    std::mt19937_64 rng(21);
    const auto pts = crumple::testing::random_cloud(60, rng);
    const HullMesh hull = convex_hull(pts);
    const ControlMesh cm = tetrahedralize_and_mass(hull, 123.0);
    ASSERT_EQ(cm.tetrahedra.size(), cm.hull_triangles.size());
    for (std::size_t i = 0; i < cm.tetrahedra.size(); ++i) {
        const auto& tet = cm.tetrahedra[i];
        const auto& tri = cm.hull_triangles[i];
        EXPECT_EQ(tet[0], tri[0]);
        EXPECT_EQ(tet[1], tri[1]);
        EXPECT_EQ(tet[2], tri[2]);
        EXPECT_EQ(tet[3], cm.centroid_index);
    }
}

TEST(Tetrahedralize, MassConservationAcrossLevelsOfDetail) {
    std::mt19937_64 rng(31);
    const auto pts = crumple::testing::random_cloud(200, rng);
    const HullMesh hull = convex_hull(pts);
    for (const int budget : {4, 6, 12, 24, hull.point_count()}) {
        const SimplifyResult res = simplify_hull(hull, std::min(budget, hull.point_count()));
        const ControlMesh cm = tetrahedralize_and_mass(res.hull, 1500.0);
        double sum = 0.0;
        for (const double m : cm.node_masses) sum += m;
        EXPECT_NEAR(sum, 1500.0, 1500.0 * 1e-9) << "budget " << budget;
        // Dual route: element volumes against the divergence-theorem surface
        // integral.
        EXPECT_NEAR(control_mesh_volume(cm),
                    divergence_volume(res.hull.points, res.hull.triangles),
                    1e-9 * control_mesh_volume(cm))
            << "budget " << budget;
    }
}

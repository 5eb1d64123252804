#include <gtest/gtest.h>

#include "membrane/mesh.hpp"
#include "oracles.hpp"

#include <set>
#include <sstream>

using namespace membrane;

namespace {

Mesh unit_grid(int nx, int ny) { return generate_structured({1.0, 1.0, nx, ny}); }

std::string two_triangle_msh(const std::string& extra_elements = "", int extra_count = 0) {
    std::ostringstream os;
    os << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
       << "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 1 1 0\n4 0 1 0\n$EndNodes\n"
       << "$Elements\n" << 2 + extra_count << "\n"
       << "1 2 2 0 1 1 2 3\n"
       << "2 2 2 0 1 1 3 4\n"
       << extra_elements << "$EndElements\n";
    return os.str();
}

}  // namespace

TEST(StructuredGrid, MinimalGridCounts) {
    const Mesh m = unit_grid(1, 1);
    EXPECT_EQ(m.num_nodes(), 4);
    EXPECT_EQ(m.num_triangles(), 2);
}

TEST(StructuredGrid, TwoByTwoCounts) {
    const Mesh m = unit_grid(2, 2);
    EXPECT_EQ(m.num_nodes(), 9);
    EXPECT_EQ(m.num_triangles(), 8);
}

TEST(StructuredGrid, NodePositionsFollowSpacing) {
    const Mesh m = generate_structured({3.0, 2.0, 3, 4});
    for (int j = 0; j <= 4; ++j) {
        for (int i = 0; i <= 3; ++i) {
            const Vec2& p = m.node(j * 4 + i);
            EXPECT_DOUBLE_EQ(p.x(), i * 3.0 / 3);
            EXPECT_DOUBLE_EQ(p.y(), j * 2.0 / 4);
        }
    }
}

TEST(StructuredGrid, ThreeByTwoAreaAndValence) {
    const StructuredSpec spec{1.5, 0.7, 3, 2};
    const Mesh m = generate_structured(spec);
    double area = 0.0;
    std::vector<int> valence(m.num_nodes(), 0);
    for (int e = 0; e < m.num_triangles(); ++e) {
        const auto& t = m.triangle(e);
        const double a = oracle::shoelace(m.node(t[0]), m.node(t[1]), m.node(t[2]));
        EXPECT_GT(a, 0.0);
        area += a;
        for (int v : t) ++valence[v];
    }
    EXPECT_NEAR(area, spec.Lx * spec.Ly, 1e-12 * spec.Lx * spec.Ly);
    for (int v : valence) EXPECT_LE(v, 6);
}

TEST(StructuredGrid, AreaSumAndOrientationOverManySpecs) {
    for (int nx : {1, 2, 3, 5, 8, 13}) {
        for (int ny : {1, 4, 7}) {
            const StructuredSpec spec{0.3 * nx + 0.1, 1.7, nx, ny};
            const Mesh m = generate_structured(spec);
            for (int e = 0; e < m.num_triangles(); ++e) ASSERT_GT(m.signed_area(e), 0.0);
            EXPECT_NEAR(m.total_area(), spec.Lx * spec.Ly, 1e-12 * spec.Lx * spec.Ly);
        }
    }
}

TEST(StructuredGrid, DiagonalRunsLowerLeftToUpperRight) {
    const Mesh m = unit_grid(1, 1);
    // Both triangles contain the lower-left (0) and upper-right (3) corners.
    for (int e = 0; e < 2; ++e) {
        std::set<int> v(m.triangle(e).begin(), m.triangle(e).end());
        EXPECT_TRUE(v.count(0) && v.count(3));
    }
}

TEST(StructuredGrid, RejectsInvalidSpec) {
    EXPECT_THROW(generate_structured({1.0, 1.0, 0, 2}), MeshError);
    EXPECT_THROW(generate_structured({-1.0, 1.0, 2, 2}), MeshError);
}

TEST(Refine, DoublesCounts) {
    const StructuredSpec fine = refine({1.0, 1.0, 4, 4});
    EXPECT_EQ(fine.nx, 8);
    EXPECT_EQ(fine.ny, 8);
    StructuredSpec s{2.0, 1.0, 3, 5};
    for (int k = 0; k < 4; ++k) s = refine(s);
    EXPECT_EQ(s.nx, 3 * 16);
    EXPECT_EQ(s.ny, 5 * 16);
}

TEST(Refine, CoarseNodesAppearExactlyInFineGrid) {
    const StructuredSpec coarse{1.0, 1.0, 4, 4};
    const Mesh cm = generate_structured(coarse);
    const Mesh fm = generate_structured(refine(coarse));
    const Vec2 probe(0.25, 0.5);
    bool found = false;
    for (const Vec2& p : fm.nodes()) found |= (p.x() == probe.x() && p.y() == probe.y());
    EXPECT_TRUE(found);

    for (const StructuredSpec& s : {StructuredSpec{1.0, 1.0, 4, 4}, StructuredSpec{0.7, 1.3, 3, 5}}) {
        const Mesh c = generate_structured(s);
        const Mesh f = generate_structured(refine(refine(s)));
        std::set<std::pair<double, double>> fine_pos;
        for (const Vec2& p : f.nodes()) fine_pos.insert({p.x(), p.y()});
        for (const Vec2& p : c.nodes()) EXPECT_TRUE(fine_pos.count({p.x(), p.y()})) << p.transpose();
    }
    (void)cm;
}

TEST(MatchPositions, FindsBaselineNodesAndRejectsMissing) {
    const StructuredSpec s{1.0, 1.0, 3, 3};
    const Mesh c = generate_structured(s);
    const Mesh f = generate_structured(refine(refine(s)));
    const auto ids = match_positions(f, c.nodes(), 1e-12 * s.hx());
    ASSERT_EQ(ids.size(), c.nodes().size());
    for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_LE((f.node(ids[i]) - c.node(i)).norm(), 1e-12);
    EXPECT_THROW(match_positions(c, {Vec2(0.5, 0.5)}, 1e-9), MeshError);
}

TEST(ReadMsh, HandWrittenTwoTriangles) {
    std::istringstream in(two_triangle_msh());
    const Mesh m = read_msh(in);
    EXPECT_EQ(m.num_nodes(), 4);
    EXPECT_EQ(m.num_triangles(), 2);
    EXPECT_NEAR(m.total_area(), 1.0, 1e-15);
}

TEST(ReadMsh, SkipsPointsAndLinesRejectsQuads) {
    {
        std::istringstream in(two_triangle_msh("3 15 2 0 1 1\n4 1 2 0 1 1 2\n", 2));
        EXPECT_EQ(read_msh(in).num_triangles(), 2);
    }
    {
        std::istringstream in(two_triangle_msh("3 3 2 0 1 1 2 3 4\n", 1));
        try {
            read_msh(in);
            FAIL() << "quad accepted";
        } catch (const ParseError& e) {
            EXPECT_NE(std::string(e.what()).find("unsupported element type"), std::string::npos);
            EXPECT_EQ(e.line(), 15u);
        }
    }
}

TEST(ReadMsh, RejectsBinaryAndBadHeaders) {
    {
        std::istringstream in("$MeshFormat\n2.2 1 8\n$EndMeshFormat\n");
        try {
            read_msh(in);
            FAIL();
        } catch (const ParseError& e) {
            EXPECT_NE(std::string(e.what()).find("binary"), std::string::npos);
        }
    }
    {
        std::istringstream in("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n1\n1 0 0 0\n$EndNodez\n");
        try {
            read_msh(in);
            FAIL();
        } catch (const ParseError& e) {
            EXPECT_EQ(e.line(), 7u);
        }
    }
    {
        std::istringstream in("garbage\n");
        EXPECT_THROW(read_msh(in), ParseError);
    }
}

TEST(ReadMsh, RejectsNonPlanar) {
    std::string text = two_triangle_msh();
    text.replace(text.find("3 1 1 0"), 7, "3 1 1 0.01");
    std::istringstream in(text);
    EXPECT_THROW(read_msh(in), MeshError);
}

TEST(ReadMsh, RoundTripThroughMinimalEmitter) {
    const Mesh original = unit_grid(2, 2);
    std::stringstream buf;
    oracle::write_msh(buf, original);
    const Mesh back = read_msh(buf);
    ASSERT_EQ(back.num_nodes(), original.num_nodes());
    ASSERT_EQ(back.num_triangles(), original.num_triangles());
    // Relabeling: match by position, then compare connectivity as vertex-position sets.
    const auto ids = match_positions(back, original.nodes(), 1e-12);
    std::set<std::set<int>> a, b;
    for (const auto& t : original.triangles()) a.insert({ids[t[0]], ids[t[1]], ids[t[2]]});
    for (const auto& t : back.triangles()) b.insert({t[0], t[1], t[2]});
    EXPECT_EQ(a, b);
}

TEST(NearestNode, CenterOutsideAndTie) {
    const Mesh m = unit_grid(2, 2);
    EXPECT_EQ(nearest_node(m, {0.5, 0.5}), 4);
    EXPECT_EQ(nearest_node(m, {3.0, -2.0}), 2);
    // (0.25, 0) is equidistant from nodes 0 and 1.
    EXPECT_EQ(nearest_node(m, {0.25, 0.0}), 0);
}

TEST(CentralElementPair, DeterministicRule) {
    {
        const Mesh m = unit_grid(2, 2);
        const auto [a, b] = central_element_pair(m);
        // rectangle (1, 1) is rectangle index 3
        EXPECT_EQ(a, 6);
        EXPECT_EQ(b, 7);
    }
    {
        const Mesh m = unit_grid(1, 1);
        const auto [a, b] = central_element_pair(m);
        EXPECT_EQ(a, 0);
        EXPECT_EQ(b, 1);
    }
}

TEST(CentralElementPair, FourByFourTouchesCenter) {
    const Mesh m = unit_grid(4, 4);
    const auto [a, b] = central_element_pair(m);
    const Vec2 center(0.5, 0.5);
    for (int e : {a, b}) {
        bool has_center = false;
        for (int v : m.triangle(e)) has_center |= (m.node(v) - center).norm() < 1e-15;
        EXPECT_TRUE(has_center);
    }
    std::set<int> va(m.triangle(a).begin(), m.triangle(a).end());
    int shared = 0;
    for (int v : m.triangle(b)) shared += va.count(v);
    EXPECT_EQ(shared, 2);
}

TEST(CentralElementPair, RequiresStructuredMetadata) {
    std::istringstream in(two_triangle_msh());
    const Mesh m = read_msh(in);
    EXPECT_THROW(central_element_pair(m), MeshError);
}

TEST(BoundaryNodes, SmallGridsAndPerimeterFormula) {
    EXPECT_EQ(boundary_nodes(unit_grid(1, 1)).size(), 4u);
    const auto b2 = boundary_nodes(unit_grid(2, 2));
    EXPECT_EQ(b2.size(), 8u);
    EXPECT_EQ(std::count(b2.begin(), b2.end(), 4), 0);
    for (int n = 1; n <= 12; ++n) EXPECT_EQ(boundary_nodes(unit_grid(n, n)).size(), static_cast<std::size_t>(4 * n));
}

TEST(MeshValidation, RejectsBadTriangles) {
    const std::vector<Vec2> pts{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    EXPECT_THROW(Mesh(pts, {{0, 2, 1}}), MeshError);              // clockwise
    EXPECT_THROW(Mesh(pts, {{0, 1, 7}}), MeshError);              // missing node
    EXPECT_THROW(Mesh(pts, {{0, 1, 2}, {1, 2, 0}}), MeshError);   // duplicate
    EXPECT_THROW(Mesh(pts, {{0, 0, 2}}), MeshError);              // repeated vertex
    const std::vector<Vec2> far{{0, 0}, {1, 0}, {0, 1}, {5, 5}, {6, 5}, {5, 6}};
    EXPECT_THROW(Mesh(far, {{0, 1, 2}, {3, 4, 5}}), MeshError);   // not edge-connected
}

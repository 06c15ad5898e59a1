#include <doctest.h>

#include "hypnodal/errors.hpp"
#include "hypnodal/hypmesh.hpp"

#include <cmath>
#include <set>

using namespace hypnodal;
using namespace hypnodal::geo;
using namespace hypnodal::mesh;

namespace {

// Interior angle of the geodesic triangle pqr at p: move p to the origin, where
// geodesics through it are straight.
double geodesic_angle(const DiskPoint& p, const DiskPoint& q, const DiskPoint& r) {
    const Isometry f = Isometry::to_origin(p);
    return std::abs(std::arg(f.apply(r.z()) / f.apply(q.z())));
}

// Oracle: the geodesic triangles on the mesh vertices tile the polygon exactly,
// so their angle defects add up to its area.
double geodesic_tiling_area(const TriMesh& m) {
    double area = 0.0;
    for (const auto& t : m.triangles) {
        const auto& a = m.nodes[t[0]];
        const auto& b = m.nodes[t[1]];
        const auto& c = m.nodes[t[2]];
        area += kPi - geodesic_angle(a, b, c) - geodesic_angle(b, c, a) - geodesic_angle(c, a, b);
    }
    return area;
}

std::vector<HyperbolicPolygon> pipeline_polygons() {
    return {quarter_octagon_pentagon(), regular_right_polygon(8, kPi / 2), pants_polygon(2.0),
            right_angled_hexagon(1.0, 1.0, 1.0)};
}

} // namespace

TEST_CASE("triangulate postconditions on the pipeline polygons") {
    for (const auto& p : pipeline_polygons()) {
        for (double h : {0.5, 0.2, 0.08}) {
            const TriMesh m = triangulate(p, h);
            CHECK_NOTHROW(check_mesh(m));
            CHECK(m.h <= h);
            CHECK(m.h == doctest::Approx(max_edge_length(m)));
            CHECK(min_angle_degrees(m) >= 20.0);
            REQUIRE(m.side_count() == p.size());
            for (const auto& e : m.boundary_edges) {
                const Geodesic g = p.side_geodesic(e.side);
                CHECK(g.incidence_residual(m.nodes[e.a]) < 1e-10);
                CHECK(g.incidence_residual(m.nodes[e.b]) < 1e-10);
            }
            CHECK(geodesic_tiling_area(m) == doctest::Approx(polygon_area(p)).epsilon(1e-9));
        }
    }
}

TEST_CASE("side nodes sit at dyadic fractions of the side length") {
    const auto p = pants_polygon(2.0);
    const TriMesh m = refine(refine(triangulate(p, 10.0)));
    for (std::size_t s = 0; s < p.size(); ++s) {
        const auto nodes = m.side_nodes(static_cast<int>(s));
        const double len = p.side_length(s);
        const double pieces = static_cast<double>(nodes.size() - 1);
        CHECK(std::fmod(std::log2(pieces), 1.0) == 0.0);
        for (std::size_t k = 0; k < nodes.size(); ++k)
            CHECK(hyp_distance(p.side_start(s), m.nodes[nodes[k]]) / len ==
                  doctest::Approx(static_cast<double>(k) / pieces).epsilon(1e-9));
    }
}

TEST_CASE("refine splits every triangle in four") {
    const auto p = quarter_octagon_pentagon();
    const TriMesh m = triangulate(p, 0.3);
    const TriMesh r = refine(m);
    CHECK(r.triangles.size() == 4 * m.triangles.size());
    CHECK(r.boundary_edges.size() == 2 * m.boundary_edges.size());
    for (int s = 0; s < 5; ++s)
        CHECK(r.side_nodes(s).size() == 2 * m.side_nodes(s).size() - 1);
    CHECK(r.h / m.h > 0.4);
    CHECK(r.h / m.h < 0.6);
    CHECK_NOTHROW(check_mesh(r));
    // Euler characteristic of a disk, counted from the mesh itself.
    std::set<std::pair<int, int>> edges;
    for (const auto& t : r.triangles)
        for (int k = 0; k < 3; ++k)
            edges.insert(std::minmax(t[k], t[(k + 1) % 3]));
    CHECK(static_cast<long>(r.nodes.size()) - static_cast<long>(edges.size()) +
              static_cast<long>(r.triangles.size()) ==
          1);
}

TEST_CASE("octagon mesh is symmetric under the reflections of the octagon") {
    const TriMesh m = triangulate(regular_right_polygon(8, kPi / 2), 0.1);
    for (double phi : {0.0, kPi / 8, kPi / 4, kPi / 2}) {
        const Isometry r(std::polar(1.0, phi), 0.0, true);
        for (const auto& x : m.nodes) {
            const Complex y = r.apply(x.z());
            double best = 1.0;
            for (const auto& z : m.nodes)
                best = std::min(best, std::abs(z.z() - y));
            CHECK(best < 1e-12);
        }
    }
}

TEST_CASE("transport_mesh") {
    const TriMesh m = triangulate(quarter_octagon_pentagon(), 0.2);
    SUBCASE("identity leaves the mesh unchanged") {
        const TriMesh t = transport_mesh(m, Isometry::identity());
        for (std::size_t i = 0; i < m.nodes.size(); ++i)
            CHECK(std::abs(t.nodes[i].z() - m.nodes[i].z()) < 1e-15);
        CHECK(t.triangles == m.triangles);
    }
    SUBCASE("isometries preserve hyperbolic edge lengths and validity") {
        const Isometry g = compose(Isometry::translation(0.7), Isometry::rotation(1.1));
        for (const Isometry& f : {g, compose(Isometry::conjugation(), g)}) {
            const TriMesh t = transport_mesh(m, f);
            CHECK_NOTHROW(check_mesh(t));
            for (const auto& tri : m.triangles)
                CHECK(hyp_distance(t.nodes[tri[0]], t.nodes[tri[1]]) ==
                      doctest::Approx(hyp_distance(m.nodes[tri[0]], m.nodes[tri[1]])).epsilon(1e-10));
            const TriMesh back = transport_mesh(t, f.inverse());
            for (std::size_t i = 0; i < m.nodes.size(); ++i)
                CHECK(std::abs(back.nodes[i].z() - m.nodes[i].z()) < 1e-12);
            CHECK(back.triangles == m.triangles);
        }
    }
}

TEST_CASE("triangulate is deterministic") {
    const auto p = pants_polygon(2.0);
    const TriMesh a = triangulate(p, 0.15);
    const TriMesh b = triangulate(p, 0.15);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        CHECK(a.nodes[i].x == b.nodes[i].x);
        CHECK(a.nodes[i].y == b.nodes[i].y);
    }
    CHECK(a.triangles == b.triangles);
}

TEST_CASE("clockwise polygons are meshed counterclockwise") {
    const auto p = quarter_octagon_pentagon().transformed(Isometry::conjugation());
    REQUIRE(p.orientation() < 0);
    const TriMesh m = triangulate(p, 0.2);
    CHECK_NOTHROW(check_mesh(m));
    for (std::size_t s = 0; s < p.size(); ++s) {
        const auto nodes = m.side_nodes(static_cast<int>(s));
        CHECK(std::abs(m.nodes[nodes.front()].z() - p.side_start(s).z()) < 1e-15);
        CHECK(std::abs(m.nodes[nodes.back()].z() - p.side_end(s).z()) < 1e-15);
    }
}

TEST_CASE("triangulate errors") {
    CHECK_THROWS_AS(triangulate(quarter_octagon_pentagon(), 0.0), DomainError);
    CHECK_THROWS_AS(triangulate(quarter_octagon_pentagon(), -1.0), DomainError);
    const HyperbolicPolygon bow_tie({{-0.3, -0.3}, {0.3, 0.3}, {0.3, -0.3}, {-0.3, 0.3}}, {});
    CHECK_THROWS_AS(triangulate(bow_tie, 0.1), GeometryError);
}

TEST_CASE("check_mesh rejects broken meshes") {
    TriMesh m = triangulate(quarter_octagon_pentagon(), 0.5);
    SUBCASE("inverted triangle") {
        std::swap(m.triangles[0][1], m.triangles[0][2]);
        CHECK_THROWS_AS(check_mesh(m), GeometryError);
    }
    SUBCASE("edge used three times") {
        m.triangles.push_back(m.triangles[0]);
        CHECK_THROWS_AS(check_mesh(m), GeometryError);
    }
    SUBCASE("missing boundary edge") {
        m.boundary_edges.pop_back();
        CHECK_THROWS_AS(check_mesh(m), GeometryError);
    }
}

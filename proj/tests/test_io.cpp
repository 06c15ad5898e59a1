#include <doctest.h>

#include "hypnodal/errors.hpp"
#include "hypnodal/io.hpp"

#include <regex>
#include <sstream>

#include <fmt/format.h>

using namespace hypnodal;
using namespace hypnodal::geo;

namespace {

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);)
        out.push_back(l);
    return out;
}

HyperbolicPolygon parse(const std::string& text) {
    std::istringstream is(text);
    return io::read_polygon(is);
}

} // namespace

TEST_CASE("polygon round trip is exact") {
    for (const auto& p : {quarter_octagon_pentagon(), pants_polygon(2.0), right_angled_hexagon(0.3, 1.0, 1.5)}) {
        std::ostringstream os;
        io::write_polygon(os, p);
        const auto q = parse(os.str());
        REQUIRE(q.size() == p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(q.vertex(i).x == p.vertex(i).x);
            CHECK(q.vertex(i).y == p.vertex(i).y);
            CHECK(q.label(i) == p.label(i));
        }
    }
}

TEST_CASE("polygon parsing") {
    const auto p = parse("# quarter\n\nmodel poincare-disk\nvertices 3   # count\n0 0 dirichlet\n0.5 0 neumann\n"
                         "0 0.5 glue:a\n\n");
    CHECK(p.size() == 3);
    CHECK(p.label(2) == SideLabel::glue("a"));

    CHECK_THROWS_AS(parse("model klein\nvertices 3\n0 0 neumann\n0.5 0 neumann\n0 0.5 neumann\n"), ParseError);
    CHECK_THROWS_AS(parse("model poincare-disk\nvertices 2\n0 0 neumann\n0.5 0 neumann\n"), ParseError);
    CHECK_THROWS_AS(parse("model poincare-disk\nvertices 3\n0 0 neumann\n0.5 0 neumann\n"), ParseError);
    CHECK_THROWS_AS(parse("model poincare-disk\nvertices 3\n0 0 neumann\n0.5 0 robin\n0 0.5 neumann\n"), ParseError);
    CHECK_THROWS_AS(parse("model poincare-disk\nvertices 3\n0 0 neumann\n0.5 x neumann\n0 0.5 neumann\n"), ParseError);
    CHECK_THROWS_AS(parse("model poincare-disk\nvertices 3\n0 0 neumann\n1.5 0 neumann\n0 0.5 neumann\n"), ParseError);
    CHECK_THROWS_AS(parse("model poincare-disk\nvertices 3\n0 0 neumann\n0.5 0 neumann\n0 0.5 neumann\nextra\n"),
                    ParseError);
    try {
        parse("model poincare-disk\nvertices 3\n0 0 neumann\n0.5 0 robin\n0 0.5 neumann\n");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
}

TEST_CASE("mesh dump") {
    const auto m = mesh::triangulate(quarter_octagon_pentagon(), 0.5);
    std::ostringstream os;
    io::write_mesh(os, m);
    const auto l = lines(os.str());
    CHECK(l[0] == "NODES " + std::to_string(m.nodes.size()));
    const std::size_t tri = 1 + m.nodes.size();
    CHECK(l[tri] == "TRIANGLES " + std::to_string(m.triangles.size()));
    const std::size_t bnd = tri + 1 + m.triangles.size();
    CHECK(l[bnd] == "BOUNDARY " + std::to_string(m.boundary_edges.size()));
    const std::size_t cor = bnd + 1 + m.boundary_edges.size();
    CHECK(l[cor] == "CORNERS 5");
    CHECK(l.size() == cor + 6);
    CHECK(l[tri + 1] == fmt::format("{} {} {}", m.triangles[0][0], m.triangles[0][1], m.triangles[0][2]));
}

TEST_CASE("CSV reports") {
    std::ostringstream eig;
    io::write_eigen_csv(eig, {{3.8386, 1e-12}, {9.5, 2e-12}}, 0.076, 120);
    const auto l = lines(eig.str());
    REQUIRE(l.size() == 3);
    CHECK(l[0] == "index,lambda,residual,mesh_h,dof_count");
    CHECK(l[1].starts_with("0,3.8386,"));
    CHECK(l[2].ends_with(",0.076,120"));

    CHECK(io::bounds_row({2, 0}) == "2,0,12.566371,3,173");
    CHECK(io::bounds_row({0, 3}) == "0,3,6.283185,0,86");
    std::ostringstream b;
    io::write_bounds_csv(b, {{2, 0}, {1, 1}});
    CHECK(b.str() == "g,n,area,pants_number,nprime_bound\n2,0,12.566371,3,173\n1,1,6.283185,1,86\n");
    CHECK_THROWS_AS(io::bounds_row({0, 2}), DomainError);
}

TEST_CASE("surface description") {
    std::ostringstream os;
    io::write_surface(os, glue::pants_surface(2.0), "pants");
    const auto l = lines(os.str());
    CHECK(l[0] == "euler_characteristic -1");
    CHECK(l[1] == "boundary_circles 3");
    CHECK(l[3] == "charts 1");
    CHECK(l[4] == "chart 0 polygon pants sign +1 placement 1 0 0 0 0");
    CHECK(l[5] == "pairings 2");
    CHECK(l[6].starts_with("pairing 0:1 0:7 reversed even map "));
}

TEST_CASE("nodal export and SVG") {
    nodal::NodalSet ns;
    ns.components.push_back({{{0.0, 0.0}, {0.5, 0.0}}, false});
    ns.components.push_back({{{0.1, 0.1}, {0.2, 0.1}, {0.2, 0.2}}, true});
    ns.crossing_points.push_back({{0.0, 0.0}, 1.5, true});
    std::ostringstream os;
    io::write_nodal(os, ns);
    CHECK(os.str() == "polyline 0 open 2\n0 0\n0.5 0\n\npolyline 1 closed 3\n0.10000000000000001 "
                      "0.10000000000000001\n0.20000000000000001 0.10000000000000001\n0.20000000000000001 "
                      "0.20000000000000001\n\ncrossing 0 0 1.5 transversal\n");

    io::SvgScene scene;
    scene.polygons.push_back(regular_right_polygon(8, kPi / 2));
    scene.mirrors.push_back(Geodesic(kPi, 0.0));
    scene.mirrors.push_back(Geodesic(0.3, 2.0));
    scene.nodal_lines = ns.components;
    std::ostringstream svg;
    io::write_svg(svg, scene);
    const std::string text = svg.str();
    CHECK(text.find("viewBox=\"0 0 1000 1000\"") != std::string::npos);
    for (const char* cls : {"class=\"disk\"", "class=\"side\"", "class=\"mirror\"", "class=\"nodal\""})
        CHECK(text.find(cls) != std::string::npos);
    // The real diameter runs across the middle of the viewport, y upward.
    CHECK(text.find("M0.000,500.000") != std::string::npos);
    CHECK(text.find("L1000.000,500.000\"") != std::string::npos);
    // The nodal point (0.5, 0) sits at (750, 500); (0.1, 0.1) at (550, 450).
    CHECK(text.find("L750.000,500.000") != std::string::npos);
    CHECK(text.find("M550.000,450.000") != std::string::npos);
    const std::regex coord(R"([ML](-?[0-9.]+),(-?[0-9.]+))");
    for (auto it = std::sregex_iterator(text.begin(), text.end(), coord); it != std::sregex_iterator(); ++it)
        for (int k : {1, 2}) {
            const double v = std::stod((*it)[k]);
            CHECK(v >= 0.0);
            CHECK(v <= 1000.0);
        }
}

TEST_CASE("assertion log") {
    io::AssertionLog log;
    CHECK(log.at_most("residual", 1e-12, 1e-8));
    CHECK_FALSE(log.at_most("deviation", 0.3, 0.2));
    CHECK_FALSE(log.all_passed());
    std::ostringstream os;
    log.write(os);
    CHECK(os.str() == "name,value,tolerance,result\nresidual,1e-12,1e-08,pass\ndeviation,0.3,0.2,fail\n");
}

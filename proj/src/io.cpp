#include "hypnodal/io.hpp"

#include "hypnodal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace hypnodal::io {

namespace {

std::string strip(std::string line) {
    if (const auto hash = line.find('#'); hash != std::string::npos)
        line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = line.find_last_not_of(" \t\r");
    return line.substr(first, last - first + 1);
}

std::string coefficients(const geo::Isometry& f) {
    return fmt::format("{:.17g} {:.17g} {:.17g} {:.17g} {}", f.a().real(), f.a().imag(), f.b().real(), f.b().imag(),
                       f.reverses_orientation() ? 1 : 0);
}

// Geodesic segment pq sampled for drawing.
std::vector<geo::Complex> arc(const geo::DiskPoint& p, const geo::DiskPoint& q, int samples = 32) {
    std::vector<geo::Complex> out;
    for (int k = 0; k <= samples; ++k)
        out.push_back(geo::geodesic_point(p, q, static_cast<double>(k) / samples).z());
    return out;
}

std::string svg_path(const std::vector<geo::Complex>& pts, bool closed) {
    std::string d;
    for (std::size_t i = 0; i < pts.size(); ++i)
        d += fmt::format("{}{:.3f},{:.3f} ", i == 0 ? 'M' : 'L', 500.0 * (1.0 + pts[i].real()),
                         500.0 * (1.0 - pts[i].imag()));
    if (closed)
        d += 'Z';
    else if (!d.empty())
        d.pop_back();
    return d;
}

} // namespace

void write_polygon(std::ostream& os, const geo::HyperbolicPolygon& p) {
    fmt::print(os, "model poincare-disk\nvertices {}\n", p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        fmt::print(os, "{:.17g} {:.17g} {}\n", p.vertex(i).x, p.vertex(i).y, geo::to_string(p.label(i)));
}

geo::SideLabel parse_label(const std::string& text) {
    if (text == "dirichlet")
        return geo::SideLabel::dirichlet();
    if (text == "neumann")
        return geo::SideLabel::neumann();
    if (text.starts_with("glue:") && text.size() > 5)
        return geo::SideLabel::glue(text.substr(5));
    throw ParseError(fmt::format("unknown side label '{}'", text));
}

geo::HyperbolicPolygon read_polygon(std::istream& is) {
    std::string raw;
    int line_no = 0;
    auto next = [&]() -> std::string {
        while (std::getline(is, raw)) {
            ++line_no;
            if (auto s = strip(raw); !s.empty())
                return s;
        }
        throw ParseError(fmt::format("line {}: unexpected end of input", line_no));
    };
    auto fail = [&](const std::string& what) { return ParseError(fmt::format("line {}: {}", line_no, what)); };

    std::istringstream head(next());
    std::string key, value;
    if (!(head >> key >> value) || key != "model")
        throw fail("expected 'model poincare-disk'");
    if (value != "poincare-disk")
        throw fail(fmt::format("unsupported model '{}'", value));
    std::istringstream count_line(next());
    long count = 0;
    std::string rest;
    if (!(count_line >> key >> count) || key != "vertices" || (count_line >> rest))
        throw fail("expected 'vertices <count>'");
    if (count < 3)
        throw fail(fmt::format("a polygon needs at least 3 vertices, got {}", count));

    std::vector<geo::DiskPoint> vertices;
    std::vector<geo::SideLabel> labels;
    for (long i = 0; i < count; ++i) {
        std::istringstream row(next());
        double x = 0.0, y = 0.0;
        std::string label;
        if (!(row >> x >> y >> label) || (row >> rest))
            throw fail("expected '<x> <y> <label>'");
        try {
            labels.push_back(parse_label(label));
        } catch (const ParseError& e) {
            throw fail(e.what());
        }
        vertices.push_back({x, y});
    }
    while (std::getline(is, raw)) {
        ++line_no;
        if (!strip(raw).empty())
            throw fail("unexpected content after the last vertex");
    }
    try {
        return geo::HyperbolicPolygon(std::move(vertices), std::move(labels));
    } catch (const std::exception& e) {
        throw ParseError(fmt::format("invalid polygon: {}", e.what()));
    }
}

void write_mesh(std::ostream& os, const mesh::TriMesh& m) {
    fmt::print(os, "NODES {}\n", m.nodes.size());
    for (const auto& p : m.nodes)
        fmt::print(os, "{:.17g} {:.17g}\n", p.x, p.y);
    fmt::print(os, "TRIANGLES {}\n", m.triangles.size());
    for (const auto& t : m.triangles)
        fmt::print(os, "{} {} {}\n", t[0], t[1], t[2]);
    fmt::print(os, "BOUNDARY {}\n", m.boundary_edges.size());
    for (const auto& e : m.boundary_edges)
        fmt::print(os, "{} {} {}\n", e.a, e.b, e.side);
    fmt::print(os, "CORNERS {}\n", m.corners.size());
    for (int c : m.corners)
        fmt::print(os, "{}\n", c);
}

void write_eigen_csv(std::ostream& os, const std::vector<EigenRow>& rows, double mesh_h, int dof_count) {
    fmt::print(os, "index,lambda,residual,mesh_h,dof_count\n");
    for (std::size_t i = 0; i < rows.size(); ++i)
        fmt::print(os, "{},{:.12g},{:.3e},{:.6g},{}\n", i, rows[i].lambda, rows[i].residual, mesh_h, dof_count);
}

void write_surface(std::ostream& os, const glue::GluedSurface& s, const std::string& polygon_name) {
    const auto t = s.topology();
    fmt::print(os, "euler_characteristic {}\nboundary_circles {}\norientable {}\n", t.euler_characteristic,
               t.boundary_circles, t.orientable ? "yes" : "no");
    fmt::print(os, "charts {}\n", s.charts().size());
    for (std::size_t c = 0; c < s.charts().size(); ++c) {
        const auto& chart = s.charts()[c];
        fmt::print(os, "chart {} polygon {} sign {} placement {}\n", c, polygon_name, chart.sign > 0 ? "+1" : "-1",
                   coefficients(chart.placement));
    }
    fmt::print(os, "pairings {}\n", s.pairings().size());
    for (const auto& p : s.pairings())
        fmt::print(os, "pairing {}:{} {}:{} {} {} map {}\n", p.a.chart, p.a.side, p.b.chart, p.b.side,
                   p.reversed ? "reversed" : "direct", glue::to_string(p.parity), coefficients(p.map));
}

void write_nodal(std::ostream& os, const nodal::NodalSet& ns) {
    for (std::size_t i = 0; i < ns.components.size(); ++i) {
        const auto& line = ns.components[i];
        fmt::print(os, "{}polyline {} {} {}\n", i == 0 ? "" : "\n", i, line.closed ? "closed" : "open",
                   line.points.size());
        for (const auto& p : line.points)
            fmt::print(os, "{:.17g} {:.17g}\n", p.x, p.y);
    }
    if (!ns.crossing_points.empty())
        fmt::print(os, "\n");
    for (const auto& c : ns.crossing_points)
        fmt::print(os, "crossing {:.17g} {:.17g} {:.17g} {}\n", c.point.x, c.point.y, c.angle,
                   c.transversal ? "transversal" : "tangential");
}

void write_svg(std::ostream& os, const SvgScene& scene) {
    fmt::print(os, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" viewBox=\"0 0 1000 1000\">\n");
    fmt::print(os, "<style>\n"
                   ".disk {{ fill: none; stroke: #444; stroke-width: 1.5; }}\n"
                   ".side {{ fill: #f4f1ea; stroke: #222; stroke-width: 2; }}\n"
                   ".mirror {{ fill: none; stroke: #2b6cb0; stroke-width: 1.5; stroke-dasharray: 8 6; }}\n"
                   ".nodal {{ fill: none; stroke: #c53030; stroke-width: 3; }}\n"
                   "</style>\n");
    fmt::print(os, "<circle class=\"disk\" cx=\"500\" cy=\"500\" r=\"500\"/>\n");
    for (const auto& p : scene.polygons) {
        std::vector<geo::Complex> pts;
        for (std::size_t s = 0; s < p.size(); ++s) {
            auto a = arc(p.side_start(s), p.side_end(s));
            pts.insert(pts.end(), a.begin(), a.end() - 1);
        }
        fmt::print(os, "<path class=\"side\" d=\"{}\"/>\n", svg_path(pts, true));
    }
    for (const auto& g : scene.mirrors) {
        const auto back = geo::standardize(g).inverse();
        std::vector<geo::Complex> pts;
        for (int k = -64; k <= 64; ++k)
            pts.push_back(back.apply(geo::Complex(std::tanh(4.0 * k / 64.0), 0.0)));
        pts.front() = g.from_point();
        pts.back() = g.to_point();
        fmt::print(os, "<path class=\"mirror\" d=\"{}\"/>\n", svg_path(pts, false));
    }
    for (const auto& line : scene.nodal_lines) {
        std::vector<geo::Complex> pts;
        for (const auto& p : line.points)
            pts.push_back(p.z());
        fmt::print(os, "<path class=\"nodal\" d=\"{}\"/>\n", svg_path(pts, line.closed));
    }
    fmt::print(os, "</svg>\n");
}

std::string bounds_row(const bounds::SurfaceTopology& t) {
    return fmt::format("{},{},{:.6f},{},{}", t.g, t.n, t.area(), bounds::pants_number(t),
                       bounds::nprime_upper_bound(t));
}

void write_bounds_csv(std::ostream& os, const std::vector<bounds::SurfaceTopology>& rows) {
    fmt::print(os, "g,n,area,pants_number,nprime_bound\n");
    for (const auto& t : rows)
        fmt::print(os, "{}\n", bounds_row(t));
}

bool AssertionLog::at_most(const std::string& name, double value, double tolerance) {
    return record(name, value, tolerance, value <= tolerance);
}

bool AssertionLog::record(const std::string& name, double value, double tolerance, bool passed) {
    entries_.push_back({name, value, tolerance, passed});
    return passed;
}

bool AssertionLog::all_passed() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const Entry& e) { return e.passed; });
}

void AssertionLog::write(std::ostream& os) const {
    fmt::print(os, "name,value,tolerance,result\n");
    for (const auto& e : entries_)
        fmt::print(os, "{},{:.6g},{:.6g},{}\n", e.name, e.value, e.tolerance, e.passed ? "pass" : "fail");
}

} // namespace hypnodal::io

#include "hypnodal/hypmesh.hpp"

#include "hypnodal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include <fmt/format.h>

namespace hypnodal::mesh {

namespace {

// Coarse fans are accepted when every angle they can approach under refinement
// is at least this wide; otherwise the polygon is cut into smaller loops.
constexpr double kGoodFan = 28.0 * geo::kPi / 180.0;
// A coarse candidate is taken as soon as its measured limiting angle reaches this (degrees).
constexpr double kGoodLimit = 24.0;

using Edge = std::pair<int, int>;

Edge key(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

double signed_area(const DiskPoint& a, const DiskPoint& b, const DiskPoint& c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double length(const DiskPoint& a, const DiskPoint& b) { return std::hypot(a.x - b.x, a.y - b.y); }

using geo::Complex;

Complex unit(Complex v) { return v / std::abs(v); }

// Counterclockwise angle from u to v in [0, 2pi).
double ccw_angle(Complex u, Complex v) {
    const double a = std::arg(v / u);
    return a < 0.0 ? a + 2.0 * geo::kPi : a;
}

// Unit tangent of a geodesic side at `at`, pointing toward `toward` along the side.
Complex side_tangent(const geo::Geodesic& g, Complex at, Complex toward) {
    const Complex chord = toward - at;
    if (g.is_diameter())
        return unit(chord);
    Complex t = unit((at - g.center()) * Complex(0.0, 1.0));
    if ((t * std::conj(chord)).real() < 0.0)
        t = -t;
    return t;
}

// A counterclockwise loop of mesh nodes. Edge k runs from node k to node k+1;
// `leave[k]` is its direction at node k and `arrive_back[k]` the direction from
// node k+1 back along it. Sides of the polygon are curved, cuts are straight.
struct Loop {
    std::vector<int> nodes;
    std::vector<Complex> leave, arrive_back;
    std::vector<int> side; // polygon side of each edge, -1 for a cut
};

struct Fan {
    Complex centre;
    double quality = -1.0;
};

// Smallest angle that the fan around c approaches under refinement: spokes
// against the true edge tangents at each loop node, and apex angles at c.
double fan_quality(const std::vector<DiskPoint>& pts, const Loop& l, Complex c) {
    const std::size_t n = l.nodes.size();
    double q = geo::kPi;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t prev = (k + n - 1) % n;
        const Complex v = pts[l.nodes[k]].z();
        const Complex w = pts[l.nodes[(k + 1) % n]].z();
        const Complex d = c - v;
        if (std::abs(d) < 1e-12)
            return -1.0;
        const double wedge = ccw_angle(l.leave[k], l.arrive_back[prev]);
        const double a1 = ccw_angle(l.leave[k], d);
        if (!(a1 < wedge))
            return -1.0;
        const double apex = ccw_angle(v - c, w - c);
        if (!(apex < geo::kPi))
            return -1.0;
        q = std::min({q, a1, wedge - a1, apex});
    }
    return q;
}

Fan best_fan(const std::vector<DiskPoint>& pts, const Loop& l) {
    const std::size_t n = l.nodes.size();
    Complex c{0.0, 0.0};
    for (int i : l.nodes)
        c += pts[i].z();
    c /= static_cast<double>(n);
    double reach = 0.0;
    for (int i : l.nodes)
        reach = std::max(reach, std::abs(pts[i].z() - c));
    Fan f{c, fan_quality(pts, l, c)};
    const Complex dirs[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (double step = 0.25 * reach; step > 1e-4 * reach;) {
        bool moved = false;
        for (const auto& d : dirs) {
            const Complex trial = f.centre + step * d;
            const double q = fan_quality(pts, l, trial);
            if (q > f.quality + 1e-6) {
                f = {trial, q};
                moved = true;
                break;
            }
        }
        if (!moved)
            step *= 0.5;
    }
    return f;
}

// Sub-loop from position i to position j (inclusive, cyclic), closed by a cut.
Loop sub_loop(const std::vector<DiskPoint>& pts, const Loop& l, std::size_t i, std::size_t j) {
    const std::size_t n = l.nodes.size();
    Loop out;
    for (std::size_t k = i; k != j; k = (k + 1) % n) {
        out.nodes.push_back(l.nodes[k]);
        out.leave.push_back(l.leave[k]);
        out.arrive_back.push_back(l.arrive_back[k]);
        out.side.push_back(l.side[k]);
    }
    out.nodes.push_back(l.nodes[j]);
    const Complex chord = pts[l.nodes[i]].z() - pts[l.nodes[j]].z();
    out.leave.push_back(unit(chord));
    out.arrive_back.push_back(unit(-chord));
    out.side.push_back(-1);
    return out;
}

// Returns the worst fan quality used.
double mesh_loop(TriMesh& m, const Loop& l) {
    const std::size_t n = l.nodes.size();
    Fan fan = best_fan(m.nodes, l);
    if (fan.quality < kGoodFan && n > 3) {
        double best = fan.quality;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1)
                    continue;
                const double q = std::min(best_fan(m.nodes, sub_loop(m.nodes, l, i, j)).quality,
                                          best_fan(m.nodes, sub_loop(m.nodes, l, j, i)).quality);
                if (q > best + 1e-9) {
                    best = q;
                    bi = i;
                    bj = j;
                }
            }
        if (bj != 0) {
            const double qa = mesh_loop(m, sub_loop(m.nodes, l, bi, bj));
            return std::min(qa, mesh_loop(m, sub_loop(m.nodes, l, bj, bi)));
        }
    }
    if (fan.quality <= 0.0)
        throw GeometryError("triangulate: no valid coarse triangulation found");
    const int c = static_cast<int>(m.nodes.size());
    m.nodes.push_back(DiskPoint::from(fan.centre));
    for (std::size_t k = 0; k < n; ++k)
        m.triangles.push_back({c, l.nodes[k], l.nodes[(k + 1) % n]});
    return fan.quality;
}

// Coarse mesh of a counterclockwise polygon whose side i is split into pieces[i]
// parts of equal hyperbolic length (a power of two, so side nodes stay dyadic).
TriMesh coarse_mesh(const geo::HyperbolicPolygon& p, const std::vector<int>& pieces, double& quality) {
    const int n = static_cast<int>(p.size());
    TriMesh m;
    Loop l;
    for (int i = 0; i < n; ++i) {
        const geo::Geodesic g = p.side_geodesic(i);
        const Complex a = p.side_start(i).z(), b = p.side_end(i).z();
        m.corners.push_back(static_cast<int>(m.nodes.size()));
        std::vector<Complex> pts{a};
        for (int k = 1; k < pieces[i]; ++k)
            pts.push_back(geo::geodesic_point(p.side_start(i), p.side_end(i), static_cast<double>(k) / pieces[i]).z());
        pts.push_back(b);
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            l.nodes.push_back(static_cast<int>(m.nodes.size()));
            m.nodes.push_back(DiskPoint::from(pts[k]));
            l.leave.push_back(side_tangent(g, pts[k], pts[k + 1]));
            l.arrive_back.push_back(side_tangent(g, pts[k + 1], pts[k]));
            l.side.push_back(i);
        }
    }
    const std::size_t nb = l.nodes.size();
    for (std::size_t k = 0; k < nb; ++k)
        m.boundary_edges.push_back({l.nodes[k], l.nodes[(k + 1) % nb], l.side[k]});
    quality = mesh_loop(m, l);
    return m;
}

// Minimum angle after three refinements, with the geometric tail of the drift
// added: boundary projection keeps shrinking angles by roughly half as much per level.
double limiting_min_angle(const TriMesh& coarse) {
    TriMesh m = coarse;
    double a[3];
    for (double& x : a) {
        m = refine(m);
        x = min_angle_degrees(m);
    }
    return std::min(a[2], a[2] - (a[1] - a[2]));
}

} // namespace

std::vector<int> TriMesh::side_nodes(int side) const {
    const int n = static_cast<int>(corners.size());
    if (side < 0 || side >= n)
        throw GeometryError(fmt::format("side_nodes: no side {}", side));
    std::map<int, int> next;
    for (const auto& e : boundary_edges)
        if (e.side == side)
            next[e.a] = e.b;
    std::vector<int> out{corners[side]};
    const int stop = corners[(side + 1) % n];
    while (out.back() != stop) {
        auto it = next.find(out.back());
        if (it == next.end() || out.size() > next.size() + 1)
            throw GeometryError(fmt::format("side_nodes: boundary chain of side {} is broken", side));
        out.push_back(it->second);
    }
    return out;
}

double max_edge_length(const TriMesh& m) {
    double h = 0.0;
    for (const auto& t : m.triangles)
        for (int k = 0; k < 3; ++k)
            h = std::max(h, length(m.nodes[t[k]], m.nodes[t[(k + 1) % 3]]));
    return h;
}

double min_angle_degrees(const TriMesh& m) {
    double best = 180.0;
    for (const auto& t : m.triangles) {
        for (int k = 0; k < 3; ++k) {
            const auto& p = m.nodes[t[k]];
            const auto& q = m.nodes[t[(k + 1) % 3]];
            const auto& r = m.nodes[t[(k + 2) % 3]];
            const double ux = q.x - p.x, uy = q.y - p.y, vx = r.x - p.x, vy = r.y - p.y;
            const double ang = std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
            best = std::min(best, ang * 180.0 / geo::kPi);
        }
    }
    return best;
}

void check_mesh(const TriMesh& m) {
    std::map<Edge, int> uses;
    for (std::size_t i = 0; i < m.triangles.size(); ++i) {
        const auto& t = m.triangles[i];
        const double a = signed_area(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]);
        if (!(a > 0.0))
            throw GeometryError(fmt::format("triangle {} is inverted or degenerate (area {})", i, a));
        for (int k = 0; k < 3; ++k)
            ++uses[key(t[k], t[(k + 1) % 3])];
    }
    std::size_t single = 0;
    for (const auto& [e, count] : uses) {
        if (count > 2)
            throw GeometryError(fmt::format("edge ({}, {}) is shared by {} triangles", e.first, e.second, count));
        if (count == 1)
            ++single;
    }
    if (single != m.boundary_edges.size())
        throw GeometryError("boundary edge list does not match the mesh boundary");
    for (const auto& e : m.boundary_edges) {
        auto it = uses.find(key(e.a, e.b));
        if (it == uses.end() || it->second != 1)
            throw GeometryError(fmt::format("({}, {}) is not a boundary edge", e.a, e.b));
        if (e.side < 0 || e.side >= static_cast<int>(m.corners.size()))
            throw GeometryError(fmt::format("boundary edge refers to unknown side {}", e.side));
    }
}

TriMesh triangulate(const geo::HyperbolicPolygon& p, double h_target) {
    if (!(h_target > 0.0))
        throw DomainError("triangulate: h_target must be positive");
    if (!p.is_simple())
        throw GeometryError("triangulate: polygon is not simple");

    // Work on a counterclockwise copy and mirror back if needed.
    const bool ccw = p.orientation() > 0;
    const geo::HyperbolicPolygon q = ccw ? p : p.transformed(geo::Isometry::conjugation());
    // Candidates: the plain vertex fan, all sides halved, and long sides split
    // to about the length of the shortest one. Piece counts depend on hyperbolic
    // lengths only, so sides of equal length always carry the same nodes.
    const int n = static_cast<int>(q.size());
    double shortest = 1e300;
    for (int i = 0; i < n; ++i)
        shortest = std::min(shortest, q.side_length(i));
    std::vector<int> adaptive(n, 1);
    for (int i = 0; i < n; ++i)
        while (adaptive[i] < 16 && q.side_length(i) / adaptive[i] > 1.5 * shortest)
            adaptive[i] *= 2;
    TriMesh m;
    double best = -1.0;
    for (const auto& pieces : {std::vector<int>(n, 1), std::vector<int>(n, 2), adaptive}) {
        double fan = 0.0;
        TriMesh trial;
        try {
            trial = coarse_mesh(q, pieces, fan);
        } catch (const GeometryError&) {
            continue;
        }
        const double limit = limiting_min_angle(trial);
        if (limit > best) {
            best = limit;
            m = std::move(trial);
        }
        if (best >= kGoodLimit)
            break;
    }
    if (best < 0.0)
        throw GeometryError("triangulate: no valid coarse triangulation found");
    if (!ccw)
        m = transport_mesh(m, geo::Isometry::conjugation());
    m.h = max_edge_length(m);
    check_mesh(m);
    while (m.h > h_target) {
        m = refine(m);
    }
    return m;
}

TriMesh refine(const TriMesh& m) {
    TriMesh out;
    out.nodes = m.nodes;
    out.corners = m.corners;
    out.triangles.reserve(4 * m.triangles.size());
    out.boundary_edges.reserve(2 * m.boundary_edges.size());

    std::map<Edge, int> on_boundary;
    for (const auto& e : m.boundary_edges)
        on_boundary[key(e.a, e.b)] = e.side;

    std::map<Edge, int> midpoint;
    auto mid = [&](int a, int b) {
        const Edge k = key(a, b);
        auto it = midpoint.find(k);
        if (it != midpoint.end())
            return it->second;
        const auto& p = m.nodes[k.first];
        const auto& q = m.nodes[k.second];
        const DiskPoint x = on_boundary.count(k) ? geo::hyperbolic_midpoint(p, q)
                                                 : DiskPoint{0.5 * (p.x + q.x), 0.5 * (p.y + q.y)};
        const int idx = static_cast<int>(out.nodes.size());
        out.nodes.push_back(x);
        midpoint.emplace(k, idx);
        return idx;
    };

    for (const auto& t : m.triangles) {
        const int ab = mid(t[0], t[1]);
        const int bc = mid(t[1], t[2]);
        const int ca = mid(t[2], t[0]);
        out.triangles.push_back({t[0], ab, ca});
        out.triangles.push_back({ab, t[1], bc});
        out.triangles.push_back({ca, bc, t[2]});
        out.triangles.push_back({ab, bc, ca});
    }
    for (const auto& e : m.boundary_edges) {
        const int x = midpoint.at(key(e.a, e.b));
        out.boundary_edges.push_back({e.a, x, e.side});
        out.boundary_edges.push_back({x, e.b, e.side});
    }
    out.h = max_edge_length(out);
    return out;
}

TriMesh transport_mesh(const TriMesh& m, const geo::Isometry& g) {
    TriMesh out = m;
    for (auto& p : out.nodes)
        p = g.apply(p);
    if (g.reverses_orientation())
        for (auto& t : out.triangles)
            std::swap(t[1], t[2]);
    out.h = max_edge_length(out);
    return out;
}

} // namespace hypnodal::mesh

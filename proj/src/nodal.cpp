#include "hypnodal/nodal.hpp"

#include "hypnodal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include <fmt/format.h>

namespace hypnodal::nodal {

namespace {

using geo::Complex;

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }
double dot(Complex a, Complex b) { return a.real() * b.real() + a.imag() * b.imag(); }

// Angle in [0, pi/2] between the lines spanned by a and b.
double line_angle(Complex a, Complex b) {
    const double c = std::abs(dot(a, b)) / (std::abs(a) * std::abs(b));
    return std::acos(std::min(1.0, c));
}

// Crossing angle at a point where several zero segments leave in the given
// directions: the straightest pair forms one line, the rest the other.
double branch_angle(const std::vector<Complex>& dirs) {
    std::size_t bi = 0, bj = 1;
    double best = 2.0;
    for (std::size_t i = 0; i < dirs.size(); ++i)
        for (std::size_t j = i + 1; j < dirs.size(); ++j)
            if (const double d = dot(dirs[i], dirs[j]); d < best) {
                best = d;
                bi = i;
                bj = j;
            }
    const Complex first = dirs[bi] - dirs[bj];
    std::vector<Complex> rest;
    for (std::size_t k = 0; k < dirs.size(); ++k)
        if (k != bi && k != bj)
            rest.push_back(dirs[k]);
    Complex second = rest.front();
    best = 2.0;
    for (std::size_t i = 0; i < rest.size(); ++i)
        for (std::size_t j = i + 1; j < rest.size(); ++j)
            if (const double d = dot(rest[i], rest[j]); d < best) {
                best = d;
                second = rest[i] - rest[j];
            }
    return line_angle(first, second);
}

Complex unit(Complex z) { return z / std::abs(z); }

} // namespace

NodalSet extract_nodal(const mesh::TriMesh& m, const fem::Vector& u, double zero_tol, double angle_tol) {
    if (u.size() != static_cast<Eigen::Index>(m.nodes.size()))
        throw DimensionError(fmt::format("extract_nodal: {} values for {} nodes", u.size(), m.nodes.size()));
    const double scale = u.size() ? u.cwiseAbs().maxCoeff() : 0.0;
    if (scale == 0.0)
        throw DegenerateInputError("extract_nodal: function is identically zero");
    auto sign = [&](int i) { return std::abs(u[i]) <= zero_tol * scale ? 0 : (u[i] > 0 ? 1 : -1); };

    // Zero points: a zero node i is keyed (i, -1), a sign change on edge a < b is keyed (a, b).
    std::map<std::pair<int, int>, int> point_id;
    std::vector<geo::DiskPoint> points;
    auto point = [&](int a, int b) {
        if (b >= 0 && a > b)
            std::swap(a, b);
        const auto [it, inserted] = point_id.try_emplace({a, b}, static_cast<int>(points.size()));
        if (inserted) {
            if (b < 0) {
                points.push_back(m.nodes[a]);
            } else {
                const double t = u[a] / (u[a] - u[b]);
                points.push_back(geo::DiskPoint::from(m.nodes[a].z() + t * (m.nodes[b].z() - m.nodes[a].z())));
            }
        }
        return it->second;
    };

    std::vector<std::pair<int, int>> segments;
    std::map<std::pair<int, int>, std::vector<int>> zero_edges; // edge -> signs of the opposite vertices
    for (const auto& t : m.triangles) {
        std::vector<int> zero_points;
        int zeros = 0;
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3], c = t[(k + 2) % 3];
            const int sa = sign(a), sb = sign(b);
            if (sa == 0) {
                ++zeros;
                zero_points.push_back(point(a, -1));
            }
            if (sa * sb < 0)
                zero_points.push_back(point(a, b));
            if (sa == 0 && sb == 0)
                zero_edges[std::minmax(a, b)].push_back(sign(c));
        }
        if (zeros < 2 && zero_points.size() == 2)
            segments.emplace_back(zero_points[0], zero_points[1]);
    }
    for (const auto& [e, opposite] : zero_edges)
        if (opposite.size() == 1 || opposite[0] * opposite[1] <= 0)
            segments.emplace_back(point(e.first, -1), point(e.second, -1));

    const std::size_t np = points.size();
    std::vector<std::vector<int>> incident(np);
    for (std::size_t s = 0; s < segments.size(); ++s) {
        incident[segments[s].first].push_back(static_cast<int>(s));
        incident[segments[s].second].push_back(static_cast<int>(s));
    }
    auto other = [&](int s, int p) { return segments[s].first == p ? segments[s].second : segments[s].first; };

    NodalSet out;
    std::vector<bool> used(segments.size(), false);
    auto walk = [&](int start, int seg) {
        Polyline line;
        line.points.push_back(points[start]);
        int at = start;
        for (;;) {
            used[seg] = true;
            at = other(seg, at);
            if (at == start) {
                line.closed = true;
                break;
            }
            line.points.push_back(points[at]);
            if (incident[at].size() != 2)
                break;
            seg = incident[at][0] == seg ? incident[at][1] : incident[at][0];
            if (used[seg])
                break;
        }
        out.components.push_back(std::move(line));
    };
    for (std::size_t p = 0; p < np; ++p) {
        if (incident[p].size() == 2)
            continue;
        for (int s : incident[p])
            if (!used[s])
                walk(static_cast<int>(p), s);
        if (incident[p].size() > 2) {
            std::vector<Complex> dirs;
            for (int s : incident[p])
                dirs.push_back(unit(points[other(s, static_cast<int>(p))].z() - points[p].z()));
            const double angle = branch_angle(dirs);
            out.crossing_points.push_back({points[p], angle, angle >= angle_tol});
        }
    }
    for (std::size_t s = 0; s < segments.size(); ++s)
        if (!used[s])
            walk(segments[s].first, static_cast<int>(s));
    return out;
}

NodalSet maximal_components(const NodalSet& ns, double max_bend) {
    const auto& lines = ns.components;
    const std::size_t n = lines.size();
    // End 2i is the start of polyline i, end 2i + 1 its finish.
    auto end_point = [&](int e) { return e % 2 == 0 ? lines[e / 2].points.front() : lines[e / 2].points.back(); };
    auto end_dir = [&](int e) {
        const auto& p = lines[e / 2].points;
        return e % 2 == 0 ? unit(p[1].z() - p[0].z()) : unit(p[p.size() - 2].z() - p.back().z());
    };
    std::vector<int> link(2 * n, -1);
    for (const auto& c : ns.crossing_points) {
        std::vector<int> ends;
        for (std::size_t i = 0; i < n; ++i)
            if (!lines[i].closed && lines[i].points.size() >= 2)
                for (int e : {static_cast<int>(2 * i), static_cast<int>(2 * i + 1)})
                    if (std::abs(end_point(e).z() - c.point.z()) < 1e-12)
                        ends.push_back(e);
        for (;;) {
            int bi = -1, bj = -1;
            double best = -std::cos(max_bend);
            for (std::size_t i = 0; i < ends.size(); ++i)
                for (std::size_t j = i + 1; j < ends.size(); ++j)
                    if (link[ends[i]] < 0 && link[ends[j]] < 0 && ends[i] / 2 != ends[j] / 2)
                        if (const double d = dot(end_dir(ends[i]), end_dir(ends[j])); d < best) {
                            best = d;
                            bi = ends[i];
                            bj = ends[j];
                        }
            if (bi < 0)
                break;
            link[bi] = bj;
            link[bj] = bi;
        }
    }

    NodalSet out;
    out.crossing_points = ns.crossing_points;
    std::vector<bool> visited(n, false);
    auto chain = [&](int enter) {
        Polyline line;
        const int first = enter / 2;
        for (;;) {
            const int i = enter / 2;
            visited[i] = true;
            auto pts = lines[i].points;
            if (enter % 2 == 1)
                std::reverse(pts.begin(), pts.end());
            line.points.insert(line.points.end(), pts.begin() + (line.points.empty() ? 0 : 1), pts.end());
            const int exit = enter ^ 1;
            if (link[exit] < 0)
                break;
            enter = link[exit];
            if (enter / 2 == first) {
                line.closed = true;
                line.points.pop_back();
                break;
            }
        }
        out.components.push_back(std::move(line));
    };
    for (std::size_t i = 0; i < n; ++i)
        if (lines[i].closed || lines[i].points.size() < 2) {
            visited[i] = true;
            out.components.push_back(lines[i]);
        }
    for (std::size_t e = 0; e < 2 * n; ++e)
        if (!visited[e / 2] && link[e] < 0)
            chain(static_cast<int>(e));
    for (std::size_t i = 0; i < n; ++i)
        if (!visited[i])
            chain(static_cast<int>(2 * i));
    return out;
}

double distance_to_geodesic(const geo::DiskPoint& p, const geo::Geodesic& g) {
    const Complex w = geo::standardize(g).apply(p.z());
    return std::asinh(2.0 * std::abs(w.imag()) / (1.0 - std::norm(w)));
}

double geodesic_deviation(const Polyline& poly, const geo::Geodesic& g) {
    if (poly.points.empty())
        throw DegenerateInputError("geodesic_deviation: empty polyline");
    double worst = 0.0;
    for (const auto& p : poly.points)
        worst = std::max(worst, distance_to_geodesic(p, g));
    return worst;
}

std::vector<Crossing> self_intersections(const NodalSet& ns, double angle_tol, double merge_tol) {
    struct Segment {
        std::size_t line;
        std::size_t index;
        Complex a;
        Complex b;
    };
    std::vector<Segment> segs;
    for (std::size_t l = 0; l < ns.components.size(); ++l) {
        const auto& p = ns.components[l].points;
        const std::size_t count = ns.components[l].closed ? p.size() : p.size() - 1;
        for (std::size_t i = 0; i < count && p.size() >= 2; ++i)
            segs.push_back({l, i, p[i].z(), p[(i + 1) % p.size()].z()});
    }
    auto neighbours = [&](const Segment& s, const Segment& t) {
        if (s.line != t.line)
            return false;
        const std::size_t gap = s.index > t.index ? s.index - t.index : t.index - s.index;
        const auto& line = ns.components[s.line];
        return gap <= 1 || (line.closed && gap == line.points.size() - 1);
    };

    std::vector<Crossing> out;
    for (std::size_t i = 0; i < segs.size(); ++i)
        for (std::size_t j = i + 1; j < segs.size(); ++j) {
            const Segment& s = segs[i];
            const Segment& t = segs[j];
            if (neighbours(s, t))
                continue;
            const Complex d1 = s.b - s.a, d2 = t.b - t.a;
            const double denom = cross(d1, d2);
            if (std::abs(denom) <= 1e-14 * std::abs(d1) * std::abs(d2))
                continue;
            const double eps = 1e-12;
            const double x = cross(t.a - s.a, d2) / denom;
            const double y = cross(t.a - s.a, d1) / denom;
            if (x < -eps || x > 1 + eps || y < -eps || y > 1 + eps)
                continue;
            const Complex hit = s.a + x * d1;
            const double angle = line_angle(d1, d2);
            auto same = std::find_if(out.begin(), out.end(),
                                     [&](const Crossing& c) { return std::abs(c.point.z() - hit) <= merge_tol; });
            if (same == out.end()) {
                out.push_back({geo::DiskPoint::from(hit), angle, angle >= angle_tol});
            } else if (angle > same->angle) {
                same->angle = angle;
                same->transversal = angle >= angle_tol;
            }
        }
    return out;
}

std::optional<double> interpolate(const mesh::TriMesh& m, const fem::Vector& u, const geo::DiskPoint& p) {
    const Complex z = p.z();
    for (const auto& t : m.triangles) {
        const Complex a = m.nodes[t[0]].z(), b = m.nodes[t[1]].z(), c = m.nodes[t[2]].z();
        const double area = cross(b - a, c - a);
        const double wa = cross(b - z, c - z) / area;
        const double wb = cross(c - z, a - z) / area;
        const double wc = 1.0 - wa - wb;
        if (std::min({wa, wb, wc}) >= -1e-12)
            return wa * u[t[0]] + wb * u[t[1]] + wc * u[t[2]];
    }
    return std::nullopt;
}

} // namespace hypnodal::nodal

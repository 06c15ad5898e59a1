#include "hypnodal/surfglue.hpp"

#include "hypnodal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include <fmt/format.h>

namespace hypnodal::glue {

namespace {

struct DisjointSets {
    std::vector<int> parent;

    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    int find(int x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    }
    // The smaller root survives, so class representatives do not depend on union order.
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b)
            parent[std::max(a, b)] = std::min(a, b);
    }
    // Consecutive labels in order of first appearance.
    std::vector<int> labels() {
        std::vector<int> root_label(parent.size(), -1), out(parent.size());
        int next = 0;
        for (std::size_t i = 0; i < parent.size(); ++i) {
            const int r = find(static_cast<int>(i));
            if (root_label[r] < 0)
                root_label[r] = next++;
            out[i] = root_label[r];
        }
        return out;
    }
};

double distance(const geo::DiskPoint& a, const geo::DiskPoint& b) { return std::abs(a.z() - b.z()); }

// Values along a polygon side as a function of the arclength fraction t.
struct SideTrace {
    std::vector<double> t;
    std::vector<double> value;

    double at(double s) const {
        auto it = std::upper_bound(t.begin(), t.end(), s);
        if (it == t.begin())
            return value.front();
        if (it == t.end())
            return value.back();
        const std::size_t k = static_cast<std::size_t>(it - t.begin());
        const double w = (s - t[k - 1]) / (t[k] - t[k - 1]);
        return (1.0 - w) * value[k - 1] + w * value[k];
    }
};

SideTrace side_trace(const ChartFunction& f, int side) {
    const auto nodes = f.mesh.side_nodes(side);
    const geo::DiskPoint start = f.polygon.side_start(side);
    const double len = f.polygon.side_length(side);
    SideTrace tr;
    for (int i : nodes) {
        tr.t.push_back(geo::hyp_distance(start, f.mesh.nodes[i]) / len);
        tr.value.push_back(f.values[i]);
    }
    return tr;
}

} // namespace

std::string to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

int GluedSurface::add_chart(Chart c) {
    charts_.push_back(std::move(c));
    return static_cast<int>(charts_.size()) - 1;
}

std::optional<std::size_t> GluedSurface::pairing_of(SideRef s) const {
    for (std::size_t i = 0; i < pairings_.size(); ++i)
        if (pairings_[i].a == s || pairings_[i].b == s)
            return i;
    return std::nullopt;
}

void GluedSurface::add_pairing(SideRef a, SideRef b, bool reversed, Parity parity, double tol) {
    for (const SideRef& s : {a, b}) {
        if (s.chart < 0 || s.chart >= static_cast<int>(charts_.size()))
            throw GluingError(fmt::format("pairing refers to unknown chart {}", s.chart));
        if (s.side < 0 || s.side >= static_cast<int>(charts_[s.chart].polygon.size()))
            throw GluingError(fmt::format("pairing refers to unknown side {} of chart {}", s.side, s.chart));
        if (pairing_of(s))
            throw GluingError(fmt::format("side {} of chart {} is already paired", s.side, s.chart));
    }
    if (a == b)
        throw GluingError(fmt::format("side {} of chart {} cannot be paired with itself", a.side, a.chart));

    const geo::HyperbolicPolygon pa = charts_[a.chart].placed();
    const geo::HyperbolicPolygon pb = charts_[b.chart].placed();
    const geo::DiskPoint p0 = pa.side_start(a.side), p1 = pa.side_end(a.side);
    geo::DiskPoint q0 = pb.side_start(b.side), q1 = pb.side_end(b.side);
    if (reversed)
        std::swap(q0, q1);
    const double la = geo::hyp_distance(p0, p1), lb = geo::hyp_distance(q0, q1);
    if (std::abs(la - lb) > tol * std::max(1.0, la))
        throw GluingError(fmt::format("sides of lengths {} and {} cannot be paired", la, lb));
    const geo::Isometry map = geo::matching_isometry(p0, p1, q0, q1, tol);
    if (distance(map.apply(p0), q0) > tol || distance(map.apply(p1), q1) > tol)
        throw GluingError("pairing isometry does not match the side endpoints");
    pairings_.push_back({a, b, reversed, map, parity});
}

std::vector<std::vector<int>> GluedSurface::vertex_classes() const {
    std::vector<int> offset;
    int total = 0;
    for (const auto& c : charts_) {
        offset.push_back(total);
        total += static_cast<int>(c.polygon.size());
    }
    DisjointSets sets(static_cast<std::size_t>(total));
    auto corner = [&](int chart, int v) {
        const int n = static_cast<int>(charts_[chart].polygon.size());
        return offset[chart] + (v % n);
    };
    for (const auto& p : pairings_) {
        const int a0 = corner(p.a.chart, p.a.side), a1 = corner(p.a.chart, p.a.side + 1);
        const int b0 = corner(p.b.chart, p.b.side), b1 = corner(p.b.chart, p.b.side + 1);
        sets.unite(a0, p.reversed ? b1 : b0);
        sets.unite(a1, p.reversed ? b0 : b1);
    }
    const std::vector<int> label = sets.labels();
    std::vector<std::vector<int>> out;
    for (std::size_t c = 0; c < charts_.size(); ++c)
        out.emplace_back(label.begin() + offset[c], label.begin() + offset[c] + charts_[c].polygon.size());
    return out;
}

std::vector<std::vector<SideRef>> GluedSurface::curves(const std::vector<SideRef>& sides) const {
    const auto cls = vertex_classes();
    auto ends = [&](const SideRef& s) {
        const int n = static_cast<int>(charts_[s.chart].polygon.size());
        return std::pair{cls[s.chart][s.side], cls[s.chart][(s.side + 1) % n]};
    };
    std::vector<bool> used(sides.size(), false);
    std::vector<std::vector<SideRef>> out;
    for (std::size_t i = 0; i < sides.size(); ++i) {
        if (used[i])
            continue;
        used[i] = true;
        std::vector<SideRef> curve{sides[i]};
        int at = ends(sides[i]).second;
        for (;;) {
            std::size_t next = sides.size();
            for (std::size_t j = 0; j < sides.size() && next == sides.size(); ++j)
                if (!used[j] && (ends(sides[j]).first == at || ends(sides[j]).second == at))
                    next = j;
            if (next == sides.size())
                break;
            used[next] = true;
            curve.push_back(sides[next]);
            const auto [s, e] = ends(sides[next]);
            at = s == at ? e : s;
        }
        out.push_back(std::move(curve));
    }
    return out;
}

std::vector<std::vector<SideRef>> GluedSurface::boundary_circles() const {
    std::vector<SideRef> free;
    for (std::size_t c = 0; c < charts_.size(); ++c)
        for (std::size_t s = 0; s < charts_[c].polygon.size(); ++s) {
            const SideRef ref{static_cast<int>(c), static_cast<int>(s)};
            if (!pairing_of(ref))
                free.push_back(ref);
        }
    return curves(free);
}

std::vector<std::vector<SideRef>> GluedSurface::odd_curves() const {
    std::vector<SideRef> sides;
    for (const auto& p : pairings_)
        if (p.parity == Parity::Odd)
            sides.push_back(p.a);
    return curves(sides);
}

Topology GluedSurface::topology() const {
    Topology t;
    const auto cls = vertex_classes();
    int vertices = 0, sides = 0;
    for (const auto& row : cls) {
        sides += static_cast<int>(row.size());
        for (int v : row)
            vertices = std::max(vertices, v + 1);
    }
    const int edges = sides - static_cast<int>(pairings_.size());
    t.euler_characteristic = vertices - edges + static_cast<int>(charts_.size());
    t.boundary_circles = static_cast<int>(boundary_circles().size());

    // Chart orientations o in {+1, -1}: a pairing that keeps the direction of
    // the side forces opposite orientations, a reversing one equal orientations.
    std::vector<int> o(charts_.size(), 0);
    for (std::size_t root = 0; root < charts_.size() && t.orientable; ++root) {
        if (o[root] != 0)
            continue;
        o[root] = 1;
        std::vector<int> stack{static_cast<int>(root)};
        while (!stack.empty() && t.orientable) {
            const int c = stack.back();
            stack.pop_back();
            for (const auto& p : pairings_) {
                if (p.a.chart != c && p.b.chart != c)
                    continue;
                const int other = p.a.chart == c ? p.b.chart : p.a.chart;
                const int want = p.reversed ? o[c] : -o[c];
                if (o[other] == 0) {
                    o[other] = want;
                    stack.push_back(other);
                } else if (o[other] != want) {
                    t.orientable = false;
                }
            }
        }
    }
    return t;
}

fem::Vector GlobalSystem::gather(const std::vector<fem::Vector>& per_chart) const {
    if (per_chart.size() != node_class.size())
        throw DimensionError("gather: one vector per chart required");
    fem::Vector out = fem::Vector::Zero(dof_count);
    std::vector<bool> set(static_cast<std::size_t>(dof_count), false);
    for (std::size_t c = 0; c < node_class.size(); ++c) {
        if (per_chart[c].size() != static_cast<Eigen::Index>(node_class[c].size()))
            throw DimensionError(fmt::format("gather: chart {} vector has the wrong length", c));
        for (std::size_t i = 0; i < node_class[c].size(); ++i) {
            const int d = dof[node_class[c][i]];
            if (d >= 0 && !set[d]) {
                out[d] = per_chart[c][static_cast<Eigen::Index>(i)];
                set[d] = true;
            }
        }
    }
    return out;
}

std::vector<fem::Vector> GlobalSystem::scatter(const fem::Vector& free_values) const {
    if (free_values.size() != dof_count)
        throw DimensionError("scatter: vector does not match the number of free nodes");
    std::vector<fem::Vector> out;
    for (const auto& row : node_class) {
        fem::Vector v = fem::Vector::Zero(static_cast<Eigen::Index>(row.size()));
        for (std::size_t i = 0; i < row.size(); ++i)
            if (dof[row[i]] >= 0)
                v[static_cast<Eigen::Index>(i)] = free_values[dof[row[i]]];
        out.push_back(std::move(v));
    }
    return out;
}

double GlobalSystem::mismatch(const std::vector<fem::Vector>& per_chart) const {
    const fem::Vector first = gather(per_chart);
    double worst = 0.0;
    for (std::size_t c = 0; c < node_class.size(); ++c)
        for (std::size_t i = 0; i < node_class[c].size(); ++i) {
            const int d = dof[node_class[c][i]];
            if (d >= 0)
                worst = std::max(worst, std::abs(per_chart[c][static_cast<Eigen::Index>(i)] - first[d]));
        }
    return worst;
}

GlobalSystem assemble_glued(const GluedSurface& s, const mesh::TriMesh& base, double tol) {
    GlobalSystem sys;
    const auto& charts = s.charts();
    if (charts.empty())
        throw EmptySystemError("assemble_glued: surface has no charts");
    std::vector<int> offset;
    int total = 0;
    for (const auto& c : charts) {
        if (c.polygon.size() != base.side_count())
            throw DimensionError("assemble_glued: base mesh and chart polygon have different side counts");
        sys.chart_meshes.push_back(mesh::transport_mesh(base, c.placement));
        offset.push_back(total);
        total += static_cast<int>(base.nodes.size());
    }

    DisjointSets sets(static_cast<std::size_t>(total));
    std::vector<bool> pinned(static_cast<std::size_t>(total), false);
    std::vector<std::string> offenders;
    for (const auto& p : s.pairings()) {
        const auto& ma = sys.chart_meshes[p.a.chart];
        const auto& mb = sys.chart_meshes[p.b.chart];
        const auto na = ma.side_nodes(p.a.side);
        const auto nb = mb.side_nodes(p.b.side);
        if (na.size() != nb.size())
            throw GluingError(fmt::format("side {} of chart {} has {} nodes but side {} of chart {} has {}", p.a.side,
                                          p.a.chart, na.size(), p.b.side, p.b.chart, nb.size()));
        const std::size_t n = na.size();
        for (std::size_t k = 0; k < n; ++k) {
            const int i = na[k];
            const int j = nb[p.reversed ? n - 1 - k : k];
            const double gap = distance(p.map.apply(ma.nodes[i]), mb.nodes[j]);
            if (gap > tol) {
                if (offenders.size() < 10)
                    offenders.push_back(fmt::format("chart {} node {} -> chart {} node {} (off by {:.3g})", p.a.chart,
                                                    i, p.b.chart, j, gap));
                continue;
            }
            sets.unite(offset[p.a.chart] + i, offset[p.b.chart] + j);
            if (p.parity == Parity::Odd)
                pinned[offset[p.a.chart] + i] = true;
        }
    }
    if (!offenders.empty()) {
        std::string list;
        for (const auto& o : offenders)
            list += "\n  " + o;
        throw GluingError("assemble_glued: pairings do not map boundary nodes onto boundary nodes:" + list);
    }
    for (std::size_t c = 0; c < charts.size(); ++c)
        for (std::size_t side = 0; side < charts[c].polygon.size(); ++side) {
            const SideRef ref{static_cast<int>(c), static_cast<int>(side)};
            if (s.pairing_of(ref))
                continue;
            const auto kind = charts[c].polygon.label(side).kind;
            if (kind == geo::SideLabel::Kind::Glue)
                throw GluingError(fmt::format("side {} of chart {} is labelled {} but not paired", side, c,
                                              geo::to_string(charts[c].polygon.label(side))));
            if (kind == geo::SideLabel::Kind::Dirichlet)
                for (int i : sys.chart_meshes[c].side_nodes(static_cast<int>(side)))
                    pinned[offset[c] + i] = true;
        }

    const std::vector<int> label = sets.labels();
    const int classes = label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
    sys.constrained.assign(static_cast<std::size_t>(classes), false);
    for (int g = 0; g < total; ++g)
        if (pinned[g])
            sys.constrained[label[g]] = true;
    sys.dof.assign(static_cast<std::size_t>(classes), -1);
    for (int k = 0; k < classes; ++k)
        if (!sys.constrained[k])
            sys.dof[k] = sys.dof_count++;
    for (std::size_t c = 0; c < charts.size(); ++c)
        sys.node_class.emplace_back(label.begin() + offset[c], label.begin() + offset[c] + base.nodes.size());
    if (sys.dof_count == 0)
        throw EmptySystemError("assemble_glued: every node is constrained");

    std::vector<Eigen::Triplet<double>> kt, mt;
    for (std::size_t c = 0; c < charts.size(); ++c) {
        const auto Kc = fem::assemble_stiffness(sys.chart_meshes[c]);
        const auto Mc = fem::assemble_mass(sys.chart_meshes[c]);
        for (auto [src, dst] : {std::pair{&Kc, &kt}, std::pair{&Mc, &mt}}) {
            const auto& A = src->matrix();
            for (int col = 0; col < A.outerSize(); ++col)
                for (fem::SparseMatrix::InnerIterator it(A, col); it; ++it) {
                    const int r = sys.dof[sys.node_class[c][it.row()]];
                    const int q = sys.dof[sys.node_class[c][it.col()]];
                    if (r >= 0 && q >= 0)
                        dst->emplace_back(r, q, it.value());
                }
        }
    }
    sys.K = fem::SymmetricSparseMatrix(sys.dof_count, kt);
    sys.M = fem::SymmetricSparseMatrix(sys.dof_count, mt);
    return sys;
}

fem::Vector ExtendedSolution::chart_values(int chart) const {
    return static_cast<double>(surface.charts().at(static_cast<std::size_t>(chart)).sign) * base_values;
}

std::vector<fem::Vector> ExtendedSolution::all_chart_values() const {
    std::vector<fem::Vector> out;
    for (std::size_t c = 0; c < surface.charts().size(); ++c)
        out.push_back(chart_values(static_cast<int>(c)));
    return out;
}

ExtendedSolution single_chart(const geo::HyperbolicPolygon& p, const mesh::TriMesh& m, const fem::Vector& values,
                              double lambda) {
    if (values.size() != static_cast<Eigen::Index>(m.nodes.size()))
        throw DimensionError("single_chart: one value per mesh node required");
    if (p.size() != m.side_count())
        throw DimensionError("single_chart: mesh and polygon have different side counts");
    ExtendedSolution out;
    out.surface.add_chart({p, geo::Isometry::identity(), 1});
    out.base_mesh = m;
    out.base_values = values;
    out.lambda = lambda;
    return out;
}

ExtendedSolution schwarz_extend(const ExtendedSolution& sol, const geo::Geodesic& mirror, Parity parity) {
    const auto& charts = sol.surface.charts();
    const int n = static_cast<int>(charts.size());
    std::vector<SideRef> on_mirror;
    for (int c = 0; c < n; ++c) {
        const auto placed = charts[c].placed();
        for (int s = 0; s < static_cast<int>(placed.size()); ++s) {
            const SideRef ref{c, s};
            if (sol.surface.pairing_of(ref))
                continue;
            const auto a = placed.side_start(s), b = placed.side_end(s);
            if (mirror.contains(a) && mirror.contains(b) && mirror.contains(geo::hyperbolic_midpoint(a, b)))
                on_mirror.push_back(ref);
        }
    }
    if (on_mirror.empty())
        throw GeometryError("schwarz_extend: no free side lies on the mirror");
    const auto needed = parity == Parity::Odd ? geo::SideLabel::Kind::Dirichlet : geo::SideLabel::Kind::Neumann;
    for (const auto& r : on_mirror) {
        const auto& label = charts[r.chart].polygon.label(r.side);
        if (label.kind != needed)
            throw ConsistencyError(fmt::format("schwarz_extend: {} extension across side {} of chart {} labelled {}",
                                               to_string(parity), r.side, r.chart, geo::to_string(label)));
    }

    ExtendedSolution out = sol;
    out.surface = GluedSurface();
    const geo::Isometry R = geo::reflect_in(mirror);
    const int flip = parity == Parity::Odd ? -1 : 1;
    for (const auto& c : charts)
        out.surface.add_chart(c);
    for (const auto& c : charts)
        out.surface.add_chart({c.polygon, geo::compose(R, c.placement), flip * c.sign});
    for (const auto& p : sol.surface.pairings())
        out.surface.add_pairing(p.a, p.b, p.reversed, p.parity);
    for (const auto& p : sol.surface.pairings())
        out.surface.add_pairing({p.a.chart + n, p.a.side}, {p.b.chart + n, p.b.side}, p.reversed, p.parity);
    for (const auto& r : on_mirror)
        out.surface.add_pairing(r, {r.chart + n, r.side}, false, parity);
    return out;
}

double verify_extension(const ExtendedSolution& ext, const GlobalSystem& sys) {
    return fem::eigen_residual(sys.K, sys.M, ext.lambda, sys.gather(ext.all_chart_values()));
}

double verify_extension(const ExtendedSolution& ext) {
    return verify_extension(ext, assemble_glued(ext.surface, ext.base_mesh));
}

ChartFunction flatten(const ExtendedSolution& ext, const geo::HyperbolicPolygon& target, double tol) {
    struct Entry {
        geo::DiskPoint p;
        int chart;
        int node;
    };
    std::vector<mesh::TriMesh> meshes;
    std::vector<Entry> entries;
    for (std::size_t c = 0; c < ext.surface.charts().size(); ++c) {
        meshes.push_back(mesh::transport_mesh(ext.base_mesh, ext.surface.charts()[c].placement));
        for (std::size_t i = 0; i < meshes.back().nodes.size(); ++i)
            entries.push_back({meshes.back().nodes[i], static_cast<int>(c), static_cast<int>(i)});
    }
    std::vector<int> order(entries.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return entries[a].p.x < entries[b].p.x; });
    DisjointSets sets(entries.size());
    for (std::size_t k = 0; k < order.size(); ++k)
        for (std::size_t j = k; j-- > 0;) {
            if (entries[order[k]].p.x - entries[order[j]].p.x > tol)
                break;
            if (distance(entries[order[k]].p, entries[order[j]].p) <= tol)
                sets.unite(order[k], order[j]);
        }
    const std::vector<int> label = sets.labels();
    const int count = *std::max_element(label.begin(), label.end()) + 1;

    ChartFunction out;
    out.polygon = target;
    out.lambda = ext.lambda;
    out.mesh.nodes.resize(static_cast<std::size_t>(count));
    out.values = fem::Vector::Zero(count);
    std::vector<bool> seen(static_cast<std::size_t>(count), false);
    const double scale = std::max(1.0, ext.base_values.cwiseAbs().maxCoeff());
    std::vector<int> first_entry(ext.surface.charts().size() + 1, 0);
    for (std::size_t e = 0; e < entries.size(); ++e) {
        const int g = label[e];
        const double v = ext.surface.charts()[entries[e].chart].sign * ext.base_values[entries[e].node];
        if (!seen[g]) {
            seen[g] = true;
            out.mesh.nodes[g] = entries[e].p;
            out.values[g] = v;
        } else if (std::abs(out.values[g] - v) > 1e-9 * scale) {
            throw ConsistencyError(fmt::format("flatten: charts disagree at ({}, {})", entries[e].p.x, entries[e].p.y));
        }
    }
    std::size_t e0 = 0;
    for (const auto& m : meshes) {
        for (const auto& t : m.triangles)
            out.mesh.triangles.push_back(
                {label[e0 + t[0]], label[e0 + t[1]], label[e0 + t[2]]});
        e0 += m.nodes.size();
    }

    std::map<std::pair<int, int>, int> uses;
    for (const auto& t : out.mesh.triangles)
        for (int k = 0; k < 3; ++k)
            ++uses[std::minmax(t[k], t[(k + 1) % 3])];
    for (std::size_t k = 0; k < target.size(); ++k) {
        int found = -1;
        for (int g = 0; g < count && found < 0; ++g)
            if (distance(out.mesh.nodes[g], target.vertex(k)) <= tol)
                found = g;
        if (found < 0)
            throw GeometryError(fmt::format("flatten: no node at vertex {} of the target polygon", k));
        out.mesh.corners.push_back(found);
    }
    for (const auto& t : out.mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            if (uses[std::minmax(a, b)] != 1)
                continue;
            int side = -1;
            for (std::size_t s = 0; s < target.size() && side < 0; ++s) {
                const auto g = target.side_geodesic(s);
                if (g.incidence_residual(out.mesh.nodes[a]) <= 10 * tol &&
                    g.incidence_residual(out.mesh.nodes[b]) <= 10 * tol)
                    side = static_cast<int>(s);
            }
            if (side < 0)
                throw GeometryError("flatten: charts do not tile the target polygon");
            const auto start = target.side_start(static_cast<std::size_t>(side));
            if (geo::hyp_distance(start, out.mesh.nodes[a]) > geo::hyp_distance(start, out.mesh.nodes[b]))
                std::swap(a, b);
            out.mesh.boundary_edges.push_back({a, b, side});
        }
    out.mesh.h = mesh::max_edge_length(out.mesh);
    mesh::check_mesh(out.mesh);
    return out;
}

double pairing_compatibility(const ChartFunction& f, const SidePair& p) {
    const SideTrace a = side_trace(f, p.first);
    const SideTrace b = side_trace(f, p.second);
    auto other = [&](double t) { return p.reversed ? 1.0 - t : t; };
    double worst = 0.0;
    for (std::size_t k = 0; k < a.t.size(); ++k)
        worst = std::max(worst, std::abs(a.value[k] - b.at(other(a.t[k]))));
    for (std::size_t k = 0; k < b.t.size(); ++k)
        worst = std::max(worst, std::abs(a.at(other(b.t[k])) - b.value[k]));
    return worst;
}

std::vector<PantsPattern> search_pants_gluing(const ChartFunction& oct, double rel_tol) {
    const int n = static_cast<int>(oct.polygon.size());
    const double limit = rel_tol * oct.values.cwiseAbs().maxCoeff();
    std::vector<PantsPattern> out;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                for (int l = k + 1; l < n; ++l) {
                    const std::array<std::array<int, 4>, 3> matchings{
                        {{i, j, k, l}, {i, k, j, l}, {i, l, j, k}}};
                    for (const auto& mt : matchings)
                        for (int dirs = 0; dirs < 4; ++dirs) {
                            PantsPattern pat;
                            pat.pairs = {{mt[0], mt[1], (dirs & 2) != 0}, {mt[2], mt[3], (dirs & 1) != 0}};
                            pat.surface.add_chart({oct.polygon, geo::Isometry::identity(), 1});
                            for (const auto& sp : pat.pairs)
                                pat.surface.add_pairing({0, sp.first}, {0, sp.second}, sp.reversed, Parity::Even);
                            const Topology t = pat.surface.topology();
                            if (t.euler_characteristic != -1 || !t.orientable || t.boundary_circles != 3)
                                continue;
                            for (const auto& sp : pat.pairs)
                                pat.compatibility = std::max(pat.compatibility, pairing_compatibility(oct, sp));
                            if (pat.compatibility <= limit)
                                out.push_back(std::move(pat));
                        }
                }
    return out;
}

GluedSurface double_surface(const GluedSurface& s, const std::vector<CircleRule>& rules) {
    const Topology topo = s.topology();
    if (topo.euler_characteristic > 0)
        throw DomainError(fmt::format("double_surface: surfaces with Euler characteristic {} > 0 are not supported",
                                      topo.euler_characteristic));
    const auto circles = s.boundary_circles();
    if (rules.size() != circles.size())
        throw DimensionError(fmt::format("double_surface: {} rules for {} boundary circles", rules.size(),
                                         circles.size()));
    const bool any_even = std::count(rules.begin(), rules.end(), CircleRule::Even) > 0;
    const bool any_odd = std::count(rules.begin(), rules.end(), CircleRule::Odd) > 0;
    if (!any_even && !any_odd)
        throw DomainError("double_surface: no boundary circle to glue along");
    if (any_even && any_odd)
        throw ConsistencyError("double_surface: even and odd circles need copies of opposite sign");

    for (std::size_t k = 0; k < circles.size(); ++k) {
        if (rules[k] == CircleRule::Keep)
            continue;
        const auto kind0 = s.charts()[circles[k][0].chart].polygon.label(circles[k][0].side).kind;
        for (const auto& r : circles[k])
            if (s.charts()[r.chart].polygon.label(r.side).kind != kind0)
                throw ConsistencyError(fmt::format("double_surface: boundary circle {} has mixed labels", k));
        const auto needed =
            rules[k] == CircleRule::Odd ? geo::SideLabel::Kind::Dirichlet : geo::SideLabel::Kind::Neumann;
        if (kind0 != needed)
            throw ConsistencyError(fmt::format("double_surface: {} doubling across circle {} labelled {}",
                                               rules[k] == CircleRule::Odd ? "odd" : "even", k,
                                               geo::to_string(s.charts()[circles[k][0].chart].polygon.label(
                                                   circles[k][0].side))));
    }

    const int n = static_cast<int>(s.charts().size());
    const int flip = any_odd ? -1 : 1;
    const Parity parity = any_odd ? Parity::Odd : Parity::Even;
    GluedSurface out;
    for (const auto& c : s.charts())
        out.add_chart(c);
    for (const auto& c : s.charts())
        out.add_chart({c.polygon, c.placement, flip * c.sign});
    for (const auto& p : s.pairings())
        out.add_pairing(p.a, p.b, p.reversed, p.parity);
    for (const auto& p : s.pairings())
        out.add_pairing({p.a.chart + n, p.a.side}, {p.b.chart + n, p.b.side}, p.reversed, p.parity);
    for (std::size_t k = 0; k < circles.size(); ++k)
        if (rules[k] != CircleRule::Keep)
            for (const auto& r : circles[k])
                out.add_pairing(r, {r.chart + n, r.side}, false, parity);
    return out;
}

ExtendedSolution double_surface(const ExtendedSolution& sol, const std::vector<CircleRule>& rules) {
    ExtendedSolution out = sol;
    out.surface = double_surface(sol.surface, rules);
    return out;
}

GluedSurface pants_surface(double boundary_length) {
    GluedSurface s;
    s.add_chart({geo::pants_polygon(boundary_length), geo::Isometry::identity(), 1});
    s.add_pairing({0, 1}, {0, 7}, true, Parity::Even);
    s.add_pairing({0, 3}, {0, 5}, true, Parity::Even);
    return s;
}

Genus3Result build_genus3(double boundary_length, double h_target, const fem::SolverOptions& opts) {
    Genus3Result out;
    const GluedSurface pants = pants_surface(boundary_length);
    const mesh::TriMesh m = mesh::triangulate(pants.charts()[0].polygon, h_target);
    const GlobalSystem sys = assemble_glued(pants, m);
    const auto pair = fem::solve_eigen(sys.K, sys.M, 1, opts).front();
    out.pants.surface = pants;
    out.pants.base_mesh = m;
    out.pants.base_values = sys.scatter(pair.vector).front();
    out.pants.lambda = pair.lambda;
    out.pants_residual = pair.residual;

    auto rules_for = [](const GluedSurface& s, geo::SideLabel::Kind glue_kind, CircleRule rule) {
        std::vector<CircleRule> rules;
        for (const auto& circle : s.boundary_circles()) {
            const auto kind = s.charts()[circle[0].chart].polygon.label(circle[0].side).kind;
            rules.push_back(kind == glue_kind ? rule : CircleRule::Keep);
        }
        return rules;
    };
    const ExtendedSolution even = double_surface(
        out.pants, rules_for(out.pants.surface, geo::SideLabel::Kind::Neumann, CircleRule::Even));
    out.solution =
        double_surface(even, rules_for(even.surface, geo::SideLabel::Kind::Dirichlet, CircleRule::Odd));
    return out;
}

OctagonResult build_octagon(double h_target, const fem::SolverOptions& opts) {
    OctagonResult out;
    const auto pent = geo::quarter_octagon_pentagon();
    const mesh::TriMesh m = mesh::triangulate(pent, h_target);
    const auto K = fem::assemble_stiffness(m);
    const auto M = fem::assemble_mass(m);
    const auto r = fem::reduce(K, M, fem::BCMap::from_labels(m, pent.labels()));
    const auto pair = fem::solve_eigen(r.K, r.M, 1, opts).front();
    out.pentagon = single_chart(pent, m, r.expand(pair.vector), pair.lambda);
    out.pentagon_residual = pair.residual;
    const geo::Geodesic real_axis(geo::kPi, 0.0);
    const geo::Geodesic imaginary_axis(-0.5 * geo::kPi, 0.5 * geo::kPi);
    out.extended = schwarz_extend(schwarz_extend(out.pentagon, real_axis, Parity::Odd), imaginary_axis, Parity::Odd);
    out.octagon = flatten(out.extended, geo::regular_right_polygon(8, 0.5 * geo::kPi));
    return out;
}

} // namespace hypnodal::glue

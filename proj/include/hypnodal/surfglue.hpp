#pragma once

// Surfaces glued from polygon charts, Schwarz reflection of eigenfunctions
// across geodesic mirrors, and the octagon and pants constructions.
//
// Every chart is a copy of a base polygon moved into place by an isometry and
// carrying a sign. A function on a glued surface is always sign * (base
// function on the base mesh), transported with the chart. Side pairings map
// placed sides onto placed sides by the orientation-preserving isometry that
// matches their endpoints, in the same or the reversed direction.

#include "hypnodal/hypfem.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hypnodal::glue {

enum class Parity { Even, Odd };

std::string to_string(Parity p);

struct Chart {
    geo::HyperbolicPolygon polygon; ///< base polygon, in base coordinates
    geo::Isometry placement;        ///< base coordinates -> surface coordinates
    int sign = 1;

    geo::HyperbolicPolygon placed() const { return polygon.transformed(placement); }
};

struct SideRef {
    int chart = 0;
    int side = 0;

    auto operator<=>(const SideRef&) const = default;
};

struct Pairing {
    SideRef a;
    SideRef b;
    /// false: start of a goes to start of b; true: start of a goes to end of b.
    bool reversed = false;
    geo::Isometry map; ///< placed side a -> placed side b
    Parity parity = Parity::Even;
};

struct Topology {
    int euler_characteristic = 0;
    int boundary_circles = 0;
    bool orientable = true;

    /// Genus of an orientable surface, from chi = 2 - 2g - b.
    int genus() const { return (2 - euler_characteristic - boundary_circles) / 2; }
};

class GluedSurface {
public:
    int add_chart(Chart c);

    /// Throws GluingError when a side is paired with itself or twice, when the
    /// side lengths differ, or when an index is out of range.
    void add_pairing(SideRef a, SideRef b, bool reversed, Parity parity, double tol = geo::kDefaultTol);

    const std::vector<Chart>& charts() const { return charts_; }
    const std::vector<Pairing>& pairings() const { return pairings_; }
    std::optional<std::size_t> pairing_of(SideRef s) const;

    /// Computed from the identified cell complex: one vertex per class of
    /// polygon corners, one edge per side class, one face per chart.
    Topology topology() const;

    /// Corner class of every chart vertex, indexed [chart][vertex].
    std::vector<std::vector<int>> vertex_classes() const;

    /// Unpaired sides grouped into closed boundary curves, each listed in order
    /// along the curve. Curve order and starting side are deterministic.
    std::vector<std::vector<SideRef>> boundary_circles() const;

    /// Sides glued by odd pairings, grouped into closed curves (one entry per
    /// side pair, the `a` side of the pairing).
    std::vector<std::vector<SideRef>> odd_curves() const;

private:
    std::vector<std::vector<SideRef>> curves(const std::vector<SideRef>& sides) const;

    std::vector<Chart> charts_;
    std::vector<Pairing> pairings_;
};

/// Stiffness and mass of a glued surface on the free global degrees of freedom.
struct GlobalSystem {
    fem::SymmetricSparseMatrix K;
    fem::SymmetricSparseMatrix M;
    std::vector<mesh::TriMesh> chart_meshes;   ///< base mesh transported by each placement
    std::vector<std::vector<int>> node_class;  ///< [chart][local node] -> global node
    std::vector<bool> constrained;             ///< per global node
    std::vector<int> dof;                      ///< global node -> free index, or -1
    int dof_count = 0;

    std::size_t node_count() const { return constrained.size(); }

    /// Free values from per-chart nodal vectors; the first chart holding a node wins.
    fem::Vector gather(const std::vector<fem::Vector>& per_chart) const;
    /// Per-chart nodal vectors, zero at constrained nodes.
    std::vector<fem::Vector> scatter(const fem::Vector& free_values) const;
    /// Largest disagreement between charts at a shared free node.
    double mismatch(const std::vector<fem::Vector>& per_chart) const;
};

/// Paired boundary nodes are merged; nodes on odd pairings and on free
/// Dirichlet sides are constrained. Throws GluingError listing nodes that a
/// pairing does not map onto nodes, or naming a free side labelled Glue.
GlobalSystem assemble_glued(const GluedSurface& s, const mesh::TriMesh& base, double tol = geo::kDefaultTol);

struct ExtendedSolution {
    GluedSurface surface;
    mesh::TriMesh base_mesh;
    fem::Vector base_values; ///< one value per base mesh node
    double lambda = 0.0;

    fem::Vector chart_values(int chart) const;
    std::vector<fem::Vector> all_chart_values() const;
};

/// One chart with the identity placement.
ExtendedSolution single_chart(const geo::HyperbolicPolygon& p, const mesh::TriMesh& m, const fem::Vector& values,
                              double lambda);

/// Adds the mirror image of every chart, with sign flipped for odd parity,
/// and pairs each free side lying on the mirror with its image. Throws
/// GeometryError when no free side lies on the mirror and ConsistencyError
/// when such a side is not Dirichlet (odd) or Neumann (even).
ExtendedSolution schwarz_extend(const ExtendedSolution& sol, const geo::Geodesic& mirror, Parity parity);

/// ||K u - lambda M u|| / ||u||_M for the extended function on the glued system.
double verify_extension(const ExtendedSolution& ext, const GlobalSystem& sys);
double verify_extension(const ExtendedSolution& ext);

/// A function on one polygon: the charts of an extended solution merged into a
/// single mesh of a target polygon that they tile.
struct ChartFunction {
    geo::HyperbolicPolygon polygon;
    mesh::TriMesh mesh;
    fem::Vector values;
    double lambda = 0.0;
};

/// Throws GeometryError when the charts do not tile the target polygon.
ChartFunction flatten(const ExtendedSolution& ext, const geo::HyperbolicPolygon& target,
                      double tol = geo::kDefaultTol);

struct SidePair {
    int first = 0;
    int second = 0;
    bool reversed = false;
};

struct PantsPattern {
    std::vector<SidePair> pairs;
    double compatibility = 0.0; ///< max |f(x) - f(pairing x)| over the side nodes
    GluedSurface surface;       ///< one chart: the octagon with the two pairings
};

/// Every way of gluing four of the eight sides in two pairs, with both
/// directions each, that yields a pair of pants and matches the function
/// across the glued sides within rel_tol * max|f|. Lexicographic order.
std::vector<PantsPattern> search_pants_gluing(const ChartFunction& oct, double rel_tol = 1e-6);

/// Largest |f(x) - f(pairing x)| over the nodes of both sides of a side pair.
double pairing_compatibility(const ChartFunction& f, const SidePair& p);

enum class CircleRule { Keep, Even, Odd };

/// Mirror copy of the whole surface glued to it along the boundary circles
/// marked Even or Odd (rules indexed like boundary_circles()). Throws
/// DomainError for surfaces with positive Euler characteristic or nothing to
/// glue, ConsistencyError for a circle with mixed labels, a rule that does
/// not fit the label, or Even and Odd rules together.
GluedSurface double_surface(const GluedSurface& s, const std::vector<CircleRule>& rules);
ExtendedSolution double_surface(const ExtendedSolution& sol, const std::vector<CircleRule>& rules);

/// Pants with three boundary geodesics of length L as one chart with its two
/// seams glued, Dirichlet on one boundary circle and Neumann on the others.
GluedSurface pants_surface(double boundary_length);

struct Genus3Result {
    ExtendedSolution solution;   ///< four charts, closed, genus 3
    ExtendedSolution pants;      ///< the eigenfunction on P
    double pants_residual = 0.0; ///< solver residual on P
};

/// Solves the mixed problem on P, doubles evenly across the two Neumann
/// circles and then oddly across the two Dirichlet circles.
Genus3Result build_genus3(double boundary_length, double h_target, const fem::SolverOptions& opts = {});

/// Octagon with the mixed pentagon solution extended oddly across both mirrors.
struct OctagonResult {
    ExtendedSolution pentagon;  ///< single chart
    ExtendedSolution extended;  ///< four charts tiling the octagon
    ChartFunction octagon;      ///< the same function on one octagon mesh
    double pentagon_residual = 0.0;
};

OctagonResult build_octagon(double h_target, const fem::SolverOptions& opts = {});

} // namespace hypnodal::glue

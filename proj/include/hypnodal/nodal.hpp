#pragma once

// Zero sets of piecewise linear functions on triangle meshes.

#include "hypnodal/hypfem.hpp"

#include <optional>
#include <vector>

namespace hypnodal::nodal {

constexpr double kDefaultZeroTol = 1e-9;
constexpr double kDefaultAngleTol = 0.1;

struct Polyline {
    std::vector<geo::DiskPoint> points;
    bool closed = false; ///< last point connects back to the first
};

struct Crossing {
    geo::DiskPoint point;
    double angle = 0.0; ///< between the two lines, in [0, pi/2]
    bool transversal = false;
};

struct NodalSet {
    std::vector<Polyline> components;
    /// Mesh nodes where more than two zero segments meet. Polylines stop there.
    std::vector<Crossing> crossing_points;
};

/// Zero segments of the linear interpolant on every triangle, chained into
/// polylines. Nodes with |u| <= zero_tol * max|u| count as exact zeros, and a
/// mesh edge between two such nodes belongs to the set unless the function has
/// the same strict sign on both sides of it. Throws DegenerateInputError for
/// u == 0 and DimensionError for a size mismatch.
NodalSet extract_nodal(const mesh::TriMesh& m, const fem::Vector& u, double zero_tol = kDefaultZeroTol,
                       double angle_tol = kDefaultAngleTol);

/// Joins polylines that end at a common crossing point, pairing the ends whose
/// directions are closest to opposite. Ends meeting at an angle further than
/// max_bend from a straight continuation stay separate.
NodalSet maximal_components(const NodalSet& ns, double max_bend = 0.5);

/// Largest hyperbolic distance from a polyline vertex to g. Polyline must be nonempty.
double geodesic_deviation(const Polyline& poly, const geo::Geodesic& g);

/// Hyperbolic distance from p to the complete geodesic g.
double distance_to_geodesic(const geo::DiskPoint& p, const geo::Geodesic& g);

/// Pairwise segment intersections within and across polylines, skipping
/// neighbouring segments of the same polyline. Hits closer than merge_tol are
/// reported once.
std::vector<Crossing> self_intersections(const NodalSet& ns, double angle_tol = kDefaultAngleTol,
                                         double merge_tol = 1e-9);

/// Value of the linear interpolant at p, or nullopt outside the mesh.
std::optional<double> interpolate(const mesh::TriMesh& m, const fem::Vector& u, const geo::DiskPoint& p);

} // namespace hypnodal::nodal

#pragma once

// Piecewise-linear triangulations of hyperbolic polygons in disk coordinates.
//
// Meshes start from a fan around the vertex average and are refined 1 -> 4.
// Boundary midpoints are hyperbolic midpoints of their edge, so boundary nodes
// stay on the geodesic sides exactly and sit at dyadic fractions of each
// side's hyperbolic length. Any isometry that maps one side onto another
// therefore maps side nodes onto side nodes.

#include "hypnodal/hypgeo.hpp"

#include <array>
#include <vector>

namespace hypnodal::mesh {

using geo::DiskPoint;

struct BoundaryEdge {
    int a = 0; ///< start node, in the direction of the polygon side
    int b = 0;
    int side = 0;
};

struct TriMesh {
    std::vector<DiskPoint> nodes;
    std::vector<std::array<int, 3>> triangles; ///< counterclockwise in disk coordinates
    std::vector<BoundaryEdge> boundary_edges;
    std::vector<int> corners; ///< node index of polygon vertex k
    double h = 0.0;           ///< max Euclidean edge length

    std::size_t side_count() const { return corners.size(); }

    /// Nodes of one polygon side, ordered from its start vertex to its end vertex.
    std::vector<int> side_nodes(int side) const;
};

double max_edge_length(const TriMesh& m);
double min_angle_degrees(const TriMesh& m);

/// Throws GeometryError when a triangle is inverted or degenerate, an edge is
/// shared by more than two triangles, or the boundary edge list does not match
/// the edges that belong to a single triangle.
void check_mesh(const TriMesh& m);

TriMesh triangulate(const geo::HyperbolicPolygon& p, double h_target);

TriMesh refine(const TriMesh& m);

TriMesh transport_mesh(const TriMesh& m, const geo::Isometry& g);

} // namespace hypnodal::mesh

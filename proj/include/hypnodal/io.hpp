#pragma once

// Text, CSV and SVG output, and the polygon file format.
//
// Polygon file:
//
//     # comment
//     model poincare-disk
//     vertices <n>
//     <x> <y> <label of the side starting here>     (n lines)
//
// Labels are dirichlet, neumann or glue:<tag>. Blank lines and text after '#'
// are ignored. Numbers are written with 17 significant digits, so a written
// polygon reads back bit for bit.

#include "hypnodal/bounds.hpp"
#include "hypnodal/nodal.hpp"
#include "hypnodal/surfglue.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hypnodal::io {

void write_polygon(std::ostream& os, const geo::HyperbolicPolygon& p);
/// Throws ParseError naming the line for malformed input.
geo::HyperbolicPolygon read_polygon(std::istream& is);
geo::SideLabel parse_label(const std::string& text);

/// Sections NODES, TRIANGLES, BOUNDARY and CORNERS, zero-based indices.
void write_mesh(std::ostream& os, const mesh::TriMesh& m);

struct EigenRow {
    double lambda = 0.0;
    double residual = 0.0;
};

/// CSV: index,lambda,residual,mesh_h,dof_count.
void write_eigen_csv(std::ostream& os, const std::vector<EigenRow>& rows, double mesh_h, int dof_count);

/// Charts with their polygon name, placement coefficients and sign, then
/// pairings with sides, direction, parity and map coefficients.
void write_surface(std::ostream& os, const glue::GluedSurface& s, const std::string& polygon_name);

/// One block per polyline: a header line "polyline <i> open|closed <count>"
/// followed by "x y" lines, blocks separated by a blank line. Crossings follow
/// as "crossing x y angle transversal" lines.
void write_nodal(std::ostream& os, const nodal::NodalSet& ns);

struct SvgScene {
    std::vector<geo::HyperbolicPolygon> polygons;
    std::vector<geo::Geodesic> mirrors;
    std::vector<nodal::Polyline> nodal_lines;
};

/// Unit disk on a 1000 x 1000 viewport, y up. Stroke classes disk, side, mirror, nodal.
void write_svg(std::ostream& os, const SvgScene& scene);

/// CSV: g,n,area,pants_number,nprime_bound, with the area to 6 decimals.
std::string bounds_row(const bounds::SurfaceTopology& t);
void write_bounds_csv(std::ostream& os, const std::vector<bounds::SurfaceTopology>& rows);

/// Named checks of a run, written as CSV name,value,tolerance,result.
class AssertionLog {
public:
    struct Entry {
        std::string name;
        double value;
        double tolerance;
        bool passed;
    };

    /// Passes when value <= tolerance.
    bool at_most(const std::string& name, double value, double tolerance);
    bool record(const std::string& name, double value, double tolerance, bool passed);

    const std::vector<Entry>& entries() const { return entries_; }
    bool all_passed() const;
    void write(std::ostream& os) const;

private:
    std::vector<Entry> entries_;
};

} // namespace hypnodal::io

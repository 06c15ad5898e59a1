#pragma once

// Constant curvature -1 geometry in the Poincare disk model.
//
// Points are plain coordinates in the open unit disk, geodesics are stored by
// the angles of their two ideal endpoints, and isometries are normalized
// coefficient pairs (a, b) with |a|^2 - |b|^2 = 1 acting by
//     z -> (a z + b) / (conj(b) z + conj(a))
// optionally preceded by complex conjugation for orientation-reversing maps.

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace hypnodal::geo {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDefaultTol = 1e-9;

struct DiskPoint {
    double x = 0.0;
    double y = 0.0;

    Complex z() const { return {x, y}; }
    double norm2() const { return x * x + y * y; }
    bool in_disk() const { return norm2() < 1.0; }

    static DiskPoint from(Complex w) { return {w.real(), w.imag()}; }
};

/// Throws DomainError unless p lies in the open unit disk.
void require_in_disk(const DiskPoint& p, const char* what = "point");

double hyp_distance(const DiskPoint& p, const DiskPoint& q);

/// Conformal factor 4 / (1 - |z|^2)^2 of the hyperbolic area element.
double area_weight(const DiskPoint& p);

/// Complete geodesic given by its ideal endpoints exp(i*from) and exp(i*to).
class Geodesic {
public:
    Geodesic(double from_angle, double to_angle);

    double from_angle() const { return from_; }
    double to_angle() const { return to_; }
    Complex from_point() const { return std::polar(1.0, from_); }
    Complex to_point() const { return std::polar(1.0, to_); }

    bool is_diameter(double tol = kDefaultTol) const;

    /// Euclidean center and radius of the supporting circle. Undefined for diameters.
    Complex center() const;
    double radius() const;

    /// Euclidean distance from p to the supporting circle or line.
    double incidence_residual(const DiskPoint& p) const;

    bool contains(const DiskPoint& p, double tol = kDefaultTol) const {
        return incidence_residual(p) <= tol;
    }

    /// Hyperbolic distance from p to the geodesic.
    double distance_to(const DiskPoint& p) const;

    /// Point of the geodesic closest to the origin.
    DiskPoint closest_to_origin() const;

private:
    double from_;
    double to_;
};

class Isometry {
public:
    Isometry() = default;
    Isometry(Complex a, Complex b, bool reverses_orientation = false);

    static Isometry identity() { return {}; }
    static Isometry rotation(double angle);
    /// Orientation-preserving map sending p to the origin.
    static Isometry to_origin(const DiskPoint& p);
    /// Hyperbolic translation by `length` along the real diameter.
    static Isometry translation(double length);
    static Isometry conjugation() { return {Complex(1.0), Complex(0.0), true}; }

    Complex a() const { return a_; }
    Complex b() const { return b_; }
    bool reverses_orientation() const { return reverses_; }

    /// Works on the closed disk, including ideal points on the unit circle.
    Complex apply(Complex z) const;
    DiskPoint apply(const DiskPoint& p) const { return DiskPoint::from(apply(p.z())); }
    Geodesic apply(const Geodesic& g) const;

    Isometry inverse() const;

    /// Distance between two isometries measured on their coefficient pairs, up
    /// to the overall sign ambiguity of (a, b).
    double coefficient_distance(const Isometry& other) const;

private:
    Complex a_{1.0, 0.0};
    Complex b_{0.0, 0.0};
    bool reverses_ = false;
};

/// (f o g)(z) = f(g(z)). Orientation flags combine by XOR; the result is renormalized.
Isometry compose(const Isometry& f, const Isometry& g);

inline DiskPoint apply(const Isometry& f, const DiskPoint& p) { return f.apply(p); }

Geodesic geodesic_between(const DiskPoint& p, const DiskPoint& q);

Isometry reflect_in(const Geodesic& g);

/// Orientation-preserving isometry taking g onto the real diameter with
/// from_point -> -1 and to_point -> +1.
Isometry standardize(const Geodesic& g);

/// Intersection point of two complete geodesics, if they cross inside the disk.
std::optional<DiskPoint> intersect(const Geodesic& g, const Geodesic& h);

/// Point at fraction t of the hyperbolic arclength from p to q.
DiskPoint geodesic_point(const DiskPoint& p, const DiskPoint& q, double t);

inline DiskPoint hyperbolic_midpoint(const DiskPoint& p, const DiskPoint& q) {
    return geodesic_point(p, q, 0.5);
}

/// The unique orientation-preserving isometry with p0 -> q0 and p1 -> q1.
/// Requires d(p0, p1) = d(q0, q1) within tol.
Isometry matching_isometry(const DiskPoint& p0, const DiskPoint& p1, const DiskPoint& q0,
                           const DiskPoint& q1, double tol = kDefaultTol);

struct SideLabel {
    enum class Kind { Dirichlet, Neumann, Glue };

    Kind kind = Kind::Neumann;
    std::string tag;

    static SideLabel dirichlet() { return {Kind::Dirichlet, {}}; }
    static SideLabel neumann() { return {Kind::Neumann, {}}; }
    static SideLabel glue(std::string tag) { return {Kind::Glue, std::move(tag)}; }

    bool operator==(const SideLabel&) const = default;
};

std::string to_string(const SideLabel& label);

/// Geodesic polygon; side i joins vertex i to vertex i + 1 (cyclically).
class HyperbolicPolygon {
public:
    HyperbolicPolygon() = default;
    HyperbolicPolygon(std::vector<DiskPoint> vertices, std::vector<SideLabel> labels);

    std::size_t size() const { return vertices_.size(); }
    const std::vector<DiskPoint>& vertices() const { return vertices_; }
    const DiskPoint& vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }
    const std::vector<SideLabel>& labels() const { return labels_; }
    const SideLabel& label(std::size_t side) const { return labels_[side]; }

    DiskPoint side_start(std::size_t side) const { return vertex(side); }
    DiskPoint side_end(std::size_t side) const { return vertex(side + 1); }
    Geodesic side_geodesic(std::size_t side) const;
    double side_length(std::size_t side) const;

    /// +1 when vertices run counterclockwise in disk coordinates, -1 otherwise.
    int orientation() const;

    /// Interior angle at vertex i, in (0, 2*pi).
    double interior_angle(std::size_t i) const;

    bool is_simple() const;

    HyperbolicPolygon transformed(const Isometry& f) const;
    HyperbolicPolygon with_labels(std::vector<SideLabel> labels) const;

private:
    std::vector<DiskPoint> vertices_;
    std::vector<SideLabel> labels_;
};

/// Angle defect (n - 2) pi - sum of interior angles. Throws GeometryError for
/// non-simple polygons or a non-positive defect.
double polygon_area(const HyperbolicPolygon& p);

/// Circumradius R of the regular n-gon with interior angle alpha:
/// cosh R = cot(pi / n) cot(alpha / 2).
double regular_circumradius(int n, double alpha);
/// Half side length s/2 of the same polygon: cosh(s/2) = cos(pi / n) / sin(alpha / 2).
double regular_half_side(int n, double alpha);
/// Distance from the center to a side midpoint: cosh r = cos(alpha / 2) / sin(pi / n).
double regular_inradius(int n, double alpha);

/// Regular n-gon centered at the origin with interior angle alpha. Side k is
/// centered on the ray at angle 2*pi*k/n. All sides labelled Neumann.
HyperbolicPolygon regular_right_polygon(int n, double alpha);

/// Right-angled pentagon cut from the right-angled regular octagon by the
/// real and imaginary diameters (first quadrant). Sides:
///   0: origin -> real axis (Dirichlet), 1..3: octagon boundary (Neumann),
///   4: imaginary axis -> origin (Dirichlet).
HyperbolicPolygon quarter_octagon_pentagon();

/// Length of the side opposite `a` in a right-angled hexagon with alternate sides a, b, c.
double hexagon_opposite_side(double a, double b, double c);

/// Right-angled hexagon with alternate sides a, b, c. Side order:
///   0: a, 1: c', 2: b, 3: a', 4: c, 5: b'
/// where x' is the side opposite x. The vertex average is moved to the origin.
HyperbolicPolygon right_angled_hexagon(double a, double b, double c);

/// Builds a polygon by walking the given side lengths, turning left by
/// pi - angles[k] after side k. Throws GeometryError when the walk does not close.
HyperbolicPolygon walk_polygon(const std::vector<double>& lengths, const std::vector<double>& angles,
                               std::vector<SideLabel> labels, double closure_tol = 1e-9);

/// Moves the Euclidean vertex average of p towards the origin.
HyperbolicPolygon recentered(const HyperbolicPolygon& p);

/// Pair of pants with three boundary geodesics of length L, cut open along two
/// seams into a single right-angled octagon (two hexagons joined along a seam).
/// Sides:
///   0: C  (Neumann circle, length L)        1: seam b' (glue "b")
///   2: a  (half of the Dirichlet circle)    3: seam c' (glue "c")
///   4: B  (Neumann circle, length L)        5: seam c' (glue "c")
///   6: a  (other half, Dirichlet)           7: seam b' (glue "b")
/// Seam 1 pairs with 7 and 3 with 5, each with reversed direction.
HyperbolicPolygon pants_polygon(double boundary_length);

} // namespace hypnodal::geo

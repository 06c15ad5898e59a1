#include "hypnodal/hypgeo.hpp"

#include "hypnodal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace hypnodal::geo {

namespace {

constexpr Complex kI{0.0, 1.0};

double wrap_2pi(double angle) {
    double r = std::fmod(angle, 2.0 * kPi);
    if (r < 0.0)
        r += 2.0 * kPi;
    return r;
}

bool on_segment(const DiskPoint& a, const DiskPoint& b, const DiskPoint& x, double tol) {
    return hyp_distance(a, x) + hyp_distance(x, b) <= hyp_distance(a, b) + tol;
}

} // namespace

void require_in_disk(const DiskPoint& p, const char* what) {
    if (!(p.norm2() < 1.0) || !std::isfinite(p.x) || !std::isfinite(p.y))
        throw DomainError(fmt::format("{} ({}, {}) is not inside the open unit disk", what, p.x, p.y));
}

double hyp_distance(const DiskPoint& p, const DiskPoint& q) {
    require_in_disk(p);
    require_in_disk(q);
    // 2 asinh(sqrt(delta)) is the same quantity as arccosh(1 + 2 delta) but
    // keeps full relative precision for nearby points.
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    const double delta = (dx * dx + dy * dy) / ((1.0 - p.norm2()) * (1.0 - q.norm2()));
    return 2.0 * std::asinh(std::sqrt(delta));
}

double area_weight(const DiskPoint& p) {
    require_in_disk(p);
    const double s = 1.0 - p.norm2();
    return 4.0 / (s * s);
}

// ---------------------------------------------------------------------------
// Geodesic

Geodesic::Geodesic(double from_angle, double to_angle) : from_(from_angle), to_(to_angle) {
    if (std::abs(std::polar(1.0, from_) - std::polar(1.0, to_)) < 1e-14)
        throw DegenerateInputError("geodesic endpoints coincide");
}

bool Geodesic::is_diameter(double tol) const {
    return std::abs(std::cos(0.5 * (to_ - from_))) <= tol;
}

Complex Geodesic::center() const {
    const double half = 0.5 * (to_ - from_);
    const double mid = 0.5 * (to_ + from_);
    return std::polar(1.0, mid) / std::cos(half);
}

double Geodesic::radius() const {
    return std::abs(std::tan(0.5 * (to_ - from_)));
}

double Geodesic::incidence_residual(const DiskPoint& p) const {
    if (is_diameter(1e-12))
        return std::abs((p.z() * std::polar(1.0, -from_)).imag());
    return std::abs(std::abs(p.z() - center()) - radius());
}

double Geodesic::distance_to(const DiskPoint& p) const {
    return 0.5 * hyp_distance(p, reflect_in(*this).apply(p));
}

DiskPoint Geodesic::closest_to_origin() const {
    if (is_diameter(1e-12))
        return {0.0, 0.0};
    const Complex c = center();
    return DiskPoint::from(c * (1.0 - radius() / std::abs(c)));
}

// ---------------------------------------------------------------------------
// Isometry

Isometry::Isometry(Complex a, Complex b, bool reverses_orientation)
    : a_(a), b_(b), reverses_(reverses_orientation) {
    const double det = std::norm(a) - std::norm(b);
    if (!(det > 0.0) || !std::isfinite(det))
        throw DomainError("isometry coefficients must satisfy |a|^2 - |b|^2 > 0");
    const double s = 1.0 / std::sqrt(det);
    a_ *= s;
    b_ *= s;
}

Isometry Isometry::rotation(double angle) {
    return {std::polar(1.0, 0.5 * angle), Complex(0.0)};
}

Isometry Isometry::to_origin(const DiskPoint& p) {
    require_in_disk(p);
    return {Complex(1.0), -p.z()};
}

Isometry Isometry::translation(double length) {
    return {Complex(std::cosh(0.5 * length)), Complex(std::sinh(0.5 * length))};
}

Complex Isometry::apply(Complex z) const {
    const Complex w = reverses_ ? std::conj(z) : z;
    return (a_ * w + b_) / (std::conj(b_) * w + std::conj(a_));
}

Geodesic Isometry::apply(const Geodesic& g) const {
    return {std::arg(apply(g.from_point())), std::arg(apply(g.to_point()))};
}

Isometry Isometry::inverse() const {
    if (reverses_)
        return {a_, -std::conj(b_), true};
    return {std::conj(a_), -b_, false};
}

double Isometry::coefficient_distance(const Isometry& other) const {
    if (reverses_ != other.reverses_)
        return std::numeric_limits<double>::infinity();
    const double same = std::abs(a_ - other.a_) + std::abs(b_ - other.b_);
    const double flipped = std::abs(a_ + other.a_) + std::abs(b_ + other.b_);
    return std::min(same, flipped);
}

Isometry compose(const Isometry& f, const Isometry& g) {
    Complex ga = g.a();
    Complex gb = g.b();
    if (f.reverses_orientation()) {
        ga = std::conj(ga);
        gb = std::conj(gb);
    }
    const Complex a = f.a() * ga + f.b() * std::conj(gb);
    const Complex b = f.a() * gb + f.b() * std::conj(ga);
    return {a, b, f.reverses_orientation() != g.reverses_orientation()};
}

Geodesic geodesic_between(const DiskPoint& p, const DiskPoint& q) {
    require_in_disk(p);
    require_in_disk(q);
    if (p.x == q.x && p.y == q.y)
        throw DegenerateInputError("geodesic_between: points coincide");
    const Isometry t = Isometry::to_origin(p);
    const Complex qq = t.apply(q.z());
    const Complex dir = qq / std::abs(qq);
    const Isometry back = t.inverse();
    return {std::arg(back.apply(-dir)), std::arg(back.apply(dir))};
}

Isometry reflect_in(const Geodesic& g) {
    if (g.is_diameter(1e-12))
        return {std::polar(1.0, g.from_angle()), Complex(0.0), true};
    const Complex c = g.center();
    const double r = g.radius();
    return {kI * c / r, -kI / r, true};
}

Isometry standardize(const Geodesic& g) {
    const Isometry t = Isometry::to_origin(g.closest_to_origin());
    const double phi = std::arg(t.apply(g.from_point()));
    return compose(Isometry::rotation(kPi - phi), t);
}

std::optional<DiskPoint> intersect(const Geodesic& g, const Geodesic& h) {
    const Isometry s = standardize(g);
    const Geodesic hh = s.apply(h);
    const double sa = std::sin(hh.from_angle());
    const double sb = std::sin(hh.to_angle());
    if (!(sa * sb < 0.0))
        return std::nullopt;
    double x = 0.0;
    if (!hh.is_diameter(1e-12)) {
        const Complex c = hh.center();
        const double r = hh.radius();
        const double disc = r * r - c.imag() * c.imag();
        if (disc < 0.0)
            return std::nullopt;
        const double x1 = c.real() - std::sqrt(disc);
        const double x2 = c.real() + std::sqrt(disc);
        x = std::abs(x1) < std::abs(x2) ? x1 : x2;
        if (std::abs(x) >= 1.0)
            return std::nullopt;
    }
    return s.inverse().apply(DiskPoint{x, 0.0});
}

DiskPoint geodesic_point(const DiskPoint& p, const DiskPoint& q, double t) {
    const double d = hyp_distance(p, q);
    if (d == 0.0)
        return p;
    const Isometry to0 = Isometry::to_origin(p);
    const Complex qq = to0.apply(q.z());
    const Complex w = std::tanh(0.5 * t * d) * (qq / std::abs(qq));
    return DiskPoint::from(to0.inverse().apply(w));
}

namespace {

// Orientation-preserving map sending p0 to the origin and p1 to the positive real axis.
Isometry frame(const DiskPoint& p0, const DiskPoint& p1) {
    const Isometry t = Isometry::to_origin(p0);
    return compose(Isometry::rotation(-std::arg(t.apply(p1.z()))), t);
}

} // namespace

Isometry matching_isometry(const DiskPoint& p0, const DiskPoint& p1, const DiskPoint& q0,
                           const DiskPoint& q1, double tol) {
    const double dp = hyp_distance(p0, p1);
    const double dq = hyp_distance(q0, q1);
    if (dp == 0.0 || dq == 0.0)
        throw DegenerateInputError("matching_isometry: degenerate segment");
    if (std::abs(dp - dq) > tol)
        throw GeometryError(
            fmt::format("matching_isometry: segment lengths differ ({} vs {})", dp, dq));
    return compose(frame(q0, q1).inverse(), frame(p0, p1));
}

std::string to_string(const SideLabel& label) {
    switch (label.kind) {
    case SideLabel::Kind::Dirichlet:
        return "dirichlet";
    case SideLabel::Kind::Neumann:
        return "neumann";
    case SideLabel::Kind::Glue:
        return "glue:" + label.tag;
    }
    return "?";
}

// ---------------------------------------------------------------------------
// HyperbolicPolygon

HyperbolicPolygon::HyperbolicPolygon(std::vector<DiskPoint> vertices, std::vector<SideLabel> labels)
    : vertices_(std::move(vertices)), labels_(std::move(labels)) {
    if (vertices_.size() < 3)
        throw GeometryError("polygon needs at least three vertices");
    if (labels_.empty())
        labels_.assign(vertices_.size(), SideLabel::neumann());
    if (labels_.size() != vertices_.size())
        throw GeometryError("polygon needs one label per side");
    for (const auto& v : vertices_)
        require_in_disk(v, "polygon vertex");
}

Geodesic HyperbolicPolygon::side_geodesic(std::size_t side) const {
    return geodesic_between(side_start(side), side_end(side));
}

double HyperbolicPolygon::side_length(std::size_t side) const {
    return hyp_distance(side_start(side), side_end(side));
}

int HyperbolicPolygon::orientation() const {
    double area2 = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        const auto& p = vertex(i);
        const auto& q = vertex(i + 1);
        area2 += p.x * q.y - q.x * p.y;
    }
    return area2 >= 0.0 ? 1 : -1;
}

double HyperbolicPolygon::interior_angle(std::size_t i) const {
    const std::size_t n = size();
    const Isometry t = Isometry::to_origin(vertex(i));
    const Complex next = t.apply(vertex(i + 1).z());
    const Complex prev = t.apply(vertex(i + n - 1).z());
    const double a = orientation() > 0 ? std::arg(prev / next) : std::arg(next / prev);
    return wrap_2pi(a);
}

bool HyperbolicPolygon::is_simple() const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (hyp_distance(vertex(i), vertex(j)) < 1e-12)
                return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1)
                continue;
            const auto x = intersect(side_geodesic(i), side_geodesic(j));
            if (!x)
                continue;
            if (on_segment(side_start(i), side_end(i), *x, 1e-12) &&
                on_segment(side_start(j), side_end(j), *x, 1e-12))
                return false;
        }
    }
    return true;
}

HyperbolicPolygon HyperbolicPolygon::transformed(const Isometry& f) const {
    std::vector<DiskPoint> v;
    v.reserve(size());
    for (const auto& p : vertices_)
        v.push_back(f.apply(p));
    return {std::move(v), labels_};
}

HyperbolicPolygon HyperbolicPolygon::with_labels(std::vector<SideLabel> labels) const {
    return {vertices_, std::move(labels)};
}

double polygon_area(const HyperbolicPolygon& p) {
    if (!p.is_simple())
        throw GeometryError("polygon_area: polygon is not simple");
    double angle_sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        angle_sum += p.interior_angle(i);
    const double area = (static_cast<double>(p.size()) - 2.0) * kPi - angle_sum;
    if (!(area > 0.0))
        throw GeometryError(fmt::format("polygon_area: non-positive angle defect {}", area));
    return area;
}

namespace {

void require_feasible(int n, double alpha) {
    if (n < 3)
        throw FeasibilityError(fmt::format("regular polygon needs n >= 3 (got {})", n));
    if (!(alpha > 0.0))
        throw FeasibilityError("regular polygon needs a positive interior angle");
    const double defect = (n - 2) * kPi - n * alpha;
    if (!(defect > 1e-12))
        throw FeasibilityError(fmt::format(
            "hyperbolic regular polygon requires (n-2)*pi - n*alpha > 0; got {} for n={}, alpha={}",
            defect, n, alpha));
}

} // namespace

double regular_circumradius(int n, double alpha) {
    require_feasible(n, alpha);
    return std::acosh(1.0 / (std::tan(kPi / n) * std::tan(0.5 * alpha)));
}

double regular_half_side(int n, double alpha) {
    require_feasible(n, alpha);
    return std::acosh(std::cos(kPi / n) / std::sin(0.5 * alpha));
}

double regular_inradius(int n, double alpha) {
    require_feasible(n, alpha);
    return std::acosh(std::cos(0.5 * alpha) / std::sin(kPi / n));
}

HyperbolicPolygon regular_right_polygon(int n, double alpha) {
    const double rho = std::tanh(0.5 * regular_circumradius(n, alpha));
    std::vector<DiskPoint> v;
    v.reserve(n);
    for (int k = 0; k < n; ++k)
        v.push_back(DiskPoint::from(std::polar(rho, (2.0 * k - 1.0) * kPi / n)));
    return {std::move(v), {}};
}

HyperbolicPolygon quarter_octagon_pentagon() {
    const double alpha = 0.5 * kPi;
    const double rv = std::tanh(0.5 * regular_circumradius(8, alpha));
    const double rm = std::tanh(0.5 * regular_inradius(8, alpha));
    std::vector<DiskPoint> v{
        {0.0, 0.0},
        {rm, 0.0},
        DiskPoint::from(std::polar(rv, kPi / 8.0)),
        DiskPoint::from(std::polar(rv, 3.0 * kPi / 8.0)),
        {0.0, rm},
    };
    std::vector<SideLabel> labels{SideLabel::dirichlet(), SideLabel::neumann(), SideLabel::neumann(),
                                  SideLabel::neumann(), SideLabel::dirichlet()};
    return {std::move(v), std::move(labels)};
}

double hexagon_opposite_side(double a, double b, double c) {
    if (!(a > 0.0 && b > 0.0 && c > 0.0))
        throw DomainError("right-angled hexagon needs positive side lengths");
    return std::acosh((std::cosh(b) * std::cosh(c) + std::cosh(a)) / (std::sinh(b) * std::sinh(c)));
}

HyperbolicPolygon walk_polygon(const std::vector<double>& lengths, const std::vector<double>& angles,
                               std::vector<SideLabel> labels, double closure_tol) {
    const std::size_t n = lengths.size();
    if (n < 3 || angles.size() != n)
        throw GeometryError("walk_polygon: need matching side lengths and angles (n >= 3)");
    Isometry f;
    std::vector<DiskPoint> v{{0.0, 0.0}};
    for (std::size_t k = 0; k < n; ++k) {
        f = compose(f, Isometry::translation(lengths[k]));
        f = compose(f, Isometry::rotation(kPi - angles[(k + 1) % n]));
        if (k + 1 < n)
            v.push_back(f.apply(DiskPoint{}));
    }
    const double gap = hyp_distance(f.apply(DiskPoint{}), v.front());
    if (gap > closure_tol || f.coefficient_distance(Isometry::identity()) > closure_tol)
        throw GeometryError(fmt::format("walk_polygon: walk does not close (gap {})", gap));
    return {std::move(v), std::move(labels)};
}

HyperbolicPolygon recentered(const HyperbolicPolygon& p) {
    HyperbolicPolygon out = p;
    for (int it = 0; it < 3; ++it) {
        DiskPoint c;
        for (const auto& v : out.vertices()) {
            c.x += v.x;
            c.y += v.y;
        }
        c.x /= static_cast<double>(out.size());
        c.y /= static_cast<double>(out.size());
        out = out.transformed(Isometry::to_origin(c));
    }
    return out;
}

HyperbolicPolygon right_angled_hexagon(double a, double b, double c) {
    const double ap = hexagon_opposite_side(a, b, c);
    const double bp = hexagon_opposite_side(b, c, a);
    const double cp = hexagon_opposite_side(c, a, b);
    const std::vector<double> lengths{a, cp, b, ap, c, bp};
    const std::vector<double> angles(6, 0.5 * kPi);
    return recentered(walk_polygon(lengths, angles, {}));
}

HyperbolicPolygon pants_polygon(double boundary_length) {
    if (!(boundary_length > 0.0))
        throw DomainError("pants boundary length must be positive");
    const double L = boundary_length;
    const double half = 0.5 * L;
    const double seam = hexagon_opposite_side(half, half, half);
    const std::vector<double> lengths{L, seam, half, seam, L, seam, half, seam};
    const std::vector<double> angles(8, 0.5 * kPi);
    std::vector<SideLabel> labels{
        SideLabel::neumann(),   SideLabel::glue("b"), SideLabel::dirichlet(), SideLabel::glue("c"),
        SideLabel::neumann(),   SideLabel::glue("c"), SideLabel::dirichlet(), SideLabel::glue("b"),
    };
    return recentered(walk_polygon(lengths, angles, std::move(labels)));
}

} // namespace hypnodal::geo

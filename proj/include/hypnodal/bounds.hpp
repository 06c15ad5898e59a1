#pragma once

// Pants numbers, Euler characteristics of curve systems and the counting
// bound for totally geodesic nodal curves.
//
// A curve system is purely combinatorial: each closed curve is the cyclic
// sequence of intersection labels it visits, and every label occurs exactly
// twice in the system. The topological hypotheses on the curves (essential,
// nonperipheral, pairwise non-homotopic) are the caller's responsibility.

#include <functional>
#include <vector>

namespace hypnodal::bounds {

struct SurfaceTopology {
    int g = 0; ///< genus
    int n = 0; ///< punctures

    int euler_characteristic() const { return 2 - 2 * g - n; }
    /// Hyperbolic area 2 pi (2g - 2 + n) by Gauss-Bonnet.
    double area() const;
};

struct CurveSystem {
    std::vector<std::vector<int>> curves;

    std::size_t curve_count() const { return curves.size(); }
};

/// 3g - 3 + n. Throws DomainError unless chi < 0.
int pants_number(const SurfaceTopology& t);

/// V - E of the 4-valent graph: one vertex per label, one edge per arc
/// between consecutive visits. Label-free curves contribute 0. Throws
/// MalformedSystemError when a label does not occur exactly twice.
int euler_char(const CurveSystem& cs);

struct EulerBound {
    bool holds = false;
    int slack = 0; ///< (-k + p(X)) - chi(G)
};

/// chi(G) <= -k + p(X) for the k curves of cs.
EulerBound check_euler_bound(const SurfaceTopology& t, const CurveSystem& cs);

struct JumpDown {
    bool holds = false;
    int chi_before = 0;    ///< chi(G), counting only intersections within cs
    int chi_after = 0;     ///< chi(G u gamma)
    int intersections = 0; ///< |G n gamma|, the labels shared by cs and gamma
};

/// chi(G u gamma) <= chi(G) - |G n gamma|, by direct recount. Labels shared by
/// cs and gamma must occur once in each; all others twice within one of them.
JumpDown check_jump_down(const CurveSystem& cs, const std::vector<int>& new_curve);

/// floor(173 (2g - 2 + n) / 2), i.e. floor(173 / (4 pi) * area). Throws DomainError unless chi < 0.
long nprime_upper_bound(const SurfaceTopology& t);

struct Constants {
    double min_reflection_polygon_area; ///< pi / 42
    double pants_chi_coefficient;       ///< p <= -(3/2) chi
};

Constants constants();

/// floor(area / (pi / 42)): disk components of area at least pi / 42 fitting in the area.
long disk_component_bound(double area);

/// floor(-(3/2) chi).
int pants_bound(int euler_characteristic);

/// Calls visit once for every curve system with 1..max_curves curves and
/// 0..max_labels labels, up to renaming of labels: labels are numbered in
/// order of first appearance. Curves may be label-free. Returns the count.
long enumerate_curve_systems(int max_curves, int max_labels, const std::function<void(const CurveSystem&)>& visit);

} // namespace hypnodal::bounds

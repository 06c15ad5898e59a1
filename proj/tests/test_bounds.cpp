#include <doctest.h>

#include "hypnodal/bounds.hpp"
#include "hypnodal/errors.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <set>

using namespace hypnodal;
using namespace hypnodal::bounds;

namespace {

constexpr double pi = std::numbers::pi;

// Oracle: build the graph explicitly. Vertices are the visited labels, edges
// the arcs between cyclically consecutive visits.
int recount_euler(const std::vector<std::vector<int>>& curves) {
    std::set<int> vertices;
    std::vector<std::pair<int, int>> arcs;
    for (const auto& c : curves)
        for (std::size_t i = 0; i < c.size(); ++i) {
            vertices.insert(c[i]);
            arcs.emplace_back(c[i], c[(i + 1) % c.size()]);
        }
    return static_cast<int>(vertices.size()) - static_cast<int>(arcs.size());
}

} // namespace

TEST_CASE("pants_number") {
    CHECK(pants_number({2, 0}) == 3);
    CHECK(pants_number({1, 1}) == 1);
    CHECK(pants_number({0, 3}) == 0);
    CHECK(pants_number({3, 2}) == 8);
    CHECK_THROWS_AS(pants_number({0, 2}), DomainError);
    CHECK_THROWS_AS(pants_number({1, 0}), DomainError);
    CHECK_THROWS_AS(pants_number({-1, 5}), DomainError);
}

TEST_CASE("euler_char") {
    CHECK(euler_char({{{}}}) == 0);
    CHECK(euler_char({{{7, 7}}}) == -1);
    CHECK(euler_char({{{1, 2}, {2, 1}}}) == -2);
    CHECK(euler_char({{{1, 2}, {1, 2}, {}}}) == -2);
    CHECK_THROWS_AS(euler_char({{{1, 2}}}), MalformedSystemError);
    CHECK_THROWS_AS(euler_char({{{1, 1, 1}}}), MalformedSystemError);
}

TEST_CASE("check_euler_bound") {
    auto r = check_euler_bound({2, 0}, {{{}, {}, {}}});
    CHECK(r.holds);
    CHECK(r.slack == 0);
    r = check_euler_bound({0, 3}, {{{1, 1}}});
    CHECK(r.holds);
    CHECK(r.slack == 0);
    r = check_euler_bound({2, 0}, {{{}}});
    CHECK(r.holds);
    CHECK(r.slack == 2);
    // Four disjoint curves cannot be pairwise non-homotopic on a genus two
    // surface; the arithmetic reports the failure.
    CHECK_FALSE(check_euler_bound({2, 0}, {{{}, {}, {}, {}}}).holds);
    CHECK_THROWS_AS(check_euler_bound({1, 0}, {{{}}}), DomainError);
}

TEST_CASE("check_jump_down") {
    const CurveSystem simple{{{}}};
    auto j = check_jump_down(simple, {});
    CHECK(j.holds);
    CHECK(j.chi_after == j.chi_before);
    CHECK(j.intersections == 0);

    j = check_jump_down({{{1, 2}}}, {1, 2});
    CHECK(j.holds);
    CHECK(j.chi_before == 0);
    CHECK(j.chi_after == -2);
    CHECK(j.intersections == 2);
    CHECK(j.chi_after == j.chi_before - j.intersections);

    j = check_jump_down(simple, {5, 5});
    CHECK(j.holds);
    CHECK(j.chi_after == j.chi_before - 1);
    CHECK(j.chi_after < j.chi_before - j.intersections);

    CHECK_THROWS_AS(check_jump_down({{{1, 1}}}, {1}), MalformedSystemError);
    CHECK_THROWS_AS(check_jump_down({{{}}}, {3}), MalformedSystemError);
}

TEST_CASE("nprime_upper_bound and constants") {
    CHECK(nprime_upper_bound({2, 0}) == 173);
    CHECK(nprime_upper_bound({1, 1}) == 86);
    CHECK(nprime_upper_bound({0, 3}) == 86);
    CHECK(SurfaceTopology{2, 0}.area() == doctest::Approx(4 * pi));
    for (int g = 0; g < 6; ++g)
        for (int n = 0; n < 6; ++n) {
            const SurfaceTopology t{g, n};
            if (t.euler_characteristic() >= 0)
                continue;
            // Same value as the real bound 173 / (4 pi) * area, floored.
            CHECK(nprime_upper_bound(t) == static_cast<long>(std::floor(173.0 / (4 * pi) * t.area() + 1e-9)));
            CHECK(nprime_upper_bound({g + 1, n}) > nprime_upper_bound(t));
            CHECK(nprime_upper_bound({g, n + 1}) > nprime_upper_bound(t));
            CHECK(pants_number(t) <= pants_bound(t.euler_characteristic()));
        }
    CHECK_THROWS_AS(nprime_upper_bound({0, 2}), DomainError);

    CHECK(constants().min_reflection_polygon_area == doctest::Approx(0.0747998).epsilon(1e-6));
    CHECK(constants().pants_chi_coefficient == 1.5);
    CHECK(disk_component_bound(4 * pi) == 168);
    CHECK(pants_bound(-2) == 3);
    CHECK(pants_bound(-1) == 1);
}

TEST_CASE("enumeration counts") {
    // Systems with V labels in k curves: (2V - 1)!! matchings times C(2V + k - 1, k - 1) splits.
    long expected = 0;
    for (long v = 0, matchings = 1; v <= 3; ++v, matchings *= 2 * v - 1)
        for (long k = 1; k <= 2; ++k)
            expected += matchings * (k == 1 ? 1 : 2 * v + 1);
    CHECK(enumerate_curve_systems(2, 3, [](const CurveSystem&) {}) == expected);
}

TEST_CASE("exhaustive check over small curve systems") {
    const std::vector<SurfaceTopology> surfaces{{0, 3}, {1, 1}, {2, 0}, {3, 0}, {2, 3}};
    long violations = 0, extensions = 0;
    const long systems = enumerate_curve_systems(3, 5, [&](const CurveSystem& cs) {
        const int chi = recount_euler(cs.curves);
        violations += euler_char(cs) != chi;
        const int k = static_cast<int>(cs.curve_count());
        for (const auto& t : surfaces) {
            const auto r = check_euler_bound(t, cs);
            violations += r.holds != (chi <= -k + pants_number(t));
            violations += r.slack != -k + pants_number(t) - chi;
            bool all_simple = true;
            for (const auto& c : cs.curves)
                all_simple = all_simple && c.empty();
            if (all_simple && r.slack == 0)
                violations += k != pants_number(t);
        }
        if (k >= 2) {
            CurveSystem rest{{cs.curves.begin(), cs.curves.end() - 1}};
            const auto j = check_jump_down(rest, cs.curves.back());
            ++extensions;
            violations += !j.holds;
            violations += j.chi_after != chi;
        }
    });
    CHECK(systems > 70000);
    CHECK(extensions > 0);
    CHECK(violations == 0);
}

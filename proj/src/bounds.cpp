#include "hypnodal/bounds.hpp"

#include "hypnodal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <fmt/format.h>

namespace hypnodal::bounds {

namespace {

void require_hyperbolic(const SurfaceTopology& t) {
    if (t.g < 0 || t.n < 0)
        throw DomainError(fmt::format("genus and punctures must be nonnegative, got ({}, {})", t.g, t.n));
    if (t.euler_characteristic() >= 0)
        throw DomainError(fmt::format("surface ({}, {}) has Euler characteristic {} >= 0", t.g, t.n,
                                      t.euler_characteristic()));
}

std::map<int, int> label_counts(const std::vector<std::vector<int>>& curves) {
    std::map<int, int> count;
    for (const auto& c : curves)
        for (int label : c)
            ++count[label];
    return count;
}

// V - E over the given curves, with only the labels in `vertices` as graph vertices.
int graph_euler(const std::vector<std::vector<int>>& curves, const std::map<int, int>& vertices) {
    int v = 0, e = 0;
    for (const auto& [label, count] : vertices)
        v += count > 0;
    for (const auto& c : curves)
        for (int label : c)
            e += vertices.contains(label);
    return v - e;
}

// Perfect matchings of the positions of seq, written as label sequences with
// labels in order of first appearance.
void matchings(std::vector<int>& seq, int next, const std::function<void()>& done) {
    auto free = std::find(seq.begin(), seq.end(), -1);
    if (free == seq.end()) {
        done();
        return;
    }
    *free = next;
    for (auto it = free + 1; it != seq.end(); ++it)
        if (*it == -1) {
            *it = next;
            matchings(seq, next + 1, done);
            *it = -1;
        }
    *free = -1;
}

// Splits of `total` into `parts` ordered nonnegative lengths.
void compositions(int total, int parts, std::vector<int>& out, const std::function<void()>& done) {
    if (parts == 1) {
        out.push_back(total);
        done();
        out.pop_back();
        return;
    }
    for (int k = 0; k <= total; ++k) {
        out.push_back(k);
        compositions(total - k, parts - 1, out, done);
        out.pop_back();
    }
}

} // namespace

double SurfaceTopology::area() const { return 2.0 * std::numbers::pi * (2 * g - 2 + n); }

int pants_number(const SurfaceTopology& t) {
    require_hyperbolic(t);
    return 3 * t.g - 3 + t.n;
}

int euler_char(const CurveSystem& cs) {
    const auto count = label_counts(cs.curves);
    for (const auto& [label, c] : count)
        if (c != 2)
            throw MalformedSystemError(fmt::format("label {} occurs {} times, expected 2", label, c));
    return graph_euler(cs.curves, count);
}

EulerBound check_euler_bound(const SurfaceTopology& t, const CurveSystem& cs) {
    const int bound = -static_cast<int>(cs.curve_count()) + pants_number(t);
    const int chi = euler_char(cs);
    return {chi <= bound, bound - chi};
}

JumpDown check_jump_down(const CurveSystem& cs, const std::vector<int>& new_curve) {
    const auto before = label_counts(cs.curves);
    const auto added = label_counts({new_curve});
    std::map<int, int> own;
    int shared = 0;
    for (const auto& [label, c] : before) {
        const auto it = added.find(label);
        const int total = c + (it == added.end() ? 0 : it->second);
        if (total != 2)
            throw MalformedSystemError(fmt::format("label {} occurs {} times, expected 2", label, total));
        if (c == 2)
            own[label] = 2;
        else
            ++shared;
    }
    for (const auto& [label, c] : added)
        if (!before.contains(label) && c != 2)
            throw MalformedSystemError(fmt::format("label {} occurs {} times, expected 2", label, c));

    CurveSystem all = cs;
    all.curves.push_back(new_curve);
    JumpDown out;
    out.chi_before = graph_euler(cs.curves, own);
    out.chi_after = euler_char(all);
    out.intersections = shared;
    out.holds = out.chi_after <= out.chi_before - shared;
    return out;
}

long nprime_upper_bound(const SurfaceTopology& t) {
    require_hyperbolic(t);
    return 173L * (2 * t.g - 2 + t.n) / 2;
}

Constants constants() { return {std::numbers::pi / 42.0, 1.5}; }

long disk_component_bound(double area) {
    // Guard the floor against rounding when area is an exact multiple.
    return static_cast<long>(std::floor(area / constants().min_reflection_polygon_area + 1e-9));
}

int pants_bound(int euler_characteristic) {
    return static_cast<int>(std::floor(-constants().pants_chi_coefficient * euler_characteristic + 1e-12));
}

long enumerate_curve_systems(int max_curves, int max_labels, const std::function<void(const CurveSystem&)>& visit) {
    long count = 0;
    for (int labels = 0; labels <= max_labels; ++labels) {
        std::vector<int> seq(static_cast<std::size_t>(2 * labels), -1);
        matchings(seq, 0, [&] {
            for (int k = 1; k <= max_curves; ++k) {
                std::vector<int> lengths;
                compositions(2 * labels, k, lengths, [&] {
                    CurveSystem cs;
                    auto it = seq.begin();
                    for (int len : lengths) {
                        cs.curves.emplace_back(it, it + len);
                        it += len;
                    }
                    ++count;
                    visit(cs);
                });
            }
        });
    }
    return count;
}

} // namespace hypnodal::bounds

// hypnodal: builds the octagon and pants eigenfunctions and prints the curve bounds.
//
// Exit codes: 0 success, 1 a numerical check or stage failed, 2 usage error.

#include "hypnodal/bounds.hpp"
#include "hypnodal/errors.hpp"
#include "hypnodal/io.hpp"
#include "hypnodal/nodal.hpp"
#include "hypnodal/surfglue.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>

#include <fmt/format.h>
#include <fmt/ostream.h>

using namespace hypnodal;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

struct RunConfig {
    double h_target = 0.05;
    int eigen_count = 1;
    double tol = 1e-8;
    std::string out_dir = "out";
    double boundary_length = 2.0;
    bool seedless = false;
};

struct StageFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Run {
public:
    explicit Run(const RunConfig& cfg) : cfg_(cfg) {
        fs::create_directories(cfg.out_dir);
        log_file_.open(fs::path(cfg.out_dir) / "run.log");
        if (!log_file_)
            throw StageFailure(fmt::format("cannot write to output directory {}", cfg.out_dir));
    }

    template <typename... Args>
    void say(fmt::format_string<Args...> f, Args&&... args) {
        const std::string line = fmt::format(f, std::forward<Args>(args)...);
        std::cout << line << '\n';
        log_file_ << line << '\n';
    }

    // Runs one stage; exceptions become a one-line diagnostic naming the stage.
    bool stage(const std::string& name, const std::function<void()>& body) {
        try {
            body();
            return true;
        } catch (const std::exception& e) {
            std::cerr << fmt::format("{}: {}", name, e.what()) << '\n';
            log_file_ << fmt::format("FAILED {}: {}", name, e.what()) << '\n';
            failed_ = true;
            return false;
        }
    }

    void check_at_most(const std::string& name, double value, double tolerance) {
        if (!checks.at_most(name, value, tolerance))
            std::cerr << fmt::format("check {} failed: {:.6g} > {:.6g}", name, value, tolerance) << '\n';
    }

    void check(const std::string& name, double value, double tolerance, bool passed) {
        if (!checks.record(name, value, tolerance, passed))
            std::cerr << fmt::format("check {} failed: value {:.6g}, tolerance {:.6g}", name, value, tolerance)
                      << '\n';
    }

    std::ofstream file(const std::string& name) const {
        std::ofstream os(fs::path(cfg_.out_dir) / name);
        if (!os)
            throw StageFailure(fmt::format("cannot write {}", name));
        return os;
    }

    int finish() {
        auto os = file("assertions.csv");
        checks.write(os);
        const bool ok = !failed_ && checks.all_passed();
        say("checks: {} passed of {}", std::count_if(checks.entries().begin(), checks.entries().end(),
                                                       [](const auto& e) { return e.passed; }),
            checks.entries().size());
        return ok ? 0 : 1;
    }

    io::AssertionLog checks;

private:
    const RunConfig& cfg_;
    std::ofstream log_file_;
    bool failed_ = false;
};

fem::SolverOptions solver_options(const RunConfig& cfg) {
    fem::SolverOptions opts;
    opts.tol = cfg.tol;
    return opts;
}

void write_values(std::ostream& os, const mesh::TriMesh& m, const fem::Vector& u) {
    io::write_mesh(os, m);
    fmt::print(os, "VALUES {}\n", u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i)
        fmt::print(os, "{:.17g}\n", u[i]);
}

std::vector<io::EigenRow> rows(const std::vector<fem::EigenPair>& pairs) {
    std::vector<io::EigenRow> out;
    for (const auto& p : pairs)
        out.push_back({p.lambda, p.residual});
    return out;
}

// Largest |f(x) + f(r x)| over nodes x whose mirror image r x is also a node.
double odd_symmetry_defect(const glue::ChartFunction& f, const geo::Isometry& r) {
    double worst = 0.0;
    for (std::size_t i = 0; i < f.mesh.nodes.size(); ++i) {
        const geo::Complex y = r.apply(f.mesh.nodes[i].z());
        for (std::size_t j = 0; j < f.mesh.nodes.size(); ++j)
            if (std::abs(f.mesh.nodes[j].z() - y) < 1e-12) {
                worst = std::max(worst, std::abs(f.values[static_cast<Eigen::Index>(i)] +
                                                 f.values[static_cast<Eigen::Index>(j)]));
                break;
            }
    }
    return worst;
}

int cmd_octagon_genus2(const RunConfig& cfg) {
    Run run(cfg);
    const auto opts = solver_options(cfg);
    const auto pent = geo::quarter_octagon_pentagon();
    const geo::Geodesic real_axis(pi, 0.0), imaginary_axis(-pi / 2, pi / 2);
    mesh::TriMesh m;
    std::vector<fem::EigenPair> pairs;
    glue::ExtendedSolution extended;
    glue::ChartFunction oct;
    std::vector<glue::PantsPattern> patterns;

    bool ok = run.stage("pentagon", [&] {
        m = mesh::triangulate(pent, cfg.h_target);
        const auto r = fem::reduce(fem::assemble_stiffness(m), fem::assemble_mass(m),
                                   fem::BCMap::from_labels(m, pent.labels()));
        pairs = fem::solve_eigen(r.K, r.M, cfg.eigen_count, opts);
        auto poly = run.file("pentagon.poly");
        io::write_polygon(poly, pent);
        auto mesh_out = run.file("pentagon_mesh.txt");
        io::write_mesh(mesh_out, m);
        auto csv = run.file("eigen.csv");
        io::write_eigen_csv(csv, rows(pairs), m.h, r.K.dimension());
        extended = glue::single_chart(pent, m, r.expand(pairs.front().vector), pairs.front().lambda);
        run.say("pentagon: {} nodes, h = {:.4g}, lambda_1 = {:.10f}", m.nodes.size(), m.h, pairs.front().lambda);
    });
    ok = ok && run.stage("octagon", [&] {
        extended = glue::schwarz_extend(glue::schwarz_extend(extended, real_axis, glue::Parity::Odd),
                                        imaginary_axis, glue::Parity::Odd);
        oct = glue::flatten(extended, geo::regular_right_polygon(8, pi / 2));
        const double residual = glue::verify_extension(extended);
        run.check_at_most("octagon_extension_residual", residual, 10 * cfg.tol);
        run.check_at_most("odd_symmetry_real_axis", odd_symmetry_defect(oct, geo::reflect_in(real_axis)), 1e-10);
        run.check_at_most("odd_symmetry_imaginary_axis", odd_symmetry_defect(oct, geo::reflect_in(imaginary_axis)),
                          1e-10);
        auto os = run.file("octagon_extension.txt");
        write_values(os, oct.mesh, oct.values);
        run.say("octagon: charts: {}, extension residual {:.3g}", extended.surface.charts().size(), residual);
    });
    ok = ok && run.stage("pants search", [&] {
        patterns = glue::search_pants_gluing(oct);
        auto os = run.file("pants_search.txt");
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            const auto& p = patterns[i];
            fmt::print(os, "pattern {}", i);
            for (const auto& sp : p.pairs)
                fmt::print(os, " {}-{} {}", sp.first, sp.second, sp.reversed ? "reversed" : "direct");
            fmt::print(os, " compatibility {:.3e}\n", p.compatibility);
        }
        run.check("pants_patterns_found", static_cast<double>(patterns.size()), 1.0, !patterns.empty());
        run.say("pants search: {} pattern(s)", patterns.size());
    });
    ok = ok && run.stage("genus 2", [&] {
        if (patterns.empty())
            throw StageFailure("no pants gluing pattern to double");
        const glue::ExtendedSolution pants{patterns.front().surface, oct.mesh, oct.values, oct.lambda};
        const auto closed = glue::double_surface(
            pants, {glue::CircleRule::Even, glue::CircleRule::Even, glue::CircleRule::Even});
        const auto t = closed.surface.topology();
        run.check("genus2_euler_characteristic", t.euler_characteristic, -2, t.euler_characteristic == -2);
        const double residual = glue::verify_extension(closed);
        run.check_at_most("genus2_residual", residual, 10 * cfg.tol);
        auto os = run.file("genus2_surface.txt");
        io::write_surface(os, closed.surface, "octagon");
        run.say("genus 2: charts: {}, chi = {}, genus {}, residual {:.3g}", closed.surface.charts().size(),
                t.euler_characteristic, t.genus(), residual);
    });
    ok = ok && run.stage("nodal", [&] {
        const auto ns = nodal::extract_nodal(oct.mesh, oct.values);
        const auto full = nodal::maximal_components(ns);
        double dev_real = INFINITY, dev_imaginary = INFINITY;
        for (const auto& line : full.components) {
            dev_real = std::min(dev_real, nodal::geodesic_deviation(line, real_axis));
            dev_imaginary = std::min(dev_imaginary, nodal::geodesic_deviation(line, imaginary_axis));
        }
        run.check("nodal_components", static_cast<double>(full.components.size()), 2.0,
                  full.components.size() == 2);
        run.check_at_most("nodal_deviation_real_axis", dev_real, 2 * oct.mesh.h);
        run.check_at_most("nodal_deviation_imaginary_axis", dev_imaginary, 2 * oct.mesh.h);
        const auto hits = nodal::self_intersections(full);
        run.check("nodal_self_intersections", static_cast<double>(hits.size()), 1.0, hits.size() == 1);
        if (!hits.empty()) {
            run.check_at_most("crossing_distance_to_center", std::abs(hits[0].point.z()), oct.mesh.h);
            run.check_at_most("crossing_angle_error", std::abs(hits[0].angle - pi / 2), 0.05);
        }
        auto os = run.file("nodal.txt");
        io::write_nodal(os, full);
        io::SvgScene scene{{oct.polygon}, {real_axis, imaginary_axis}, full.components};
        auto svg = run.file("figure.svg");
        io::write_svg(svg, scene);
        run.say("nodal: {} components, deviation {:.3g} / {:.3g}, {} crossing(s)", full.components.size(),
                dev_real, dev_imaginary, hits.size());
    });
    return run.finish();
}

int cmd_pants_genus3(const RunConfig& cfg) {
    Run run(cfg);
    const auto opts = solver_options(cfg);
    glue::Genus3Result g;
    run.stage("genus 3", [&] {
        g = glue::build_genus3(cfg.boundary_length, cfg.h_target, opts);
        const auto& pants = g.pants.surface.charts().front().polygon;
        const double circle[3] = {pants.side_length(0), pants.side_length(2) + pants.side_length(6),
                                  pants.side_length(4)};
        for (int k = 0; k < 3; ++k)
            run.check_at_most(fmt::format("boundary_length_{}", k), std::abs(circle[k] - cfg.boundary_length), 1e-9);
        const auto sys = glue::assemble_glued(g.pants.surface, g.pants.base_mesh);
        const auto pairs = fem::solve_eigen(sys.K, sys.M, cfg.eigen_count, opts);
        auto poly = run.file("pants.poly");
        io::write_polygon(poly, pants);
        auto mesh_out = run.file("pants_mesh.txt");
        io::write_mesh(mesh_out, g.pants.base_mesh);
        auto csv = run.file("eigen.csv");
        io::write_eigen_csv(csv, rows(pairs), g.pants.base_mesh.h, sys.dof_count);

        const auto t = g.solution.surface.topology();
        run.check("genus3_charts", static_cast<double>(g.solution.surface.charts().size()), 4.0,
                  g.solution.surface.charts().size() == 4);
        run.check("genus3_euler_characteristic", t.euler_characteristic, -4, t.euler_characteristic == -4);
        const double residual = glue::verify_extension(g.solution);
        run.check_at_most("genus3_residual", residual, 10 * cfg.tol);
        auto surf = run.file("genus3_surface.txt");
        io::write_surface(surf, g.solution.surface, "pants");
        run.say("pants: L = {}, lambda_1 = {:.10f}", cfg.boundary_length, g.pants.lambda);
        run.say("charts: {}", g.solution.surface.charts().size());
        run.say("chi = {}, genus {}, residual {:.3g}", t.euler_characteristic, t.genus(), residual);

        // The vanishing circles are the two halves of the Dirichlet boundary of P,
        // seen in the pants chart.
        const auto ns = nodal::maximal_components(nodal::extract_nodal(g.pants.base_mesh, g.pants.base_values));
        const double h = g.pants.base_mesh.h;
        for (int side : {2, 6}) {
            double dev = INFINITY;
            for (const auto& line : ns.components)
                dev = std::min(dev, nodal::geodesic_deviation(line, pants.side_geodesic(side)));
            run.check_at_most(fmt::format("vanishing_circle_side_{}_deviation", side), dev, 2 * h);
            run.say("vanishing circle along side {}: deviation {:.3g}", side, dev);
        }
        const auto hits = nodal::self_intersections(ns);
        run.check("vanishing_circle_self_intersections", static_cast<double>(hits.size()), 0.0, hits.empty());
        auto nodal_out = run.file("nodal.txt");
        io::write_nodal(nodal_out, ns);
        io::SvgScene scene{{pants}, {}, ns.components};
        auto svg = run.file("figure.svg");
        io::write_svg(svg, scene);
    });
    return run.finish();
}

int cmd_bounds(int g, int n) {
    const bounds::SurfaceTopology t{g, n};
    if (g < 0 || n < 0 || t.euler_characteristic() >= 0) {
        std::cerr << fmt::format("bounds: (g, n) = ({}, {}) has Euler characteristic {}; need a negative value",
                                 g, n, t.euler_characteristic())
                  << '\n';
        return 2;
    }
    std::cout << io::bounds_row(t) << '\n';
    return 0;
}

void add_common(CLI::App* cmd, RunConfig& cfg, double default_h) {
    cfg.h_target = default_h;
    cmd->add_option("--h-target", cfg.h_target, "Largest mesh edge length")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--eigen-count", cfg.eigen_count, "Number of eigenpairs in eigen.csv")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--tol", cfg.tol, "Eigensolver residual tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--out-dir", cfg.out_dir, "Directory for the output files")->capture_default_str();
    cmd->add_flag("--seedless", cfg.seedless, "Accepted for compatibility; every run is deterministic");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eigenfunctions vanishing on geodesics of hyperbolic surfaces"};
    app.require_subcommand(1);

    RunConfig oct_cfg, pants_cfg;
    auto* oct = app.add_subcommand("octagon-genus2", "Octagon from four pentagons, pants search and genus 2 double");
    add_common(oct, oct_cfg, 0.05);
    auto* pants = app.add_subcommand("pants-genus3", "Pants eigenfunction glued into a genus 3 surface");
    add_common(pants, pants_cfg, 0.1);
    pants->add_option("--boundary-length", pants_cfg.boundary_length, "Length L of the three boundary geodesics")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    int g = 0, n = 0;
    auto* bnd = app.add_subcommand("bounds", "Print g,n,area,pants_number,nprime_bound");
    bnd->add_option("g", g, "Genus")->required();
    bnd->add_option("n", n, "Number of punctures")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*oct)
            return cmd_octagon_genus2(oct_cfg);
        if (*pants)
            return cmd_pants_genus3(pants_cfg);
        return cmd_bounds(g, n);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
}

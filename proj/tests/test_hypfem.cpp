#include <doctest.h>

#include "hypnodal/errors.hpp"
#include "hypnodal/hypfem.hpp"

#include <cmath>
#include <random>

using namespace hypnodal;
using namespace hypnodal::geo;
using namespace hypnodal::fem;
using mesh::TriMesh;

namespace {

double euclidean_area(const TriMesh& m) {
    double a = 0.0;
    for (const auto& t : m.triangles) {
        const auto &p = m.nodes[t[0]], &q = m.nodes[t[1]], &r = m.nodes[t[2]];
        a += 0.5 * ((q.x - p.x) * (r.y - p.y) - (r.x - p.x) * (q.y - p.y));
    }
    return a;
}

// Cotangent formula, assembled independently of element_stiffness.
Eigen::MatrixXd cotangent_stiffness(const TriMesh& m) {
    const int n = static_cast<int>(m.nodes.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    for (const auto& t : m.triangles)
        for (int k = 0; k < 3; ++k) {
            const int o = t[k], i = t[(k + 1) % 3], j = t[(k + 2) % 3];
            const Complex u = m.nodes[i].z() - m.nodes[o].z();
            const Complex v = m.nodes[j].z() - m.nodes[o].z();
            const double cot = (u * std::conj(v)).real() / std::abs((std::conj(u) * v).imag());
            K(i, j) -= 0.5 * cot;
            K(j, i) -= 0.5 * cot;
            K(i, i) += 0.5 * cot;
            K(j, j) += 0.5 * cot;
        }
    return K;
}

// Six-point degree-4 rule on each triangle for the integral of the area weight.
double quadrature_area(const TriMesh& m) {
    static const double w1 = 0.223381589678011, w2 = 0.109951743655322;
    static const double a1 = 0.445948490915965, a2 = 0.091576213509771;
    double total = 0.0;
    for (const auto& t : m.triangles) {
        const Complex p = m.nodes[t[0]].z(), q = m.nodes[t[1]].z(), r = m.nodes[t[2]].z();
        const double area = 0.5 * std::abs(((q - p) * std::conj(r - p)).imag());
        auto at = [&](double l0, double l1) {
            return area_weight(DiskPoint::from(l0 * p + l1 * q + (1.0 - l0 - l1) * r));
        };
        double s = 0.0;
        for (auto [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
            const double b = 1.0 - 2.0 * a;
            s += w * (at(a, a) + at(a, b) + at(b, a));
        }
        total += area * s;
    }
    return total;
}

std::vector<EigenPair> solve(const TriMesh& m, const std::vector<SideLabel>& labels, int count,
                             const SolverOptions& opts = {}) {
    const auto K = assemble_stiffness(m);
    const auto M = assemble_mass(m);
    const auto r = reduce(K, M, BCMap::from_labels(m, labels));
    return solve_eigen(r.K, r.M, count, opts);
}

std::vector<SideLabel> all(std::size_t n, SideLabel l) { return std::vector<SideLabel>(n, l); }

} // namespace

TEST_CASE("element stiffness of the reference triangle") {
    const Eigen::Matrix3d k = element_stiffness({0, 0}, {1, 0}, {0, 1});
    Eigen::Matrix3d expected;
    expected << 1, -0.5, -0.5, -0.5, 0.5, 0, -0.5, 0, 0.5;
    CHECK((k - expected).norm() < 1e-15);
    CHECK_THROWS_AS(element_stiffness({0, 0}, {1, 0}, {2, 0}), AssemblyError);
    CHECK_THROWS_AS(element_stiffness({0, 0}, {0, 1}, {1, 0}), AssemblyError);
}

TEST_CASE("stiffness matrix properties") {
    const TriMesh m = mesh::triangulate(quarter_octagon_pentagon(), 0.1);
    const auto K = assemble_stiffness(m);
    const Vector ones = Vector::Ones(K.dimension());
    CHECK((K * ones).lpNorm<Eigen::Infinity>() < 1e-12);

    const Eigen::MatrixXd Kd(K.matrix());
    CHECK((Kd - Kd.transpose()).norm() < 1e-14);
    CHECK((Kd - cotangent_stiffness(m)).lpNorm<Eigen::Infinity>() < 1e-11);

    // Linear functions are reproduced exactly: the energy of u = x is the Euclidean area.
    Vector x(K.dimension());
    for (int i = 0; i < x.size(); ++i)
        x[i] = m.nodes[i].x;
    CHECK(K.quadratic_form(x) == doctest::Approx(euclidean_area(m)).epsilon(1e-12));

    std::mt19937 rng(7);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 10; ++trial) {
        Vector u(K.dimension());
        for (int i = 0; i < u.size(); ++i)
            u[i] = g(rng);
        CHECK(K.quadratic_form(u) >= 0.0);
    }
}

TEST_CASE("stiffness is invariant under rotations about the origin") {
    // Rotations are isometries of both metrics, so the discrete energy is exactly invariant.
    const TriMesh m = mesh::triangulate(pants_polygon(2.0), 0.2);
    const TriMesh r = mesh::transport_mesh(m, Isometry::rotation(0.83));
    Vector u(static_cast<int>(m.nodes.size()));
    for (int i = 0; i < u.size(); ++i)
        u[i] = std::sin(3.0 * m.nodes[i].x) + m.nodes[i].y * m.nodes[i].y;
    CHECK(assemble_stiffness(r).quadratic_form(u) ==
          doctest::Approx(assemble_stiffness(m).quadratic_form(u)).epsilon(1e-12));
}

TEST_CASE("degenerate triangles are reported") {
    TriMesh m = mesh::triangulate(quarter_octagon_pentagon(), 0.5);
    m.nodes[m.triangles[2][0]] = m.nodes[m.triangles[2][1]];
    try {
        assemble_stiffness(m);
        FAIL("expected AssemblyError");
    } catch (const AssemblyError& e) {
        CHECK(std::string(e.what()).find("triangle") != std::string::npos);
    }
}

TEST_CASE("mass matrix and hyperbolic area") {
    SUBCASE("tiny triangle at the origin") {
        TriMesh m;
        m.nodes = {{0, 0}, {1e-4, 0}, {0, 1e-4}};
        m.triangles = {{0, 1, 2}};
        CHECK(hyperbolic_area(m) == doctest::Approx(4.0 * 0.5e-8).epsilon(1e-7));
    }
    SUBCASE("totals converge to the polygon area") {
        const auto oct = regular_right_polygon(8, kPi / 2);
        const TriMesh mo = mesh::triangulate(oct, 0.05);
        CHECK(hyperbolic_area(mo) == doctest::Approx(2.0 * kPi).epsilon(1e-3));
        const TriMesh mp = mesh::triangulate(quarter_octagon_pentagon(), 0.03);
        CHECK(hyperbolic_area(mp) == doctest::Approx(kPi / 2).epsilon(1e-3));
    }
    SUBCASE("area error is second order and agrees with a high-order rule") {
        const auto p = quarter_octagon_pentagon();
        TriMesh m = mesh::triangulate(p, 0.1);
        std::vector<double> err;
        for (int level = 0; level < 3; ++level) {
            err.push_back(hyperbolic_area(m) - polygon_area(p));
            CHECK(std::abs(hyperbolic_area(m) - quadrature_area(m)) < 2.0 * std::abs(err.back()) + 1e-12);
            m = mesh::refine(m);
        }
        CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.15));
        CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.15));
    }
    SUBCASE("symmetric with nonnegative entries") {
        const TriMesh m = mesh::triangulate(pants_polygon(2.0), 0.3);
        const Eigen::MatrixXd M(assemble_mass(m).matrix());
        CHECK((M - M.transpose()).norm() < 1e-14);
        CHECK(M.minCoeff() >= 0.0);
    }
}

TEST_CASE("boundary conditions and reduction") {
    const auto p = quarter_octagon_pentagon();
    const TriMesh m = mesh::triangulate(p, 0.2);
    const auto K = assemble_stiffness(m);
    const auto M = assemble_mass(m);

    const BCMap bc = BCMap::from_labels(m, p.labels());
    // Dirichlet wins at corners shared with a Neumann side.
    CHECK(bc.constrained[m.corners[1]]);
    CHECK(bc.constrained[m.corners[4]]);
    CHECK_FALSE(bc.constrained[m.corners[2]]);
    CHECK(bc.constrained_count() == m.side_nodes(0).size() + m.side_nodes(4).size() - 1);
    CHECK_THROWS_AS(BCMap::from_labels(m, {SideLabel::dirichlet()}), DimensionError);

    const auto r = reduce(K, M, bc);
    CHECK(r.K.dimension() == static_cast<int>(m.nodes.size() - bc.constrained_count()));
    CHECK(r.full_dimension == static_cast<int>(m.nodes.size()));
    Vector v = Vector::LinSpaced(r.K.dimension(), 1.0, 2.0);
    const Vector full = r.expand(v);
    CHECK((r.restrict_to_free(full) - v).norm() == 0.0);
    for (std::size_t i = 0; i < m.nodes.size(); ++i)
        if (bc.constrained[i])
            CHECK(full[static_cast<int>(i)] == 0.0);

    const auto all_free = reduce(K, M, BCMap::all_free(m.nodes.size()));
    CHECK(all_free.K.dimension() == K.dimension());
    CHECK_THROWS_AS(reduce(K, M, BCMap{std::vector<bool>(m.nodes.size(), true)}), EmptySystemError);
    CHECK_THROWS_AS(reduce(K, M, BCMap::all_free(3)), DimensionError);
}

TEST_CASE("Neumann ground state is the constant") {
    const TriMesh m = mesh::triangulate(regular_right_polygon(8, kPi / 2), 0.15);
    const auto pairs = solve(m, all(8, SideLabel::neumann()), 2);
    CHECK(std::abs(pairs[0].lambda) < 1e-8);
    const Vector& u = pairs[0].vector;
    CHECK(u.maxCoeff() - u.minCoeff() < 1e-6 * u.cwiseAbs().maxCoeff());
    CHECK(pairs[1].lambda > 0.1);
}

TEST_CASE("Dirichlet eigenvalues exceed the bottom of the hyperbolic spectrum") {
    const TriMesh m = mesh::triangulate(regular_right_polygon(8, kPi / 2), 0.15);
    const auto pairs = solve(m, all(8, SideLabel::dirichlet()), 3);
    CHECK(pairs[0].lambda > 0.25);
    CHECK(pairs[0].lambda < pairs[1].lambda);
}

TEST_CASE("small square approaches the Euclidean eigenvalue") {
    // Near the origin the metric is 4|dz|^2, so lambda ~ (2 pi^2 / s^2) / 4.
    const double s = 0.01;
    const HyperbolicPolygon sq({{-s / 2, -s / 2}, {s / 2, -s / 2}, {s / 2, s / 2}, {-s / 2, s / 2}}, {});
    const TriMesh m = mesh::triangulate(sq, s / 40);
    const auto pairs = solve(m, all(4, SideLabel::dirichlet()), 1);
    CHECK(pairs[0].lambda == doctest::Approx(2.0 * kPi * kPi / (s * s) / 4.0).epsilon(3e-3));
}

TEST_CASE("more Dirichlet sides never lower the first eigenvalue") {
    const auto p = quarter_octagon_pentagon();
    const TriMesh m = mesh::triangulate(p, 0.1);
    std::vector<SideLabel> labels = all(5, SideLabel::neumann());
    double previous = -1.0;
    for (int k = 0; k < 5; ++k) {
        labels[k] = SideLabel::dirichlet();
        const double lambda = solve(m, labels, 1)[0].lambda;
        CHECK(lambda >= previous - 1e-10);
        previous = lambda;
    }
}

TEST_CASE("solver output contract") {
    const auto p = quarter_octagon_pentagon();
    const TriMesh m = mesh::triangulate(p, 0.05);
    const auto K = assemble_stiffness(m);
    const auto M = assemble_mass(m);
    const auto r = reduce(K, M, BCMap::from_labels(m, p.labels()));
    REQUIRE(r.K.dimension() > SolverOptions{}.dense_threshold);

    const auto sparse = solve_eigen(r.K, r.M, 4);
    SolverOptions dense_opts;
    dense_opts.dense_threshold = r.K.dimension();
    const auto dense = solve_eigen(r.K, r.M, 4, dense_opts);
    for (int i = 0; i < 4; ++i) {
        CHECK(sparse[i].lambda == doctest::Approx(dense[i].lambda).epsilon(1e-9));
        CHECK(sparse[i].residual <= 1e-8);
        CHECK(eigen_residual(r.K, r.M, sparse[i]) <= 1e-8);
        Eigen::Index at;
        sparse[i].vector.cwiseAbs().maxCoeff(&at);
        CHECK(sparse[i].vector[at] > 0.0);
        if (i > 0)
            CHECK(sparse[i].lambda >= sparse[i - 1].lambda);
        for (int j = 0; j < 4; ++j) {
            const double ip = sparse[i].vector.dot(r.M * sparse[j].vector);
            CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-10);
        }
    }
    const auto again = solve_eigen(r.K, r.M, 4);
    for (int i = 0; i < 4; ++i)
        CHECK((again[i].vector - sparse[i].vector).norm() == 0.0);

    CHECK_THROWS_AS(solve_eigen(r.K, r.M, 0), DimensionError);
    CHECK_THROWS_AS(solve_eigen(r.K, r.M, r.K.dimension() + 1), DimensionError);
}

TEST_CASE("mixed pentagon eigenvalue converges at second order") {
    const auto p = quarter_octagon_pentagon();
    TriMesh m = mesh::refine(mesh::refine(mesh::triangulate(p, 10.0)));
    std::vector<double> lambda;
    for (int level = 2; level <= 6; ++level) {
        lambda.push_back(solve(m, p.labels(), 1)[0].lambda);
        m = mesh::refine(m);
    }
    const double r1 = (lambda[2] - lambda[3]) / (lambda[3] - lambda[4]);
    CHECK(r1 > 3.0);
    CHECK(r1 < 5.0);
    CHECK(lambda[4] == doctest::Approx(3.8388873).epsilon(1e-5));
}

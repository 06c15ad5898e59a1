#include "hypnodal/hypfem.hpp"

#include "hypnodal/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace hypnodal::fem {

using geo::DiskPoint;
using Triplet = Eigen::Triplet<double>;

SymmetricSparseMatrix::SymmetricSparseMatrix(int dimension, const std::vector<Triplet>& triplets)
    : m_(dimension, dimension) {
    m_.setFromTriplets(triplets.begin(), triplets.end());
    m_.makeCompressed();
}

SymmetricSparseMatrix::SymmetricSparseMatrix(SparseMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
        throw DimensionError("symmetric matrix must be square");
    m_.makeCompressed();
}

BCMap BCMap::from_labels(const mesh::TriMesh& m, const std::vector<geo::SideLabel>& labels) {
    if (labels.size() != m.side_count())
        throw DimensionError("BCMap: one label per polygon side required");
    BCMap bc = all_free(m.nodes.size());
    for (const auto& e : m.boundary_edges) {
        if (labels[e.side].kind == geo::SideLabel::Kind::Dirichlet) {
            bc.constrained[e.a] = true;
            bc.constrained[e.b] = true;
        }
    }
    return bc;
}

std::size_t BCMap::constrained_count() const {
    return static_cast<std::size_t>(std::count(constrained.begin(), constrained.end(), true));
}

Vector ReducedSystem::expand(const Vector& reduced) const {
    if (reduced.size() != static_cast<Eigen::Index>(free_nodes.size()))
        throw DimensionError("expand: vector does not match the reduced dimension");
    Vector full = Vector::Zero(full_dimension);
    for (std::size_t i = 0; i < free_nodes.size(); ++i)
        full[free_nodes[i]] = reduced[static_cast<Eigen::Index>(i)];
    return full;
}

Vector ReducedSystem::restrict_to_free(const Vector& full) const {
    if (full.size() != full_dimension)
        throw DimensionError("restrict_to_free: vector does not match the full dimension");
    Vector r(static_cast<Eigen::Index>(free_nodes.size()));
    for (std::size_t i = 0; i < free_nodes.size(); ++i)
        r[static_cast<Eigen::Index>(i)] = full[free_nodes[i]];
    return r;
}

Eigen::Matrix3d element_stiffness(const DiskPoint& a, const DiskPoint& b, const DiskPoint& c) {
    const std::array<DiskPoint, 3> p{a, b, c};
    const double area = 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
    if (!(area > 0.0))
        throw AssemblyError(fmt::format("element_stiffness: non-positive area {}", area));
    // e_i is the edge opposite vertex i; grad phi_i is e_i rotated by 90 degrees over 2A.
    std::array<Eigen::Vector2d, 3> e;
    for (int i = 0; i < 3; ++i) {
        const auto& s = p[(i + 1) % 3];
        const auto& t = p[(i + 2) % 3];
        e[i] = {t.x - s.x, t.y - s.y};
    }
    Eigen::Matrix3d k;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            k(i, j) = e[i].dot(e[j]) / (4.0 * area);
    return k;
}

SymmetricSparseMatrix assemble_stiffness(const mesh::TriMesh& m) {
    std::vector<Triplet> trip;
    trip.reserve(9 * m.triangles.size());
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        Eigen::Matrix3d k;
        try {
            k = element_stiffness(m.nodes[tri[0]], m.nodes[tri[1]], m.nodes[tri[2]]);
        } catch (const AssemblyError&) {
            throw AssemblyError(fmt::format("assemble_stiffness: triangle {} ({}, {}, {}) is degenerate", t,
                                            tri[0], tri[1], tri[2]));
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trip.emplace_back(tri[i], tri[j], k(i, j));
    }
    return {static_cast<int>(m.nodes.size()), trip};
}

SymmetricSparseMatrix assemble_mass(const mesh::TriMesh& m) {
    for (const auto& p : m.nodes)
        geo::require_in_disk(p, "mesh node");
    std::vector<Triplet> trip;
    trip.reserve(12 * m.triangles.size());
    for (const auto& tri : m.triangles) {
        const auto& a = m.nodes[tri[0]];
        const auto& b = m.nodes[tri[1]];
        const auto& c = m.nodes[tri[2]];
        const double area = 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
        // Edge-midpoint rule: basis functions are 1/2 on the two ends of each edge.
        for (int q = 0; q < 3; ++q) {
            const int i = tri[q];
            const int j = tri[(q + 1) % 3];
            const auto& p = m.nodes[i];
            const auto& r = m.nodes[j];
            const double w = geo::area_weight({0.5 * (p.x + r.x), 0.5 * (p.y + r.y)}) * area / 12.0;
            trip.emplace_back(i, i, w);
            trip.emplace_back(j, j, w);
            trip.emplace_back(i, j, w);
            trip.emplace_back(j, i, w);
        }
    }
    return {static_cast<int>(m.nodes.size()), trip};
}

double hyperbolic_area(const mesh::TriMesh& m) {
    const auto M = assemble_mass(m);
    const Vector one = Vector::Ones(M.dimension());
    return M.quadratic_form(one);
}

ReducedSystem reduce(const SymmetricSparseMatrix& K, const SymmetricSparseMatrix& M, const BCMap& bc) {
    const int n = K.dimension();
    if (M.dimension() != n || static_cast<int>(bc.constrained.size()) != n)
        throw DimensionError("reduce: matrix and boundary map dimensions disagree");
    ReducedSystem r;
    r.full_dimension = n;
    std::vector<int> slot(n, -1);
    for (int i = 0; i < n; ++i) {
        if (!bc.constrained[i]) {
            slot[i] = static_cast<int>(r.free_nodes.size());
            r.free_nodes.push_back(i);
        }
    }
    if (r.free_nodes.empty())
        throw EmptySystemError("reduce: every node is constrained");
    auto pick = [&](const SparseMatrix& A) {
        std::vector<Triplet> trip;
        trip.reserve(static_cast<std::size_t>(A.nonZeros()));
        for (int col = 0; col < A.outerSize(); ++col)
            for (SparseMatrix::InnerIterator it(A, col); it; ++it)
                if (slot[it.row()] >= 0 && slot[it.col()] >= 0)
                    trip.emplace_back(slot[it.row()], slot[it.col()], it.value());
        return SymmetricSparseMatrix(static_cast<int>(r.free_nodes.size()), trip);
    };
    r.K = pick(K.matrix());
    r.M = pick(M.matrix());
    return r;
}

double eigen_residual(const SymmetricSparseMatrix& K, const SymmetricSparseMatrix& M, double lambda,
                      const Vector& u) {
    if (K.dimension() != M.dimension() || u.size() != K.dimension())
        throw DimensionError(fmt::format("eigen_residual: dimensions K={}, M={}, u={}", K.dimension(),
                                         M.dimension(), u.size()));
    const double unorm = std::sqrt(M.quadratic_form(u));
    if (!(unorm > 0.0))
        throw DegenerateInputError("eigen_residual: zero vector");
    return (K * u - lambda * (M * u)).norm() / unorm;
}

double eigen_residual(const SymmetricSparseMatrix& K, const SymmetricSparseMatrix& M, const EigenPair& pair) {
    return eigen_residual(K, M, pair.lambda, pair.vector);
}

namespace {

void fix_sign(Vector& v) {
    Eigen::Index idx = 0;
    v.cwiseAbs().maxCoeff(&idx);
    if (v[idx] < 0.0)
        v = -v;
}

std::vector<EigenPair> solve_dense(const SymmetricSparseMatrix& K, const SymmetricSparseMatrix& M, int count) {
    const Eigen::MatrixXd Kd(K.matrix());
    const Eigen::MatrixXd Md(M.matrix());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kd, Md);
    if (es.info() != Eigen::Success)
        throw SolverError("dense generalized eigensolver failed", std::numeric_limits<double>::infinity());
    std::vector<EigenPair> out;
    for (int i = 0; i < count; ++i) {
        EigenPair p;
        p.lambda = es.eigenvalues()[i];
        p.vector = es.eigenvectors().col(i);
        p.vector /= std::sqrt(M.quadratic_form(p.vector));
        fix_sign(p.vector);
        p.residual = eigen_residual(K, M, p);
        out.push_back(std::move(p));
    }
    return out;
}

// Two passes of modified Gram-Schmidt in the M inner product. Columns that
// vanish are replaced by a fresh deterministic vector.
void m_orthonormalize(Eigen::MatrixXd& Q, const SparseMatrix& M) {
    const Eigen::Index n = Q.rows();
    for (Eigen::Index j = 0; j < Q.cols(); ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            const Vector mq = M * Q.col(j);
            for (Eigen::Index i = 0; i < j; ++i)
                Q.col(j) -= Q.col(i).dot(mq) * Q.col(i);
        }
        double nrm = std::sqrt(Q.col(j).dot(M * Q.col(j)));
        if (!(nrm > 1e-300)) {
            for (Eigen::Index r = 0; r < n; ++r)
                Q(r, j) = std::cos(1.618033988749895 * static_cast<double>((r + 3) * (j + 7)));
            --j;
            continue;
        }
        Q.col(j) /= nrm;
    }
}

} // namespace

std::vector<EigenPair> solve_eigen(const SymmetricSparseMatrix& K, const SymmetricSparseMatrix& M, int count,
                                   const SolverOptions& opts) {
    const int n = K.dimension();
    if (M.dimension() != n)
        throw DimensionError("solve_eigen: K and M dimensions differ");
    if (count < 1 || count > n)
        throw DimensionError(fmt::format("solve_eigen: need 1 <= count <= {} (got {})", n, count));
    if (n <= opts.dense_threshold)
        return solve_dense(K, M, count);

    const SparseMatrix shifted = K.matrix() - opts.shift * M.matrix();
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(shifted);
    if (ldlt.info() != Eigen::Success)
        throw SolverError("solve_eigen: factorization of K - shift*M failed",
                          std::numeric_limits<double>::infinity());

    // Block start: the ones vector followed by fixed trigonometric sequences.
    const int block = std::min(n, std::max(2 * count, count + 10));
    Eigen::MatrixXd Q(n, block);
    Q.col(0).setOnes();
    for (int j = 1; j < block; ++j)
        for (int r = 0; r < n; ++r)
            Q(r, j) = std::sin(0.7548776662466927 * (r + 1) * j + 0.5 * j) +
                      std::cos(0.5698402909980532 * (r + 1) * (j + 1));
    m_orthonormalize(Q, M.matrix());

    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd theta;
    for (int it = 0; it < opts.max_iterations; ++it) {
        Eigen::MatrixXd Y = ldlt.solve(M.matrix() * Q);
        m_orthonormalize(Y, M.matrix());
        const Eigen::MatrixXd KY = K.matrix() * Y;
        Eigen::MatrixXd T = Y.transpose() * KY;
        T = 0.5 * (T + T.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        theta = es.eigenvalues();
        Q = Y * es.eigenvectors();

        double worst = 0.0;
        const Eigen::MatrixXd KQ = KY * es.eigenvectors();
        for (int i = 0; i < count; ++i) {
            const double r = (KQ.col(i) - theta[i] * (M.matrix() * Q.col(i))).norm();
            worst = std::max(worst, r);
        }
        best = std::min(best, worst);
        if (worst <= opts.tol)
            break;
        if (it + 1 == opts.max_iterations)
            throw SolverError(fmt::format("solve_eigen: no convergence after {} iterations (residual {})",
                                          opts.max_iterations, best),
                              best);
    }

    std::vector<EigenPair> out;
    for (int i = 0; i < count; ++i) {
        EigenPair p;
        p.lambda = theta[i];
        p.vector = Q.col(i);
        fix_sign(p.vector);
        p.residual = eigen_residual(K, M, p);
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace hypnodal::fem

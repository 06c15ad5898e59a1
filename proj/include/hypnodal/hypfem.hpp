#pragma once

// P1 finite elements for the hyperbolic Laplace-Beltrami eigenproblem on disk meshes.
//
// In two dimensions the Dirichlet energy is conformally invariant, so the
// stiffness matrix is the plain Euclidean one. Only the mass matrix carries the
// metric, through the area weight 4 / (1 - |z|^2)^2 sampled at edge midpoints.

#include "hypnodal/hypmesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

namespace hypnodal::fem {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Symmetric matrix held in full (both triangles) compressed storage.
class SymmetricSparseMatrix {
public:
    SymmetricSparseMatrix() = default;
    SymmetricSparseMatrix(int dimension, const std::vector<Eigen::Triplet<double>>& triplets);
    explicit SymmetricSparseMatrix(SparseMatrix m);

    int dimension() const { return static_cast<int>(m_.rows()); }
    const SparseMatrix& matrix() const { return m_; }

    Vector operator*(const Vector& v) const { return m_ * v; }
    double quadratic_form(const Vector& v) const { return v.dot(m_ * v); }

private:
    SparseMatrix m_;
};

struct EigenPair {
    double lambda = 0.0;
    Vector vector;
    double residual = 0.0;
};

/// Per-node Dirichlet classification. A node on any Dirichlet side is
/// constrained, including corners shared with Neumann sides.
struct BCMap {
    std::vector<bool> constrained;

    static BCMap from_labels(const mesh::TriMesh& m, const std::vector<geo::SideLabel>& labels);
    static BCMap all_free(std::size_t n) { return {std::vector<bool>(n, false)}; }

    std::size_t constrained_count() const;
};

struct ReducedSystem {
    SymmetricSparseMatrix K;
    SymmetricSparseMatrix M;
    std::vector<int> free_nodes; ///< reduced index -> full index
    int full_dimension = 0;

    /// Scatter a reduced vector into the full node set, zero at constrained nodes.
    Vector expand(const Vector& reduced) const;
    Vector restrict_to_free(const Vector& full) const;
};

/// Element matrix of the Euclidean P1 stiffness form for a counterclockwise triangle.
Eigen::Matrix3d element_stiffness(const geo::DiskPoint& a, const geo::DiskPoint& b, const geo::DiskPoint& c);

SymmetricSparseMatrix assemble_stiffness(const mesh::TriMesh& m);
SymmetricSparseMatrix assemble_mass(const mesh::TriMesh& m);

/// 1^T M 1, the quadrature approximation of the hyperbolic area of the mesh.
double hyperbolic_area(const mesh::TriMesh& m);

ReducedSystem reduce(const SymmetricSparseMatrix& K, const SymmetricSparseMatrix& M, const BCMap& bc);

struct SolverOptions {
    double tol = 1e-8;         ///< bound on ||K u - lambda M u|| / ||u||_M for every returned pair
    int max_iterations = 3000;
    double shift = -1.0;       ///< K - shift*M is factored; must lie below the spectrum
    int dense_threshold = 400; ///< dimensions up to this use a dense generalized solver
};

/// Lowest `count` eigenpairs of K u = lambda M u in ascending order, M-orthonormal.
/// Each eigenvector is signed so that its largest-magnitude entry is positive.
std::vector<EigenPair> solve_eigen(const SymmetricSparseMatrix& K, const SymmetricSparseMatrix& M, int count,
                                   const SolverOptions& opts = {});

double eigen_residual(const SymmetricSparseMatrix& K, const SymmetricSparseMatrix& M, const EigenPair& pair);
double eigen_residual(const SymmetricSparseMatrix& K, const SymmetricSparseMatrix& M, double lambda,
                      const Vector& u);

} // namespace hypnodal::fem

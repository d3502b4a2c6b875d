// Sparse direct solve for the symmetric indefinite systems produced by the
// mixed discretization.

#ifndef HDIV2D_SOLVER_HPP
#define HDIV2D_SOLVER_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace hdiv2d {

struct SparseMatrix {
  int dim = 0;
  Eigen::SparseMatrix<double> mat;
  bool symmetric = false;

  static SparseMatrix from_triplets(
      int dim, const std::vector<Eigen::Triplet<double>>& triplets,
      bool symmetric);
};

/// Sparse LU with fill-reducing ordering; verifies the multiply-back
/// residual ||Ax - b|| / ||b|| <= 1e-10 and throws std::runtime_error on
/// singular or numerically rank-deficient matrices.
Eigen::VectorXd factor_and_solve(const SparseMatrix& A,
                                 const Eigen::VectorXd& rhs);

}  // namespace hdiv2d

#endif

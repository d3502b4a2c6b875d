#include "hdiv2d/solver.hpp"

#include <stdexcept>

#include <Eigen/SparseLU>

namespace hdiv2d {

SparseMatrix SparseMatrix::from_triplets(
    int dim, const std::vector<Eigen::Triplet<double>>& triplets,
    bool symmetric) {
  SparseMatrix out;
  out.dim = dim;
  out.symmetric = symmetric;
  out.mat.resize(dim, dim);
  out.mat.setFromTriplets(triplets.begin(), triplets.end());
  out.mat.prune(0.0);
  out.mat.makeCompressed();
  return out;
}

Eigen::VectorXd factor_and_solve(const SparseMatrix& A,
                                 const Eigen::VectorXd& rhs) {
  if (A.mat.rows() != rhs.size())
    throw std::invalid_argument("factor_and_solve: dimension mismatch");
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A.mat);
  lu.factorize(A.mat);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("factor_and_solve: singular matrix");
  Eigen::VectorXd x = lu.solve(rhs);
  const double rhs_norm = rhs.norm();
  const double residual = (A.mat * x - rhs).norm();
  if (!(residual <= 1e-10 * (rhs_norm > 0 ? rhs_norm : 1.0)))
    throw std::runtime_error("factor_and_solve: residual check failed (numerically rank-deficient?)");
  return x;
}

}  // namespace hdiv2d

// Manufactured solution (steep arctan front), L2 error norms of the mixed
// solution, and convergence-order fitting.

#ifndef HDIV2D_ERRORS_HPP
#define HDIV2D_ERRORS_HPP

#include <vector>

#include "hdiv2d/assembly.hpp"
#include "hdiv2d/projection.hpp"

namespace hdiv2d {

/// u = pi/2 - arctan(5 (r - pi/3)), r the distance to (1.25, -0.25);
/// sigma = -grad u, f = div sigma, all in closed form.  The singular
/// center lies outside the closed unit square, so every field is smooth
/// on the domain.
struct ManufacturedSolution {
  ScalarField u;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&)> grad_u;
  VectorField sigma;
  ScalarField f;
};

ManufacturedSolution exact_fields();

struct ErrorNorms {
  double flux = 0;
  double potential = 0;
  double divergence = 0;
};

/// Quadrature-evaluated L2 norms with over-integration; the discrete
/// divergence comes from the Piola relation, never from differencing.
ErrorNorms l2_errors(const MixedSolution& solution,
                     const ManufacturedSolution& exact, const Mesh2D& mesh,
                     const DofMap& dofs, int extra_quad = 4);

struct LevelRecord {
  int level = 0;
  double h = 0;
  ErrorNorms errors;
};

struct FittedOrders {
  // log2(e_i / e_{i+1}) between consecutive levels
  std::vector<double> pairwise_flux, pairwise_potential, pairwise_divergence;
  // least-squares slope over the three finest levels
  double ls_flux = 0, ls_potential = 0, ls_divergence = 0;
  bool monotone_flux = true, monotone_potential = true, monotone_divergence = true;
};

/// Requires >= 3 levels with strictly decreasing h and positive errors.
/// Non-monotone error sequences are flagged, not fatal.
FittedOrders fit_orders(const std::vector<LevelRecord>& records);

}  // namespace hdiv2d

#endif

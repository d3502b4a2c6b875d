// Gauss quadrature rules on the reference interval [-1,1], the master
// square R = [-1,1]^2 and the master triangle T.

#ifndef HDIV2D_QUADRATURE_HPP
#define HDIV2D_QUADRATURE_HPP

#include <vector>

#include <Eigen/Dense>

#include "hdiv2d/master_element.hpp"

namespace hdiv2d {

struct QuadRule {
  std::vector<Eigen::Vector2d> points;  // 1D rules store (x, 0)
  std::vector<double> weights;
  int exactness_degree = 0;

  int size() const { return static_cast<int>(points.size()); }
};

/// Gauss-Legendre rule on [-1,1], exact for polynomials of degree <= d.
/// Valid range 1 <= d <= 40.
QuadRule gauss_interval(int d);

/// Tensor-product Gauss rule on R, exact for Q_{d,d}.
QuadRule gauss_square(int d);

/// Rule on the master triangle T, exact for total degree <= d
/// (collapsed-coordinate tensor rule; d = 1 uses the centroid rule).
/// Valid range 1 <= d <= 30.
QuadRule gauss_triangle(int d);

/// Volume rule for the given master element shape.
QuadRule master_rule(CellShape shape, int d);

}  // namespace hdiv2d

#endif

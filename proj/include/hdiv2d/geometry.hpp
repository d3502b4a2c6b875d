// Geometric maps from master elements to physical cells (linear for
// triangles, bilinear for quadrilaterals), Jacobian data and the Piola
// transformation for H(div) vector fields.

#ifndef HDIV2D_GEOMETRY_HPP
#define HDIV2D_GEOMETRY_HPP

#include <Eigen/Dense>

#include "hdiv2d/master_element.hpp"

namespace hdiv2d {

/// F(x,y) = A0 + A1 x + A2 y + A3 x y.  A3 = 0 for linear maps.
struct GeoMap {
  enum class Kind { linear, bilinear };

  CellShape shape = CellShape::quadrilateral;
  Kind kind = Kind::linear;
  Eigen::Vector2d A0 = Eigen::Vector2d::Zero();
  Eigen::Vector2d A1 = Eigen::Vector2d::Zero();
  Eigen::Vector2d A2 = Eigen::Vector2d::Zero();
  Eigen::Vector2d A3 = Eigen::Vector2d::Zero();

  /// Linear map of the master triangle onto (v0, v1, v2).
  static GeoMap triangle(const Eigen::Vector2d& v0, const Eigen::Vector2d& v1,
                         const Eigen::Vector2d& v2);

  /// Bilinear map of R onto the quadrilateral (v0, v1, v2, v3), CCW.
  /// Coefficients from corner interpolation in closed form.
  static GeoMap quadrilateral(const Eigen::Vector2d& v0,
                              const Eigen::Vector2d& v1,
                              const Eigen::Vector2d& v2,
                              const Eigen::Vector2d& v3);
};

struct JacobianData {
  Eigen::Matrix2d DF;
  double J = 0;
  Eigen::Matrix2d DF_inv;
};

Eigen::Vector2d eval_map(const GeoMap& map, const Eigen::Vector2d& xhat);

/// Throws std::runtime_error on degenerate geometry (J <= 0).
JacobianData jacobian(const GeoMap& map, const Eigen::Vector2d& xhat);

/// Contravariant Piola push-forward v = (1/J) DF vhat.
Eigen::Vector2d piola_push(const JacobianData& jac, const Eigen::Vector2d& vhat);

/// Inverse Piola map vhat = J DF^{-1} v.
Eigen::Vector2d piola_pull(const JacobianData& jac, const Eigen::Vector2d& v);

/// Physical divergence of a Piola-pushed field: div v = divhat / J.
double piola_div(double J, double divhat);

}  // namespace hdiv2d

#endif

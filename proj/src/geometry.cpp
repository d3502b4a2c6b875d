#include "hdiv2d/geometry.hpp"

#include <stdexcept>

namespace hdiv2d {

GeoMap GeoMap::triangle(const Eigen::Vector2d& v0, const Eigen::Vector2d& v1,
                        const Eigen::Vector2d& v2) {
  GeoMap m;
  m.shape = CellShape::triangle;
  m.kind = Kind::linear;
  m.A0 = v0;
  m.A1 = v1 - v0;
  m.A2 = v2 - v0;
  m.A3.setZero();
  return m;
}

GeoMap GeoMap::quadrilateral(const Eigen::Vector2d& v0,
                             const Eigen::Vector2d& v1,
                             const Eigen::Vector2d& v2,
                             const Eigen::Vector2d& v3) {
  GeoMap m;
  m.shape = CellShape::quadrilateral;
  m.A0 = 0.25 * (v0 + v1 + v2 + v3);
  m.A1 = 0.25 * (-v0 + v1 + v2 - v3);
  m.A2 = 0.25 * (-v0 - v1 + v2 + v3);
  m.A3 = 0.25 * (v0 - v1 + v2 - v3);
  m.kind = m.A3.norm() > 1e-14 * (m.A1.norm() + m.A2.norm()) ? Kind::bilinear
                                                             : Kind::linear;
  return m;
}

Eigen::Vector2d eval_map(const GeoMap& map, const Eigen::Vector2d& xhat) {
  return map.A0 + map.A1 * xhat.x() + map.A2 * xhat.y() +
         map.A3 * (xhat.x() * xhat.y());
}

JacobianData jacobian(const GeoMap& map, const Eigen::Vector2d& xhat) {
  JacobianData jac;
  jac.DF.col(0) = map.A1 + map.A3 * xhat.y();
  jac.DF.col(1) = map.A2 + map.A3 * xhat.x();
  jac.J = jac.DF.determinant();
  if (!(jac.J > 0)) throw std::runtime_error("jacobian: degenerate geometry (J <= 0)");
  jac.DF_inv << jac.DF(1, 1), -jac.DF(0, 1), -jac.DF(1, 0), jac.DF(0, 0);
  jac.DF_inv /= jac.J;
  return jac;
}

Eigen::Vector2d piola_push(const JacobianData& jac,
                           const Eigen::Vector2d& vhat) {
  return (jac.DF * vhat) / jac.J;
}

Eigen::Vector2d piola_pull(const JacobianData& jac, const Eigen::Vector2d& v) {
  return jac.J * (jac.DF_inv * v);
}

double piola_div(double J, double divhat) { return divhat / J; }

}  // namespace hdiv2d

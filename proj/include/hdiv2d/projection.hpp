// Constraint-defined flux projection onto V_k^{n+} on the master element:
// edge coefficients match normal traces against degree-k edge polynomials,
// internal coefficients match divergence moments against internal test
// functions plus L2 moments against the divergence-free internal subspace.
// The construction commutes with the divergence (de Rham property), which
// de_rham_residual certifies numerically.

#ifndef HDIV2D_PROJECTION_HPP
#define HDIV2D_PROJECTION_HPP

#include <functional>

#include <Eigen/Dense>

#include "hdiv2d/geometry.hpp"
#include "hdiv2d/mesh.hpp"
#include "hdiv2d/quadrature.hpp"
#include "hdiv2d/spaces.hpp"

namespace hdiv2d {

/// Smooth physical vector field with analytic divergence.
struct VectorField {
  std::function<Eigen::Vector2d(const Eigen::Vector2d&)> value;
  std::function<double(const Eigen::Vector2d&)> divergence;
};

using ScalarField = std::function<double(const Eigen::Vector2d&)>;

class ProjectionSystem {
 public:
  explicit ProjectionSystem(const SpaceConfig& config);

  const SpaceConfig& config() const { return config_; }
  const HDivBasis& basis() const { return basis_; }
  const ScalarBasis& scalar_basis() const { return scalar_; }

  /// Coefficients of the projection of q|_K pulled back through the
  /// inverse Piola map.  extra_quad raises the quadrature degree of the
  /// right-hand-side integrals (use +4 for non-polynomial fields).
  Eigen::VectorXd project_flux(const VectorField& q, const GeoMap& map,
                               int extra_quad = 0) const;

  /// max over scalar members phi of |int div(pi q - q) phi dKhat|.
  double de_rham_residual(const VectorField& q, const GeoMap& map,
                          int extra_quad = 0) const;

  /// True iff the homogeneous constraint system only has the zero
  /// solution (smallest singular value > 1e-8 x largest).
  bool uniqueness_probe() const;

  /// Basis of the divergence-free internal subspace (columns are internal
  /// coefficient vectors).
  const Eigen::MatrixXd& divfree_nullspace() const { return Z_; }

 private:
  SpaceConfig config_;
  HDivBasis basis_;
  ScalarBasis scalar_;
  int n_edge_dofs_per_edge_ = 0;
  Eigen::LLT<Eigen::MatrixXd> edge_mass_llt_;  // shared by all edges
  Eigen::MatrixXd internal_mass_;              // L2 Gram of internal fns
  Eigen::MatrixXd W_;                          // range of internal div Gram
  Eigen::VectorXd lambda_;                     // nonzero eigenvalues of D
  Eigen::MatrixXd Z_;                          // nullspace of D (div-free)
  Eigen::LLT<Eigen::MatrixXd> zmz_llt_;        // Z' M Z
  QuadRule vol_rule_;
  BasisTable vol_table_;
};

/// sigma_min / sigma_max of the stacked constraint matrix for an arbitrary
/// basis (edge trace rows, internal divergence rows, divergence-free moment
/// rows).  The projection is unique iff the ratio is above 1e-8.
double constraint_min_singular_ratio(const HDivBasis& basis);

/// L2 projection onto the mapped scalar space, using the measure J dKhat.
Eigen::VectorXd project_scalar(const ScalarBasis& basis, const ScalarField& u,
                               const GeoMap& map, int extra_quad = 0);

/// Global projection errors over a mesh: L2 norms of q - Pi_h q, of
/// div(q - Pi_h q), and of u - Lambda_h u for the scalar projection.
struct ProjectionErrors {
  double flux = 0;
  double divergence = 0;
  double scalar = 0;
};
ProjectionErrors global_projection_errors(const Mesh2D& mesh,
                                          const SpaceConfig& config,
                                          const VectorField& q,
                                          const ScalarField& u,
                                          int extra_quad = 4);

}  // namespace hdiv2d

#endif

// Hierarchical H(div) bases on the master elements: RT_k on the square,
// BDM_k on the triangle, and their internally enriched variants pairing
// degree-k edge fluxes with the internal fluxes of the order-(k+n) space.
// Shape functions are products of constant vector fields with hierarchical
// scalars built from integrated Legendre polynomials, split into edge and
// internal classes by their normal traces.

#ifndef HDIV2D_SPACES_HPP
#define HDIV2D_SPACES_HPP

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "hdiv2d/master_element.hpp"

namespace hdiv2d {

enum class SpaceFamily { RT, BDM };

/// Flux space V_k^{n+}: edge traces of degree k, internal functions of the
/// order-(k+n) family.  n = 0 is the original RT_k / BDM_k space.
struct SpaceConfig {
  SpaceFamily family = SpaceFamily::RT;
  CellShape shape = CellShape::quadrilateral;
  int k = 1;
  int n = 0;

  SpaceConfig() = default;
  /// Validates family/shape pairing (RT on quadrilaterals, BDM on
  /// triangles), k >= 1, n >= 0.  Throws std::invalid_argument otherwise.
  SpaceConfig(SpaceFamily family, int k, int n);

  int order() const { return k + n; }  // internal / divergence order
};

/// 1D hierarchical profile on [-1,1]: index 0,1 are the vertex functions
/// (1 -+ t)/2, index j >= 2 the integrated-Legendre bubble of degree j.
/// arg_sign = -1 evaluates the mirrored profile (flipped edge direction).
struct Profile1D {
  int index = 0;
  double arg_sign = 1;

  double value(double t) const;
  double deriv(double t) const;
  int degree() const { return index < 2 ? 1 : index; }
};

/// Scalar factors of triangle shape functions, with gradients.
struct TriScalar {
  enum class Kind { hat, edge_kernel, bubble };
  Kind kind = Kind::hat;
  int a = 0;          // hat: vertex; edge_kernel: edge; bubble: Legendre index in lam1-lam0
  int b = 0;          // edge_kernel: profile degree j; bubble: Legendre index in 2*lam2-1
  double arg_sign = 1;  // edge_kernel only

  double value(const Eigen::Vector2d& xhat) const;
  Eigen::Vector2d grad(const Eigen::Vector2d& xhat) const;
};

struct ShapeFn {
  enum class Kind { edge, internal };

  int id = 0;
  Kind kind = Kind::edge;
  int edge_id = -1;  // edge functions only
  int degree = 1;    // edge: trace profile degree; internal: hierarchy level
  int level = 1;     // smallest family order whose space contains this function
  CellShape shape = CellShape::quadrilateral;

  // quadrilateral representation: v = coef * fx(x) fy(y) * e_component
  int component = 0;
  double coef = 1;
  Profile1D fx, fy;

  // triangle representation: v = vec * scalar(xhat)
  Eigen::Vector2d vec = Eigen::Vector2d::Zero();
  TriScalar tri;

  void eval(const Eigen::Vector2d& xhat, Eigen::Vector2d& v, double& div) const;
};

struct HDivBasis {
  SpaceConfig config;
  std::array<bool, 4> edge_flips{false, false, false, false};
  std::vector<ShapeFn> fns;
  int n_edge = 0;
  int n_internal = 0;

  int size() const { return static_cast<int>(fns.size()); }
};

struct BasisValue {
  Eigen::Vector2d v;
  double div;
};

/// Basis values and master divergences of every member at a point.
std::vector<BasisValue> eval_basis(const HDivBasis& basis,
                                   const Eigen::Vector2d& xhat);

/// Tabulated basis values at a list of points: rows are shape functions.
struct BasisTable {
  Eigen::MatrixXd vx, vy, dv;
};
BasisTable tabulate(const HDivBasis& basis,
                    const std::vector<Eigen::Vector2d>& points);

/// 1D hierarchical scalar basis of degree k on [-1,1]: the two vertex
/// functions followed by bubbles of degrees 2..k (k+1 members).  k = 0
/// degenerates to the single constant function.
struct Scalar1D {
  int degree = 1;
  std::function<double(double)> value;
  std::function<double(double)> deriv;
};
std::vector<Scalar1D> scalar_hierarchical_1d(int k);

/// Builds V_k^{n+} with the requested per-edge parametrization directions:
/// constructs the full order-(k+n) hierarchical family, then prunes edge
/// functions of trace degree > k.  Edge functions come first, grouped by
/// edge; internal functions follow ordered by hierarchy level, so the list
/// for (k, n) is a prefix of the list for (k, n+1).
/// Throws std::runtime_error if the result fails a Gram independence check.
HDivBasis build_hdiv_basis(const SpaceConfig& config,
                           std::array<bool, 4> edge_flips = {false, false,
                                                             false, false});

/// Scalar divergence space U_{k+n}: Q_{k+n,k+n} on R (Legendre tensor
/// products) or P_{k+n-1} on T.  Member 0 is the constant function.
struct ScalarBasis {
  CellShape shape = CellShape::quadrilateral;
  int order = 0;                          // m: Q_{m,m} or P_m
  std::vector<std::array<int, 2>> exps;   // Legendre index pairs, member 0 = (0,0)

  int size() const { return static_cast<int>(exps.size()); }
  double eval(int member, const Eigen::Vector2d& xhat) const;
};
ScalarBasis divergence_scalar_basis(const SpaceConfig& config);

/// Max least-squares residual, relative, over (a) expressing each basis
/// member's divergence in the scalar basis and (b) expressing each scalar
/// member as a divergence of basis members.  Certifies div V = U.
double check_div_exactness(const SpaceConfig& config);
double check_div_exactness(const std::vector<ShapeFn>& fns,
                           const ScalarBasis& scalar, CellShape shape,
                           int quad_degree);

}  // namespace hdiv2d

#endif

#include "hdiv2d/spaces.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "hdiv2d/orthopoly.hpp"
#include "hdiv2d/quadrature.hpp"

namespace hdiv2d {

SpaceConfig::SpaceConfig(SpaceFamily family_, int k_, int n_)
    : family(family_), k(k_), n(n_) {
  if (k < 1) throw std::invalid_argument("SpaceConfig: k must be >= 1");
  if (n < 0) throw std::invalid_argument("SpaceConfig: n must be >= 0");
  if (k + n > 9) throw std::invalid_argument("SpaceConfig: k + n too large");
  shape = (family == SpaceFamily::RT) ? CellShape::quadrilateral
                                      : CellShape::triangle;
}

double Profile1D::value(double t) const {
  const double s = arg_sign * t;
  if (index == 0) return 0.5 * (1.0 - s);
  if (index == 1) return 0.5 * (1.0 + s);
  return integrated_legendre(index, s);
}

double Profile1D::deriv(double t) const {
  const double s = arg_sign * t;
  if (index == 0) return -0.5 * arg_sign;
  if (index == 1) return 0.5 * arg_sign;
  return arg_sign * integrated_legendre_d(index, s);
}

namespace {

double lambda_value(int a, const Eigen::Vector2d& p) {
  switch (a) {
    case 0: return 1.0 - p.x() - p.y();
    case 1: return p.x();
    default: return p.y();
  }
}

Eigen::Vector2d lambda_grad(int a) {
  switch (a) {
    case 0: return {-1.0, -1.0};
    case 1: return {1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

}  // namespace

double TriScalar::value(const Eigen::Vector2d& p) const {
  if (kind == Kind::hat) return lambda_value(a, p);
  if (kind == Kind::edge_kernel) {
    // 4 lam_a lam_b K_{j-2}(lam_b - lam_a) restricts on its edge to the
    // integrated Legendre L_j and vanishes on the other two edges.
    auto ev = edge_vertices(CellShape::triangle, a);
    const int j = b;
    double la = lambda_value(ev[0], p), lb = lambda_value(ev[1], p);
    double u = arg_sign * (lb - la);
    double kern = -legendre_all(j - 1, u).dp / (double(j) * (j - 1));
    return 4.0 * la * lb * kern;
  }
  double l0 = lambda_value(0, p), l1 = lambda_value(1, p), l2 = lambda_value(2, p);
  double u = l1 - l0, w = 2.0 * l2 - 1.0;
  return l0 * l1 * l2 * legendre(a, u) * legendre(b, w);
}

Eigen::Vector2d TriScalar::grad(const Eigen::Vector2d& p) const {
  if (kind == Kind::hat) return lambda_grad(a);
  if (kind == Kind::edge_kernel) {
    auto ev = edge_vertices(CellShape::triangle, a);
    const int j = b;
    double la = lambda_value(ev[0], p), lb = lambda_value(ev[1], p);
    Eigen::Vector2d gla = lambda_grad(ev[0]), glb = lambda_grad(ev[1]);
    double u = arg_sign * (lb - la);
    auto lv = legendre_all(j - 1, u);
    double kern = -lv.dp / (double(j) * (j - 1));
    double dkern = -lv.ddp / (double(j) * (j - 1));
    return 4.0 * ((la * glb + lb * gla) * kern +
                  la * lb * dkern * arg_sign * (glb - gla));
  }
  double l0 = lambda_value(0, p), l1 = lambda_value(1, p), l2 = lambda_value(2, p);
  double u = l1 - l0, w = 2.0 * l2 - 1.0;
  auto pa = legendre_all(a, u);
  auto pb = legendre_all(b, w);
  Eigen::Vector2d gB = l1 * l2 * lambda_grad(0) + l0 * l2 * lambda_grad(1) +
                       l0 * l1 * lambda_grad(2);
  Eigen::Vector2d gu(2.0, 1.0), gw(0.0, 2.0);
  return gB * pa.p * pb.p + (l0 * l1 * l2) * (pa.dp * pb.p * gu + pa.p * pb.dp * gw);
}

void ShapeFn::eval(const Eigen::Vector2d& xhat, Eigen::Vector2d& v,
                   double& div) const {
  if (shape == CellShape::quadrilateral) {
    const double f = fx.value(xhat.x());
    const double g = fy.value(xhat.y());
    v.setZero();
    v[component] = coef * f * g;
    div = coef * (component == 0 ? fx.deriv(xhat.x()) * g
                                 : f * fy.deriv(xhat.y()));
    return;
  }
  const double s = tri.value(xhat);
  const Eigen::Vector2d gs = tri.grad(xhat);
  v = vec * s;
  div = vec.dot(gs);
}

std::vector<BasisValue> eval_basis(const HDivBasis& basis,
                                   const Eigen::Vector2d& xhat) {
  std::vector<BasisValue> out(basis.fns.size());
  for (size_t i = 0; i < basis.fns.size(); ++i)
    basis.fns[i].eval(xhat, out[i].v, out[i].div);
  return out;
}

BasisTable tabulate(const HDivBasis& basis,
                    const std::vector<Eigen::Vector2d>& points) {
  const int nf = basis.size();
  const int np = static_cast<int>(points.size());
  BasisTable table;
  table.vx.resize(nf, np);
  table.vy.resize(nf, np);
  table.dv.resize(nf, np);
  Eigen::Vector2d v;
  double d;
  for (int i = 0; i < nf; ++i)
    for (int q = 0; q < np; ++q) {
      basis.fns[i].eval(points[q], v, d);
      table.vx(i, q) = v.x();
      table.vy(i, q) = v.y();
      table.dv(i, q) = d;
    }
  return table;
}

std::vector<Scalar1D> scalar_hierarchical_1d(int k) {
  if (k < 0) throw std::invalid_argument("scalar_hierarchical_1d: k < 0");
  std::vector<Scalar1D> out;
  if (k == 0) {
    out.push_back({0, [](double) { return 1.0; }, [](double) { return 0.0; }});
    return out;
  }
  for (int j = 0; j <= k; ++j) {
    Profile1D p{j == 1 ? 1 : (j == 0 ? 0 : j), 1.0};
    out.push_back({p.degree(), [p](double t) { return p.value(t); },
                   [p](double t) { return p.deriv(t); }});
  }
  return out;
}

namespace {

// Trace profile for edge DOF j with the edge parametrized in the global
// direction: j = 0, 1 are the vertex functions at the first and second
// global endpoint, j >= 2 the degree-j bubble.
Profile1D dof_profile(int j, bool flip) {
  if (j < 2) return {flip ? 1 - j : j, 1.0};
  return {j, flip ? -1.0 : 1.0};
}

struct QuadEdgeRecipe {
  int component;
  double coef;
  int profile_coord;     // 0: profile in x, 1: profile in y
  double coord_sign;     // master edge parameter t = coord_sign * coordinate
  int other_hat;         // vertex-function index of the complementary factor
};

// Master square, edges CCW from the bottom.  The complementary factor
// pins the trace to the edge's own side and kills it on the opposite one.
constexpr QuadEdgeRecipe kQuadEdges[4] = {
    {1, -1.0, 0, 1.0, 0},   // bottom: (0, -g(x) hat0(y))
    {0, 1.0, 1, 1.0, 1},    // right:  (g(y) hat1(x), 0)
    {1, 1.0, 0, -1.0, 1},   // top:    (0, g(-x) hat1(y))
    {0, -1.0, 1, -1.0, 0},  // left:   (-g(-y) hat0(x), 0)
};

ShapeFn quad_edge_fn(int e, int j, bool flip) {
  const QuadEdgeRecipe& r = kQuadEdges[e];
  Profile1D p = dof_profile(j, flip);
  p.arg_sign *= r.coord_sign;
  ShapeFn fn;
  fn.shape = CellShape::quadrilateral;
  fn.kind = ShapeFn::Kind::edge;
  fn.edge_id = e;
  fn.degree = p.degree();
  fn.level = std::max(1, p.degree());
  fn.component = r.component;
  fn.coef = r.coef;
  if (r.profile_coord == 0) {
    fn.fx = p;
    fn.fy = {r.other_hat, 1.0};
  } else {
    fn.fx = {r.other_hat, 1.0};
    fn.fy = p;
  }
  return fn;
}

int profile_index_degree(int idx) { return idx < 2 ? 1 : idx; }

void append_quad_internals(int order, std::vector<ShapeFn>& fns) {
  // x-fields beta_i(x) g(y) and y-fields g(x) beta_i(y): zero trace via
  // the bubble factor; level max(i-1, deg g) so enrichment appends.
  for (int level = 1; level <= order; ++level)
    for (int comp = 0; comp < 2; ++comp)
      for (int bi = 2; bi <= order + 1; ++bi)
        for (int gj = 0; gj <= order; ++gj) {
          int lev = std::max(bi - 1, profile_index_degree(gj));
          if (lev != level) continue;
          ShapeFn fn;
          fn.shape = CellShape::quadrilateral;
          fn.kind = ShapeFn::Kind::internal;
          fn.degree = lev;
          fn.level = lev;
          fn.component = comp;
          fn.coef = 1.0;
          if (comp == 0) {
            fn.fx = {bi, 1.0};
            fn.fy = {gj, 1.0};
          } else {
            fn.fx = {gj, 1.0};
            fn.fy = {bi, 1.0};
          }
          fns.push_back(fn);
        }
}

// Constant vector paired with the vertex function lam_a for edge e: unit
// normal component on e, zero normal component on the other edge at a.
Eigen::Vector2d vertex_edge_vector(int e, int a) {
  if (e == 0) return a == 0 ? Eigen::Vector2d(0, -1) : Eigen::Vector2d(1, -1);
  if (e == 1) return a == 1 ? Eigen::Vector2d(std::sqrt(2.0), 0)
                            : Eigen::Vector2d(0, std::sqrt(2.0));
  return a == 2 ? Eigen::Vector2d(-1, 1) : Eigen::Vector2d(-1, 0);
}

ShapeFn tri_edge_fn(int e, int j, bool flip) {
  ShapeFn fn;
  fn.shape = CellShape::triangle;
  fn.kind = ShapeFn::Kind::edge;
  fn.edge_id = e;
  if (j < 2) {
    auto ev = edge_vertices(CellShape::triangle, e);
    int first = flip ? ev[1] : ev[0];
    int vertex = (j == 0) ? first : (ev[0] + ev[1] - first);
    fn.degree = 1;
    fn.level = 1;
    fn.vec = vertex_edge_vector(e, vertex);
    fn.tri = {TriScalar::Kind::hat, vertex, 0, 1.0};
    return fn;
  }
  fn.degree = j;
  fn.level = j;
  fn.vec = master_edge_normal(CellShape::triangle, e);
  fn.tri = {TriScalar::Kind::edge_kernel, e, j, flip ? -1.0 : 1.0};
  return fn;
}

void append_tri_internals(int order, std::vector<ShapeFn>& fns) {
  for (int level = 2; level <= order; ++level) {
    // tangential edge functions: zero normal trace everywhere
    for (int e = 0; e < 3; ++e) {
      ShapeFn fn;
      fn.shape = CellShape::triangle;
      fn.kind = ShapeFn::Kind::internal;
      fn.degree = level;
      fn.level = level;
      fn.vec = master_edge_tangent(CellShape::triangle, e);
      fn.tri = {TriScalar::Kind::edge_kernel, e, level, 1.0};
      fns.push_back(fn);
    }
    // interior bubbles times the two coordinate directions
    if (level >= 3) {
      for (int a = 0; a <= level - 3; ++a) {
        int b = level - 3 - a;
        for (int comp = 0; comp < 2; ++comp) {
          ShapeFn fn;
          fn.shape = CellShape::triangle;
          fn.kind = ShapeFn::Kind::internal;
          fn.degree = level;
          fn.level = level;
          fn.vec = comp == 0 ? Eigen::Vector2d(1, 0) : Eigen::Vector2d(0, 1);
          fn.tri = {TriScalar::Kind::bubble, a, b, 1.0};
          fns.push_back(fn);
        }
      }
    }
  }
}

void gram_independence_check(const HDivBasis& basis) {
  const int m = basis.config.order();
  QuadRule rule = master_rule(basis.config.shape, 2 * m + 2);
  BasisTable table = tabulate(basis, rule.points);
  const int nf = basis.size();
  Eigen::MatrixXd gram(nf, nf);
  Eigen::VectorXd w =
      Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), rule.size());
  gram = table.vx * w.asDiagonal() * table.vx.transpose() +
         table.vy * w.asDiagonal() * table.vy.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  if (!(lmin > 1e-12 * lmax))
    throw std::runtime_error("build_hdiv_basis: linearly dependent members");
}

}  // namespace

HDivBasis build_hdiv_basis(const SpaceConfig& config,
                           std::array<bool, 4> edge_flips) {
  const int m = config.order();
  const int ne = num_edges(config.shape);
  HDivBasis basis;
  basis.config = config;
  basis.edge_flips = edge_flips;

  // Full order-m family first: edge functions up to trace degree m ...
  std::vector<ShapeFn> edge_fns;
  for (int e = 0; e < ne; ++e)
    for (int j = 0; j <= m; ++j)
      edge_fns.push_back(config.shape == CellShape::quadrilateral
                             ? quad_edge_fn(e, j, edge_flips[e])
                             : tri_edge_fn(e, j, edge_flips[e]));
  // ... then prune the ones of degree > k (the enrichment rule).
  for (const ShapeFn& fn : edge_fns)
    if (fn.degree <= config.k) basis.fns.push_back(fn);
  basis.n_edge = basis.size();

  if (config.shape == CellShape::quadrilateral)
    append_quad_internals(m, basis.fns);
  else
    append_tri_internals(m, basis.fns);
  basis.n_internal = basis.size() - basis.n_edge;

  for (int i = 0; i < basis.size(); ++i) basis.fns[i].id = i;
  gram_independence_check(basis);
  return basis;
}

double ScalarBasis::eval(int member, const Eigen::Vector2d& p) const {
  const auto [a, b] = exps[member];
  if (shape == CellShape::quadrilateral)
    return legendre(a, p.x()) * legendre(b, p.y());
  // Legendre products in the directions lam1 - lam0 and 2 lam2 - 1:
  // linearly independent, graded by total degree, member 0 constant.
  return legendre(a, 2.0 * p.x() + p.y() - 1.0) * legendre(b, 2.0 * p.y() - 1.0);
}

ScalarBasis divergence_scalar_basis(const SpaceConfig& config) {
  ScalarBasis basis;
  basis.shape = config.shape;
  if (config.family == SpaceFamily::RT) {
    basis.order = config.order();
    for (int l = 0; l <= basis.order; ++l) {
      for (int b = 0; b < l; ++b) basis.exps.push_back({l, b});
      for (int a = 0; a <= l; ++a) basis.exps.push_back({a, l});
    }
  } else {
    basis.order = config.order() - 1;
    for (int d = 0; d <= basis.order; ++d)
      for (int a = 0; a <= d; ++a) basis.exps.push_back({a, d - a});
  }
  return basis;
}

namespace {

Eigen::MatrixXd tabulate_scalar(const ScalarBasis& basis,
                                const std::vector<Eigen::Vector2d>& pts) {
  Eigen::MatrixXd s(basis.size(), pts.size());
  for (int i = 0; i < basis.size(); ++i)
    for (size_t q = 0; q < pts.size(); ++q) s(i, q) = basis.eval(i, pts[q]);
  return s;
}

}  // namespace

double check_div_exactness(const std::vector<ShapeFn>& fns,
                           const ScalarBasis& scalar, CellShape shape,
                           int quad_degree) {
  QuadRule rule = master_rule(shape, quad_degree);
  const int np = rule.size();
  const int nf = static_cast<int>(fns.size());
  const int ns = scalar.size();
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), np);

  Eigen::MatrixXd divs(nf, np);
  Eigen::Vector2d v;
  double d;
  for (int i = 0; i < nf; ++i)
    for (int q = 0; q < np; ++q) {
      fns[i].eval(rule.points[q], v, d);
      divs(i, q) = d;
    }
  Eigen::MatrixXd s = tabulate_scalar(scalar, rule.points);

  // L2-orthonormalize the scalar basis.
  Eigen::MatrixXd gs = s * w.asDiagonal() * s.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(gs);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("check_div_exactness: scalar basis degenerate");
  Eigen::MatrixXd t =
      llt.matrixL().solve(s);  // rows orthonormal w.r.t. the weighted product

  double worst = 0.0;

  // Containment: each divergence expanded in the scalar span, residual
  // evaluated pointwise.
  for (int i = 0; i < nf; ++i) {
    Eigen::VectorXd ci = t * w.asDiagonal() * divs.row(i).transpose();
    Eigen::VectorXd r = divs.row(i).transpose() - t.transpose() * ci;
    double norm2 = divs.row(i).transpose().dot(w.asDiagonal() * divs.row(i).transpose());
    double res2 = r.dot(w.asDiagonal() * r);
    if (norm2 > 1e-26)
      worst = std::max(worst, std::sqrt(std::max(res2, 0.0) / norm2));
  }

  // Surjectivity: each (orthonormalized) scalar member expressed as a
  // divergence via the pseudo-inverse of the divergence Gram.
  Eigen::MatrixXd gd = divs * w.asDiagonal() * divs.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gd);
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const double lmax = lam.maxCoeff();
  for (int i = 0; i < ns; ++i) {
    Eigen::VectorXd b = divs * w.asDiagonal() * t.row(i).transpose();
    Eigen::VectorXd y = eig.eigenvectors().transpose() * b;
    for (int j = 0; j < y.size(); ++j)
      y[j] = (lam[j] > 1e-12 * lmax) ? y[j] / lam[j] : 0.0;
    Eigen::VectorXd c = eig.eigenvectors() * y;
    Eigen::VectorXd r = t.row(i).transpose() - divs.transpose() * c;
    double res2 = r.dot(w.asDiagonal() * r);
    worst = std::max(worst, std::sqrt(std::max(res2, 0.0)));  // ||t_i|| = 1
  }
  return worst;
}

double check_div_exactness(const SpaceConfig& config) {
  HDivBasis basis = build_hdiv_basis(config);
  ScalarBasis scalar = divergence_scalar_basis(config);
  return check_div_exactness(basis.fns, scalar, config.shape,
                             2 * config.order() + 2);
}

}  // namespace hdiv2d

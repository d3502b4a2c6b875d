#include "hdiv2d/projection.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "hdiv2d/kahan.hpp"

namespace hdiv2d {

namespace {

constexpr double kNullspaceTol = 1e-10;  // relative rank cutoff for div Gram

Eigen::VectorXd weights_of(const QuadRule& rule) {
  return Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), rule.size());
}

}  // namespace

ProjectionSystem::ProjectionSystem(const SpaceConfig& config)
    : config_(config),
      basis_(build_hdiv_basis(config)),
      scalar_(divergence_scalar_basis(config)) {
  const int m = config_.order();
  n_edge_dofs_per_edge_ = config_.k + 1;

  // Edge trace constraint: the 1D Gram of the trace profiles is the same
  // matrix for every edge, so one factorization serves all of them.
  {
    QuadRule rule = gauss_interval(2 * config_.k + 2);
    const int nk = n_edge_dofs_per_edge_;
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(nk, nk);
    Eigen::Vector2d v;
    double d;
    const Eigen::Vector2d normal = master_edge_normal(config_.shape, 0);
    for (int q = 0; q < rule.size(); ++q) {
      const double t = rule.points[q].x();
      Eigen::Vector2d x = master_edge_point(config_.shape, 0, t);
      Eigen::VectorXd tr(nk);
      for (int i = 0; i < nk; ++i) {
        basis_.fns[i].eval(x, v, d);
        tr[i] = v.dot(normal);
      }
      mass += rule.weights[q] * tr * tr.transpose();
    }
    edge_mass_llt_.compute(mass);
    if (edge_mass_llt_.info() != Eigen::Success)
      throw std::runtime_error("ProjectionSystem: singular edge trace block");
  }

  vol_rule_ = master_rule(config_.shape, 2 * m + 2);
  vol_table_ = tabulate(basis_, vol_rule_.points);

  const int ni = basis_.n_internal;
  const int n0 = basis_.n_edge;
  if (ni == 0) {
    internal_mass_.resize(0, 0);
    W_.resize(0, 0);
    lambda_.resize(0);
    Z_.resize(0, 0);
    return;
  }
  Eigen::VectorXd w = weights_of(vol_rule_);
  Eigen::MatrixXd div_int = vol_table_.dv.middleRows(n0, ni);
  Eigen::MatrixXd vxi = vol_table_.vx.middleRows(n0, ni);
  Eigen::MatrixXd vyi = vol_table_.vy.middleRows(n0, ni);
  Eigen::MatrixXd d_gram = div_int * w.asDiagonal() * div_int.transpose();
  internal_mass_ = vxi * w.asDiagonal() * vxi.transpose() +
                   vyi * w.asDiagonal() * vyi.transpose();

  // Split the internal space along the divergence Gram: the kernel is the
  // divergence-free subspace, the range carries the divergence constraint.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d_gram);
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const double lmax = lam.maxCoeff();
  std::vector<int> zero_idx, pos_idx;
  for (int i = 0; i < ni; ++i)
    (lam[i] <= kNullspaceTol * lmax ? zero_idx : pos_idx).push_back(i);
  Z_.resize(ni, zero_idx.size());
  for (size_t c = 0; c < zero_idx.size(); ++c)
    Z_.col(c) = eig.eigenvectors().col(zero_idx[c]);
  W_.resize(ni, pos_idx.size());
  lambda_.resize(pos_idx.size());
  for (size_t c = 0; c < pos_idx.size(); ++c) {
    W_.col(c) = eig.eigenvectors().col(pos_idx[c]);
    lambda_[c] = lam[pos_idx[c]];
  }
  if (Z_.cols() > 0) {
    zmz_llt_.compute(Z_.transpose() * internal_mass_ * Z_);
    if (zmz_llt_.info() != Eigen::Success)
      throw std::runtime_error("ProjectionSystem: singular internal moment block");
  }
}

Eigen::VectorXd ProjectionSystem::project_flux(const VectorField& q,
                                               const GeoMap& map,
                                               int extra_quad) const {
  const int ne = num_edges(config_.shape);
  const int nk = n_edge_dofs_per_edge_;
  const int n_edge_total = basis_.n_edge;
  const int ni = basis_.n_internal;
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(basis_.size());

  // Edge part: match the normal trace against the degree-k profiles.
  QuadRule edge_rule = gauss_interval(2 * config_.k + 2 + extra_quad);
  Eigen::Vector2d v;
  double d;
  for (int e = 0; e < ne; ++e) {
    const Eigen::Vector2d normal = master_edge_normal(config_.shape, e);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nk);
    for (int qp = 0; qp < edge_rule.size(); ++qp) {
      const double t = edge_rule.points[qp].x();
      Eigen::Vector2d x = master_edge_point(config_.shape, e, t);
      JacobianData jac = jacobian(map, x);
      Eigen::Vector2d qhat = piola_pull(jac, q.value(eval_map(map, x)));
      const double qn = qhat.dot(normal);
      for (int i = 0; i < nk; ++i) {
        basis_.fns[e * nk + i].eval(x, v, d);
        rhs[i] += edge_rule.weights[qp] * qn * v.dot(normal);
      }
    }
    coeffs.segment(e * nk, nk) = edge_mass_llt_.solve(rhs);
  }
  if (ni == 0) return coeffs;

  // Internal part: divergence moments against internal test divergences,
  // L2 moments against the divergence-free internal subspace.
  const QuadRule* rule = &vol_rule_;
  const BasisTable* table = &vol_table_;
  QuadRule bumped_rule;
  BasisTable bumped_table;
  if (extra_quad > 0) {
    bumped_rule = master_rule(config_.shape, 2 * config_.order() + 2 + extra_quad);
    bumped_table = tabulate(basis_, bumped_rule.points);
    rule = &bumped_rule;
    table = &bumped_table;
  }
  const int np = rule->size();
  Eigen::VectorXd w = weights_of(*rule);

  Eigen::VectorXd qx(np), qy(np), qdiv(np);
  for (int qp = 0; qp < np; ++qp) {
    const Eigen::Vector2d& x = rule->points[qp];
    JacobianData jac = jacobian(map, x);
    Eigen::Vector2d phys = eval_map(map, x);
    Eigen::Vector2d qhat = piola_pull(jac, q.value(phys));
    qx[qp] = qhat.x();
    qy[qp] = qhat.y();
    qdiv[qp] = jac.J * q.divergence(phys);  // master divergence of the pullback
  }
  // subtract the edge interpolant
  Eigen::VectorXd ce = coeffs.head(n_edge_total);
  qx -= table->vx.topRows(n_edge_total).transpose() * ce;
  qy -= table->vy.topRows(n_edge_total).transpose() * ce;
  qdiv -= table->dv.topRows(n_edge_total).transpose() * ce;

  Eigen::MatrixXd div_int = table->dv.middleRows(n_edge_total, ni);
  Eigen::MatrixXd vxi = table->vx.middleRows(n_edge_total, ni);
  Eigen::MatrixXd vyi = table->vy.middleRows(n_edge_total, ni);
  Eigen::VectorXd r_div = div_int * w.asDiagonal() * qdiv;
  Eigen::VectorXd r_mom = vxi * w.asDiagonal() * qx + vyi * w.asDiagonal() * qy;

  Eigen::VectorXd u = (W_.transpose() * r_div).cwiseQuotient(lambda_);
  Eigen::VectorXd a = W_ * u;
  if (Z_.cols() > 0) {
    Eigen::VectorXd rz = Z_.transpose() * (r_mom - internal_mass_ * a);
    a += Z_ * zmz_llt_.solve(rz);
  }
  coeffs.tail(ni) = a;
  return coeffs;
}

double ProjectionSystem::de_rham_residual(const VectorField& q,
                                          const GeoMap& map,
                                          int extra_quad) const {
  Eigen::VectorXd coeffs = project_flux(q, map, extra_quad);
  QuadRule rule = master_rule(config_.shape, 2 * config_.order() + 2 + extra_quad);
  BasisTable table = tabulate(basis_, rule.points);
  const int np = rule.size();

  Eigen::VectorXd defect(np);  // div(pi q) - div q on the master element
  for (int qp = 0; qp < np; ++qp) {
    const Eigen::Vector2d& x = rule.points[qp];
    JacobianData jac = jacobian(map, x);
    double qdiv = jac.J * q.divergence(eval_map(map, x));
    defect[qp] = table.dv.col(qp).dot(coeffs) - qdiv;
  }
  double worst = 0.0;
  for (int i = 0; i < scalar_.size(); ++i) {
    KahanSum s;
    for (int qp = 0; qp < np; ++qp)
      s.add(rule.weights[qp] * defect[qp] * scalar_.eval(i, rule.points[qp]));
    worst = std::max(worst, std::abs(s.value()));
  }
  return worst;
}

double constraint_min_singular_ratio(const HDivBasis& basis) {
  const SpaceConfig& config = basis.config;
  const int ne = num_edges(config.shape);
  const int nk = config.k + 1;
  const int nf = basis.size();
  const int m = config.order();

  QuadRule edge_rule = gauss_interval(2 * (m + 1) + 2);
  QuadRule vol_rule = master_rule(config.shape, 2 * m + 2);
  BasisTable table = tabulate(basis, vol_rule.points);
  Eigen::VectorXd w = weights_of(vol_rule);

  std::vector<int> internal_ids;
  for (int i = 0; i < nf; ++i)
    if (basis.fns[i].kind == ShapeFn::Kind::internal) internal_ids.push_back(i);
  const int ni = static_cast<int>(internal_ids.size());

  Eigen::MatrixXd div_int(ni, vol_rule.size());
  Eigen::MatrixXd vxi(ni, vol_rule.size()), vyi(ni, vol_rule.size());
  for (int i = 0; i < ni; ++i) {
    div_int.row(i) = table.dv.row(internal_ids[i]);
    vxi.row(i) = table.vx.row(internal_ids[i]);
    vyi.row(i) = table.vy.row(internal_ids[i]);
  }
  Eigen::MatrixXd d_gram = div_int * w.asDiagonal() * div_int.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  std::vector<int> zero_idx;
  if (ni > 0) {
    eig.compute(d_gram);
    const double lmax = eig.eigenvalues().maxCoeff();
    for (int i = 0; i < ni; ++i)
      if (eig.eigenvalues()[i] <= kNullspaceTol * lmax) zero_idx.push_back(i);
  }
  const int nz = static_cast<int>(zero_idx.size());

  const int rows = ne * nk + ni + nz;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(rows, nf);

  // Edge trace rows: traces of every member against the degree-k profiles.
  Eigen::Vector2d v;
  double d;
  for (int e = 0; e < ne; ++e) {
    const Eigen::Vector2d normal = master_edge_normal(config.shape, e);
    for (int qp = 0; qp < edge_rule.size(); ++qp) {
      const double t = edge_rule.points[qp].x();
      Eigen::Vector2d x = master_edge_point(config.shape, e, t);
      Eigen::VectorXd traces(nf);
      for (int j = 0; j < nf; ++j) {
        basis.fns[j].eval(x, v, d);
        traces[j] = v.dot(normal);
      }
      for (int i = 0; i < nk; ++i) {
        // tests are the trace profiles of the edge's own functions
        double phi = traces[e * nk + i];
        c.row(e * nk + i) += edge_rule.weights[qp] * phi * traces.transpose();
      }
    }
  }
  // Divergence rows against internal test functions.
  c.middleRows(ne * nk, ni) = div_int * w.asDiagonal() * table.dv.transpose();
  // Moment rows against the divergence-free internal combinations.
  for (int z = 0; z < nz; ++z) {
    Eigen::VectorXd combo = eig.eigenvectors().col(zero_idx[z]);
    Eigen::VectorXd sx = vxi.transpose() * combo;
    Eigen::VectorXd sy = vyi.transpose() * combo;
    c.row(ne * nk + ni + z) = (table.vx * w.asDiagonal() * sx +
                               table.vy * w.asDiagonal() * sy)
                                  .transpose();
  }

  // Uniqueness is invariant under scaling individual constraints or basis
  // members; equilibrate so the singular-value ratio measures genuine
  // near-dependence rather than the hierarchical scale spread.
  for (int r = 0; r < rows; ++r) {
    const double norm = c.row(r).norm();
    if (norm > 0) c.row(r) /= norm;
  }
  for (int j = 0; j < nf; ++j) {
    const double norm = c.col(j).norm();
    if (norm > 0) c.col(j) /= norm;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c);
  const auto& sv = svd.singularValues();
  return sv[sv.size() - 1] / sv[0];
}

bool ProjectionSystem::uniqueness_probe() const {
  return constraint_min_singular_ratio(basis_) > 1e-8;
}

Eigen::VectorXd project_scalar(const ScalarBasis& basis, const ScalarField& u,
                               const GeoMap& map, int extra_quad) {
  QuadRule rule = master_rule(basis.shape, 2 * basis.order + 2 + extra_quad);
  const int ns = basis.size();
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(ns, ns);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ns);
  Eigen::VectorXd phi(ns);
  for (int qp = 0; qp < rule.size(); ++qp) {
    const Eigen::Vector2d& x = rule.points[qp];
    JacobianData jac = jacobian(map, x);
    for (int i = 0; i < ns; ++i) phi[i] = basis.eval(i, x);
    const double wj = rule.weights[qp] * jac.J;
    mass += wj * phi * phi.transpose();
    rhs += wj * u(eval_map(map, x)) * phi;
  }
  return Eigen::LDLT<Eigen::MatrixXd>(mass).solve(rhs);
}

ProjectionErrors global_projection_errors(const Mesh2D& mesh,
                                          const SpaceConfig& config,
                                          const VectorField& q,
                                          const ScalarField& u,
                                          int extra_quad) {
  ProjectionSystem system(config);
  const ScalarBasis& scalar = system.scalar_basis();
  QuadRule rule = master_rule(config.shape, 2 * config.order() + 2 + extra_quad);
  BasisTable table = tabulate(system.basis(), rule.points);
  Eigen::MatrixXd sphi(scalar.size(), rule.size());
  for (int i = 0; i < scalar.size(); ++i)
    for (int qp = 0; qp < rule.size(); ++qp)
      sphi(i, qp) = scalar.eval(i, rule.points[qp]);

  KahanSum e_flux, e_div, e_scalar;
  for (int el = 0; el < mesh.n_elements(); ++el) {
    GeoMap map = mesh.geo_map(el);
    Eigen::VectorXd coeffs = system.project_flux(q, map, extra_quad);
    Eigen::VectorXd scoeffs = project_scalar(scalar, u, map, extra_quad);
    for (int qp = 0; qp < rule.size(); ++qp) {
      const Eigen::Vector2d& x = rule.points[qp];
      JacobianData jac = jacobian(map, x);
      Eigen::Vector2d phys = eval_map(map, x);
      Eigen::Vector2d vhat(table.vx.col(qp).dot(coeffs),
                           table.vy.col(qp).dot(coeffs));
      Eigen::Vector2d vh = piola_push(jac, vhat);
      double divh = piola_div(jac.J, table.dv.col(qp).dot(coeffs));
      double uh = sphi.col(qp).dot(scoeffs);
      const double wj = rule.weights[qp] * jac.J;
      e_flux.add(wj * (q.value(phys) - vh).squaredNorm());
      double dd = q.divergence(phys) - divh;
      e_div.add(wj * dd * dd);
      double du = u(phys) - uh;
      e_scalar.add(wj * du * du);
    }
  }
  return {std::sqrt(e_flux.value()), std::sqrt(e_div.value()),
          std::sqrt(e_scalar.value())};
}

}  // namespace hdiv2d

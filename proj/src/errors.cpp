#include "hdiv2d/errors.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "hdiv2d/kahan.hpp"
#include "hdiv2d/quadrature.hpp"

namespace hdiv2d {

ManufacturedSolution exact_fields() {
  // u = pi/2 - arctan(5 (r - pi/3)), r = |x - c|, c = (1.25, -0.25).
  // With w = r - pi/3 and g = 1 + 25 w^2:
  //   grad u = -5/g * (x - c)/r
  //   sigma  = -grad u
  //   f = div sigma = -lap u = 5/(r g) - 250 w / g^2
  const Eigen::Vector2d center(1.25, -0.25);
  const double radius = M_PI / 3.0;
  const double slope = 5.0;

  auto parts = [center, radius](const Eigen::Vector2d& p, double& r, double& w,
                                double& g) {
    r = (p - center).norm();
    w = r - radius;
    g = 1.0 + 25.0 * w * w;
  };

  ManufacturedSolution ms;
  ms.u = [parts](const Eigen::Vector2d& p) {
    double r, w, g;
    parts(p, r, w, g);
    return 0.5 * M_PI - std::atan(5.0 * w);
  };
  ms.grad_u = [parts, center, slope](const Eigen::Vector2d& p) {
    double r, w, g;
    parts(p, r, w, g);
    return Eigen::Vector2d(-(slope / g) * (p - center) / r);
  };
  ms.sigma.value = [parts, center, slope](const Eigen::Vector2d& p) {
    double r, w, g;
    parts(p, r, w, g);
    return Eigen::Vector2d((slope / g) * (p - center) / r);
  };
  ms.f = [parts, slope](const Eigen::Vector2d& p) {
    double r, w, g;
    parts(p, r, w, g);
    return slope / (r * g) - 2.0 * slope * 25.0 * w / (g * g);
  };
  ms.sigma.divergence = ms.f;
  return ms;
}

ErrorNorms l2_errors(const MixedSolution& solution,
                     const ManufacturedSolution& exact, const Mesh2D& mesh,
                     const DofMap& dofs, int extra_quad) {
  const SpaceConfig& config = dofs.config;
  QuadRule rule = master_rule(config.shape, 2 * config.order() + 2 + extra_quad);
  ScalarBasis pot = divergence_scalar_basis(config);
  Eigen::MatrixXd sphi(pot.size(), rule.size());
  for (int i = 0; i < pot.size(); ++i)
    for (int q = 0; q < rule.size(); ++q) sphi(i, q) = pot.eval(i, rule.points[q]);

  std::map<uint8_t, std::pair<HDivBasis, BasisTable>> cache;
  auto table_for = [&](const Element& el) -> const std::pair<HDivBasis, BasisTable>& {
    uint8_t mask = 0;
    for (int le = 0; le < el.num_edges(); ++le)
      if (el.edge_flipped(le)) mask |= uint8_t(1) << le;
    auto it = cache.find(mask);
    if (it == cache.end()) {
      HDivBasis basis = build_hdiv_basis(
          config, {bool(mask & 1), bool(mask & 2), bool(mask & 4), bool(mask & 8)});
      BasisTable table = tabulate(basis, rule.points);
      it = cache.emplace(mask, std::make_pair(std::move(basis), std::move(table))).first;
    }
    return it->second;
  };

  KahanSum e_flux, e_pot, e_div;
  const int nk = dofs.edge_dofs_per_edge;
  for (int el_id = 0; el_id < mesh.n_elements(); ++el_id) {
    const Element& el = mesh.elements[el_id];
    const auto& [basis, table] = table_for(el);
    const GeoMap map = mesh.geo_map(el_id);

    Eigen::VectorXd local(basis.size());
    int pos = 0;
    for (int le = 0; le < el.num_edges(); ++le)
      for (int j = 0; j < nk; ++j, ++pos)
        local[pos] =
            el.edge_signs[le] * solution.flux[dofs.edge_dof(el.edge_ids[le], j)];
    for (int j = 0; j < dofs.internal_dofs_per_elem; ++j, ++pos)
      local[pos] = solution.flux[dofs.internal_dof(el_id, j)];
    Eigen::VectorXd pcoeff(pot.size());
    for (int m = 0; m < pot.size(); ++m)
      pcoeff[m] = solution.potential[dofs.potential_dof(el_id, m)];

    for (int q = 0; q < rule.size(); ++q) {
      JacobianData jac = jacobian(map, rule.points[q]);
      Eigen::Vector2d phys = eval_map(map, rule.points[q]);
      Eigen::Vector2d vhat(table.vx.col(q).dot(local), table.vy.col(q).dot(local));
      Eigen::Vector2d sig_h = piola_push(jac, vhat);
      const double div_h = piola_div(jac.J, table.dv.col(q).dot(local));
      const double u_h = sphi.col(q).dot(pcoeff);
      const double wj = rule.weights[q] * jac.J;
      e_flux.add(wj * (exact.sigma.value(phys) - sig_h).squaredNorm());
      const double du = exact.u(phys) - u_h;
      e_pot.add(wj * du * du);
      const double dd = exact.sigma.divergence(phys) - div_h;
      e_div.add(wj * dd * dd);
    }
  }
  return {std::sqrt(e_flux.value()), std::sqrt(e_pot.value()),
          std::sqrt(e_div.value())};
}

namespace {

double ls_slope_last3(const std::vector<double>& h, const std::vector<double>& e) {
  const size_t n = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = n - 3; i < n; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
}

void fit_one(const std::vector<double>& h, const std::vector<double>& e,
             std::vector<double>& pairwise, double& ls, bool& monotone) {
  monotone = true;
  for (size_t i = 0; i + 1 < e.size(); ++i) {
    pairwise.push_back(std::log2(e[i] / e[i + 1]) / std::log2(h[i] / h[i + 1]));
    if (e[i + 1] >= e[i]) monotone = false;
  }
  ls = ls_slope_last3(h, e);
}

}  // namespace

FittedOrders fit_orders(const std::vector<LevelRecord>& records) {
  if (records.size() < 3)
    throw std::invalid_argument("fit_orders: needs at least 3 levels");
  std::vector<double> h, ef, ep, ed;
  for (const LevelRecord& r : records) {
    if (!(r.h > 0) || (!h.empty() && r.h >= h.back()))
      throw std::invalid_argument("fit_orders: h must be strictly decreasing");
    if (!(r.errors.flux > 0) || !(r.errors.potential > 0) ||
        !(r.errors.divergence > 0))
      throw std::invalid_argument("fit_orders: errors must be positive");
    h.push_back(r.h);
    ef.push_back(r.errors.flux);
    ep.push_back(r.errors.potential);
    ed.push_back(r.errors.divergence);
  }
  FittedOrders out;
  fit_one(h, ef, out.pairwise_flux, out.ls_flux, out.monotone_flux);
  fit_one(h, ep, out.pairwise_potential, out.ls_potential, out.monotone_potential);
  fit_one(h, ed, out.pairwise_divergence, out.ls_divergence, out.monotone_divergence);
  return out;
}

}  // namespace hdiv2d

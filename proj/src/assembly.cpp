#include "hdiv2d/assembly.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "hdiv2d/kahan.hpp"
#include "hdiv2d/quadrature.hpp"

namespace hdiv2d {

namespace {

uint8_t flip_mask(const Element& el) {
  uint8_t mask = 0;
  for (int le = 0; le < el.num_edges(); ++le)
    if (el.edge_flipped(le)) mask |= uint8_t(1) << le;
  return mask;
}

std::array<bool, 4> flips_of(uint8_t mask) {
  return {bool(mask & 1), bool(mask & 2), bool(mask & 4), bool(mask & 8)};
}

// Per-configuration cache of oriented bases and their tabulated values at
// the element quadrature points.
struct BasisSet {
  QuadRule rule;
  Eigen::VectorXd w;
  std::map<uint8_t, HDivBasis> bases;
  std::map<uint8_t, BasisTable> tables;
  Eigen::MatrixXd scalar;  // potential basis at the quadrature points

  BasisSet(const SpaceConfig& config, const ScalarBasis& pot, int extra_quad) {
    rule = master_rule(config.shape, 2 * config.order() + 2 + extra_quad);
    w = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), rule.size());
    scalar.resize(pot.size(), rule.size());
    for (int i = 0; i < pot.size(); ++i)
      for (int q = 0; q < rule.size(); ++q)
        scalar(i, q) = pot.eval(i, rule.points[q]);
  }

  const HDivBasis& basis(const SpaceConfig& config, uint8_t mask) {
    auto it = bases.find(mask);
    if (it == bases.end())
      it = bases.emplace(mask, build_hdiv_basis(config, flips_of(mask))).first;
    return it->second;
  }
  const BasisTable& table(const SpaceConfig& config, uint8_t mask) {
    auto it = tables.find(mask);
    if (it == tables.end())
      it = tables.emplace(mask, tabulate(basis(config, mask), rule.points)).first;
    return it->second;
  }
};

void check_spd(const Eigen::Matrix2d& K) {
  if (std::abs(K(0, 1) - K(1, 0)) > 1e-12 * K.norm() || K(0, 0) <= 0 ||
      K.determinant() <= 0)
    throw std::runtime_error("assemble_element: permeability sample not SPD");
}

ElementMatrices assemble_element_with(const Mesh2D& mesh, int element_id,
                                      const SpaceConfig& config,
                                      const PermeabilityField& K,
                                      const ScalarField& f, BasisSet& set,
                                      const ScalarBasis& pot) {
  const Element& el = mesh.elements[element_id];
  const GeoMap map = mesh.geo_map(element_id);
  const uint8_t mask = flip_mask(el);
  const BasisTable& table = set.table(config, mask);
  const int nf = static_cast<int>(table.vx.rows());
  const int np = set.rule.size();
  const int ns = static_cast<int>(set.scalar.rows());

  ElementMatrices out;
  out.A = Eigen::MatrixXd::Zero(nf, nf);
  out.f = Eigen::VectorXd::Zero(ns);
  Eigen::VectorXd kv(np);  // per-point weight factors
  Eigen::MatrixXd px(nf, np), py(nf, np);
  for (int q = 0; q < np; ++q) {
    JacobianData jac = jacobian(map, set.rule.points[q]);
    Eigen::Vector2d phys = eval_map(map, set.rule.points[q]);
    Eigen::Matrix2d Kq = K(phys);
    check_spd(Kq);
    Eigen::Matrix2d Kinv = Kq.inverse();
    // int Kinv v_i . v_j dK = sum w/J (Kinv DF vhat_i) . (DF vhat_j)
    for (int i = 0; i < nf; ++i) {
      Eigen::Vector2d vhat(table.vx(i, q), table.vy(i, q));
      Eigen::Vector2d dv = jac.DF * vhat;
      px.col(q)[i] = dv.x();
      py.col(q)[i] = dv.y();
    }
    const double wq = set.rule.weights[q] / jac.J;
    Eigen::MatrixXd vps(nf, 2);
    vps.col(0) = px.col(q);
    vps.col(1) = py.col(q);
    Eigen::MatrixXd kvps = vps * Kinv.transpose();
    out.A += wq * (kvps * vps.transpose());
    out.f += set.rule.weights[q] * jac.J * f(phys) * set.scalar.col(q);
  }
  // int phi_m div v_j dK = sum w phihat_m divhat_j (geometry-free)
  out.B = set.scalar * set.w.asDiagonal() * table.dv.transpose();
  return out;
}

}  // namespace

DofMap build_dof_map(const Mesh2D& mesh, const SpaceConfig& config) {
  if ((config.shape == CellShape::triangle) != (mesh.family == MeshFamily::tri))
    throw std::invalid_argument("build_dof_map: space/mesh shape mismatch");
  HDivBasis basis = build_hdiv_basis(config);
  ScalarBasis pot = divergence_scalar_basis(config);
  DofMap dofs;
  dofs.config = config;
  dofs.n_edges = mesh.n_edges();
  dofs.n_elements = mesh.n_elements();
  dofs.edge_dofs_per_edge = config.k + 1;
  dofs.internal_dofs_per_elem = basis.n_internal;
  dofs.potential_dofs_per_elem = pot.size();
  return dofs;
}

ElementMatrices assemble_element(const Mesh2D& mesh, int element_id,
                                 const SpaceConfig& config,
                                 const PermeabilityField& K,
                                 const ScalarField& f, int extra_quad) {
  ScalarBasis pot = divergence_scalar_basis(config);
  BasisSet set(config, pot, extra_quad);
  return assemble_element_with(mesh, element_id, config, K, f, set, pot);
}

Eigen::VectorXd assemble_dirichlet(const Mesh2D& mesh, const DofMap& dofs,
                                   const ScalarField& u_D) {
  const SpaceConfig& config = dofs.config;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dofs.n_flux_dofs());
  QuadRule rule = gauss_interval(2 * config.k + 2);
  std::map<uint8_t, HDivBasis> bases;
  Eigen::Vector2d v;
  double d;
  for (int ei = 0; ei < mesh.n_edges(); ++ei) {
    const Edge& edge = mesh.edges[ei];
    if (!edge.boundary) continue;
    const int el_id = edge.adjacent_element_ids[0];
    const Element& el = mesh.elements[el_id];
    int le = 0;
    while (el.edge_ids[le] != ei) ++le;
    const uint8_t mask = flip_mask(el);
    auto it = bases.find(mask);
    if (it == bases.end())
      it = bases.emplace(mask, build_hdiv_basis(config, flips_of(mask))).first;
    const HDivBasis& basis = it->second;
    const GeoMap map = mesh.geo_map(el_id);
    const Eigen::Vector2d normal = master_edge_normal(el.shape, le);
    const double half_len = 0.5 * master_edge_length(el.shape, le);
    const double sign = el.edge_signs[le];
    // -<u_D, v . n> over this edge: int_e u_D v.n ds = int_ehat u_D(F) vhat.nhat dshat
    for (int q = 0; q < rule.size(); ++q) {
      const double t = rule.points[q].x();
      Eigen::Vector2d x = master_edge_point(el.shape, le, t);
      const double ud = u_D(eval_map(map, x));
      for (int j = 0; j < dofs.edge_dofs_per_edge; ++j) {
        basis.fns[le * dofs.edge_dofs_per_edge + j].eval(x, v, d);
        rhs[dofs.edge_dof(ei, j)] -=
            sign * rule.weights[q] * half_len * ud * v.dot(normal);
      }
    }
  }
  return rhs;
}

MixedSystem assemble_mixed_system(const Mesh2D& mesh, const DofMap& dofs,
                                  const PermeabilityField& K,
                                  const ScalarField& f, const ScalarField& u_D,
                                  int extra_quad) {
  const SpaceConfig& config = dofs.config;
  ScalarBasis pot = divergence_scalar_basis(config);
  BasisSet set(config, pot, extra_quad);
  MixedSystem system;
  system.mesh = &mesh;
  system.dofs = dofs;
  system.elements.reserve(mesh.n_elements());
  for (int el_id = 0; el_id < mesh.n_elements(); ++el_id) {
    ElementMatrices em =
        assemble_element_with(mesh, el_id, config, K, f, set, pot);
    // Fold orientation signs in: global edge coefficients multiply the
    // local functions by the per-edge sign.
    const Element& el = mesh.elements[el_id];
    const int nk = dofs.edge_dofs_per_edge;
    for (int le = 0; le < el.num_edges(); ++le) {
      if (el.edge_signs[le] > 0) continue;
      em.A.middleRows(le * nk, nk) *= -1.0;
      em.A.middleCols(le * nk, nk) *= -1.0;
      em.B.middleCols(le * nk, nk) *= -1.0;
    }
    system.elements.push_back(std::move(em));
  }
  system.dirichlet_rhs = assemble_dirichlet(mesh, dofs, u_D);
  return system;
}

namespace {

// Global flux indices of an element's local basis, edge block per local
// edge followed by the internal block.
std::vector<int> element_flux_dofs(const Mesh2D& mesh, const DofMap& dofs,
                                   int el_id) {
  const Element& el = mesh.elements[el_id];
  std::vector<int> idx;
  const int nk = dofs.edge_dofs_per_edge;
  for (int le = 0; le < el.num_edges(); ++le)
    for (int j = 0; j < nk; ++j) idx.push_back(dofs.edge_dof(el.edge_ids[le], j));
  for (int j = 0; j < dofs.internal_dofs_per_elem; ++j)
    idx.push_back(dofs.internal_dof(el_id, j));
  return idx;
}

}  // namespace

SparseMatrix MixedSystem::global_matrix() const {
  const int nflux = dofs.n_flux_dofs();
  const int npot = dofs.n_potential_dofs();
  std::vector<Eigen::Triplet<double>> trips;
  for (int el_id = 0; el_id < mesh->n_elements(); ++el_id) {
    const ElementMatrices& em = elements[el_id];
    std::vector<int> fidx = element_flux_dofs(*mesh, dofs, el_id);
    const int nf = static_cast<int>(fidx.size());
    for (int i = 0; i < nf; ++i)
      for (int j = 0; j < nf; ++j)
        if (em.A(i, j) != 0.0) trips.emplace_back(fidx[i], fidx[j], em.A(i, j));
    for (int m = 0; m < dofs.potential_dofs_per_elem; ++m) {
      const int gm = nflux + dofs.potential_dof(el_id, m);
      for (int j = 0; j < nf; ++j)
        if (em.B(m, j) != 0.0) {
          trips.emplace_back(fidx[j], gm, -em.B(m, j));
          trips.emplace_back(gm, fidx[j], -em.B(m, j));
        }
    }
  }
  return SparseMatrix::from_triplets(nflux + npot, trips, true);
}

Eigen::VectorXd MixedSystem::global_rhs() const {
  const int nflux = dofs.n_flux_dofs();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nflux + dofs.n_potential_dofs());
  rhs.head(nflux) = dirichlet_rhs;
  for (int el_id = 0; el_id < mesh->n_elements(); ++el_id)
    for (int m = 0; m < dofs.potential_dofs_per_elem; ++m)
      rhs[nflux + dofs.potential_dof(el_id, m)] = -elements[el_id].f[m];
  return rhs;
}

CondensedSystem condense(const MixedSystem& system) {
  const Mesh2D& mesh = *system.mesh;
  const DofMap& dofs = system.dofs;
  const int n_edge_dofs = dofs.n_edge_dofs();
  const int dim = n_edge_dofs + dofs.n_elements;

  CondensedSystem out;
  out.system_ = &system;
  out.dim_ = dim;
  out.rhs_ = Eigen::VectorXd::Zero(dim);
  out.rhs_.head(n_edge_dofs) = system.dirichlet_rhs.head(n_edge_dofs);
  out.recovery_.resize(mesh.n_elements());

  std::vector<Eigen::Triplet<double>> trips;
  const int nk = dofs.edge_dofs_per_edge;
  const int ni = dofs.internal_dofs_per_elem;
  const int npot = dofs.potential_dofs_per_elem;
  for (int el_id = 0; el_id < mesh.n_elements(); ++el_id) {
    const Element& el = mesh.elements[el_id];
    const ElementMatrices& em = system.elements[el_id];
    const int ne = el.num_edges() * nk;        // local edge flux dofs
    const int nkeep = ne + 1;                  // + constant potential
    const int nelim = ni + (npot - 1);         // internal flux + higher modes

    // Local saddle matrix [[A, -B'], [-B, 0]] in the kept/eliminated split.
    Eigen::MatrixXd Mkk = Eigen::MatrixXd::Zero(nkeep, nkeep);
    Eigen::MatrixXd Mke = Eigen::MatrixXd::Zero(nkeep, nelim);
    Eigen::MatrixXd Mee = Eigen::MatrixXd::Zero(nelim, nelim);
    Mkk.topLeftCorner(ne, ne) = em.A.topLeftCorner(ne, ne);
    Mkk.block(0, ne, ne, 1) = -em.B.row(0).head(ne).transpose();
    Mkk.block(ne, 0, 1, ne) = -em.B.row(0).head(ne);
    if (nelim > 0) {
      Mke.topLeftCorner(ne, ni) = em.A.topRightCorner(ne, ni);
      Mke.block(ne, 0, 1, ni) = -em.B.row(0).tail(ni);
      Mke.block(0, ni, ne, npot - 1) =
          -em.B.bottomRows(npot - 1).leftCols(ne).transpose();
      Mee.topLeftCorner(ni, ni) = em.A.bottomRightCorner(ni, ni);
      Mee.topRightCorner(ni, npot - 1) =
          -em.B.bottomRows(npot - 1).rightCols(ni).transpose();
      Mee.bottomLeftCorner(npot - 1, ni) = -em.B.bottomRows(npot - 1).rightCols(ni);
    }
    Eigen::VectorXd r_keep = Eigen::VectorXd::Zero(nkeep);
    r_keep[ne] = -em.f[0];
    Eigen::VectorXd r_elim(nelim);
    r_elim.head(ni).setZero();
    r_elim.tail(npot - 1) = -em.f.tail(npot - 1);

    auto& rec = out.recovery_[el_id];
    Eigen::MatrixXd schur = Mkk;
    Eigen::VectorXd rhs_red = r_keep;
    if (nelim > 0) {
      rec.elim_lu.compute(Mee);
      if ((rec.elim_lu.matrixLU().diagonal().array().abs() <
           1e-14 * Mee.norm())
              .any())
        throw std::runtime_error("condense: singular local elimination block");
      rec.coupling = Mke.transpose();  // = Mek by symmetry
      rec.rhs_elim = r_elim;
      Eigen::MatrixXd inv_coupling = rec.elim_lu.solve(rec.coupling);
      schur -= Mke * inv_coupling;
      rhs_red -= Mke * rec.elim_lu.solve(r_elim);
    }

    // Scatter into edge dofs + this element's constant potential dof.
    std::vector<int> kept(nkeep);
    for (int le = 0; le < el.num_edges(); ++le)
      for (int j = 0; j < nk; ++j)
        kept[le * nk + j] = dofs.edge_dof(el.edge_ids[le], j);
    kept[ne] = n_edge_dofs + el_id;
    for (int i = 0; i < nkeep; ++i) {
      out.rhs_[kept[i]] += rhs_red[i];
      for (int j = 0; j < nkeep; ++j)
        if (schur(i, j) != 0.0) trips.emplace_back(kept[i], kept[j], schur(i, j));
    }
  }
  // Dirichlet data enters kept rows only, already placed in out.rhs_.
  out.S_ = SparseMatrix::from_triplets(dim, trips, true);
  return out;
}

void CondensedSystem::recover(const Eigen::VectorXd& condensed,
                              Eigen::VectorXd& flux,
                              Eigen::VectorXd& potential) const {
  const MixedSystem& system = *system_;
  const Mesh2D& mesh = *system.mesh;
  const DofMap& dofs = system.dofs;
  const int n_edge_dofs = dofs.n_edge_dofs();
  const int nk = dofs.edge_dofs_per_edge;
  const int ni = dofs.internal_dofs_per_elem;
  const int npot = dofs.potential_dofs_per_elem;

  flux = Eigen::VectorXd::Zero(dofs.n_flux_dofs());
  flux.head(n_edge_dofs) = condensed.head(n_edge_dofs);
  potential = Eigen::VectorXd::Zero(dofs.n_potential_dofs());

  for (int el_id = 0; el_id < mesh.n_elements(); ++el_id) {
    const Element& el = mesh.elements[el_id];
    const int ne = el.num_edges() * nk;
    potential[dofs.potential_dof(el_id, 0)] = condensed[n_edge_dofs + el_id];
    const int nelim = ni + (npot - 1);
    if (nelim == 0) continue;
    Eigen::VectorXd xk(ne + 1);
    for (int le = 0; le < el.num_edges(); ++le)
      for (int j = 0; j < nk; ++j)
        xk[le * nk + j] = condensed[dofs.edge_dof(el.edge_ids[le], j)];
    xk[ne] = condensed[n_edge_dofs + el_id];
    const auto& rec = recovery_[el_id];
    Eigen::VectorXd xe = rec.elim_lu.solve(rec.rhs_elim - rec.coupling * xk);
    for (int j = 0; j < ni; ++j) flux[dofs.internal_dof(el_id, j)] = xe[j];
    for (int m = 1; m < npot; ++m)
      potential[dofs.potential_dof(el_id, m)] = xe[ni + m - 1];
  }
}

MixedSolution solve_condensed(const MixedSystem& system) {
  CondensedSystem cond = condense(system);
  Eigen::VectorXd x = factor_and_solve(cond.matrix(), cond.rhs());
  MixedSolution sol;
  cond.recover(x, sol.flux, sol.potential);
  return sol;
}

MixedSolution solve_direct(const MixedSystem& system) {
  Eigen::VectorXd x = factor_and_solve(system.global_matrix(), system.global_rhs());
  MixedSolution sol;
  sol.flux = x.head(system.dofs.n_flux_dofs());
  sol.potential = x.tail(system.dofs.n_potential_dofs());
  return sol;
}

double max_normal_jump(const Mesh2D& mesh, const DofMap& dofs,
                       const Eigen::VectorXd& flux) {
  const SpaceConfig& config = dofs.config;
  QuadRule rule = gauss_interval(2 * config.order() + 2);
  std::map<uint8_t, HDivBasis> bases;
  auto basis_for = [&](const Element& el) -> const HDivBasis& {
    const uint8_t mask = flip_mask(el);
    auto it = bases.find(mask);
    if (it == bases.end())
      it = bases.emplace(mask, build_hdiv_basis(config, flips_of(mask))).first;
    return it->second;
  };

  double worst = 0.0;
  for (int ei = 0; ei < mesh.n_edges(); ++ei) {
    const Edge& edge = mesh.edges[ei];
    if (edge.boundary) continue;
    const Vertex& a = mesh.vertices[edge.vertex_ids[0]];
    const Vertex& b = mesh.vertices[edge.vertex_ids[1]];
    Eigen::Vector2d dir(b.x - a.x, b.y - a.y);
    Eigen::Vector2d n_global = Eigen::Vector2d(dir.y(), -dir.x()).normalized();

    std::array<double, 2> trace{0.0, 0.0};
    for (int q = 0; q < rule.size(); ++q) {
      const double t = rule.points[q].x();
      for (int side = 0; side < 2; ++side) {
        const int el_id = edge.adjacent_element_ids[side];
        const Element& el = mesh.elements[el_id];
        int le = 0;
        while (el.edge_ids[le] != ei) ++le;
        const double t_loc = el.edge_flipped(le) ? -t : t;
        Eigen::Vector2d x = master_edge_point(el.shape, le, t_loc);
        const HDivBasis& basis = basis_for(el);
        JacobianData jac = jacobian(mesh.geo_map(el_id), x);
        Eigen::Vector2d vhat = Eigen::Vector2d::Zero(), v;
        double d;
        const int nk = dofs.edge_dofs_per_edge;
        for (int lle = 0; lle < el.num_edges(); ++lle)
          for (int j = 0; j < nk; ++j) {
            basis.fns[lle * nk + j].eval(x, v, d);
            vhat += el.edge_signs[lle] *
                    flux[dofs.edge_dof(el.edge_ids[lle], j)] * v;
          }
        for (int j = 0; j < dofs.internal_dofs_per_elem; ++j) {
          basis.fns[basis.n_edge + j].eval(x, v, d);
          vhat += flux[dofs.internal_dof(el_id, j)] * v;
        }
        trace[side] = piola_push(jac, vhat).dot(n_global);
      }
      worst = std::max(worst, std::abs(trace[0] - trace[1]));
    }
  }
  return worst;
}

double max_conservation_defect(const Mesh2D& mesh, const DofMap& dofs,
                               const Eigen::VectorXd& flux,
                               const ScalarField& f, int extra_quad) {
  const SpaceConfig& config = dofs.config;
  ScalarBasis pot = divergence_scalar_basis(config);
  BasisSet set(config, pot, extra_quad);
  double worst = 0.0;
  const int nk = dofs.edge_dofs_per_edge;
  for (int el_id = 0; el_id < mesh.n_elements(); ++el_id) {
    const Element& el = mesh.elements[el_id];
    const BasisTable& table = set.table(config, flip_mask(el));
    const GeoMap map = mesh.geo_map(el_id);
    Eigen::VectorXd local(table.vx.rows());
    int pos = 0;
    for (int le = 0; le < el.num_edges(); ++le)
      for (int j = 0; j < nk; ++j, ++pos)
        local[pos] = el.edge_signs[le] * flux[dofs.edge_dof(el.edge_ids[le], j)];
    for (int j = 0; j < dofs.internal_dofs_per_elem; ++j, ++pos)
      local[pos] = flux[dofs.internal_dof(el_id, j)];

    KahanSum div_int, f_int;
    for (int q = 0; q < set.rule.size(); ++q) {
      JacobianData jac = jacobian(map, set.rule.points[q]);
      // int_K div sigma_h dK = int_Khat divhat dKhat by the Piola relation
      div_int.add(set.rule.weights[q] * table.dv.col(q).dot(local));
      f_int.add(set.rule.weights[q] * jac.J * f(eval_map(map, set.rule.points[q])));
    }
    worst = std::max(worst, std::abs(div_int.value() - f_int.value()));
  }
  return worst;
}

}  // namespace hdiv2d

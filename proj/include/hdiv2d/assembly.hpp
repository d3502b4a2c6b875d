// Global degree-of-freedom management, element-matrix assembly for the
// mixed Darcy formulation, Dirichlet boundary data, and exact static
// condensation onto edge fluxes plus one constant potential per element.

#ifndef HDIV2D_ASSEMBLY_HPP
#define HDIV2D_ASSEMBLY_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "hdiv2d/mesh.hpp"
#include "hdiv2d/projection.hpp"
#include "hdiv2d/solver.hpp"
#include "hdiv2d/spaces.hpp"

namespace hdiv2d {

using PermeabilityField =
    std::function<Eigen::Matrix2d(const Eigen::Vector2d&)>;

/// Conforming global numbering: shared edge-flux DOFs (k+1 per edge, with
/// orientation signs stored on the elements), element-internal flux DOFs,
/// and element potential DOFs whose first mode is the constant.
struct DofMap {
  SpaceConfig config;
  int n_edges = 0;
  int n_elements = 0;
  int edge_dofs_per_edge = 0;      // k+1
  int internal_dofs_per_elem = 0;
  int potential_dofs_per_elem = 0;

  int n_edge_dofs() const { return edge_dofs_per_edge * n_edges; }
  int n_flux_dofs() const {
    return n_edge_dofs() + internal_dofs_per_elem * n_elements;
  }
  int n_potential_dofs() const { return potential_dofs_per_elem * n_elements; }

  int edge_dof(int edge, int j) const { return edge * edge_dofs_per_edge + j; }
  int internal_dof(int elem, int j) const {
    return n_edge_dofs() + elem * internal_dofs_per_elem + j;
  }
  int potential_dof(int elem, int m) const {
    return elem * potential_dofs_per_elem + m;
  }
};

DofMap build_dof_map(const Mesh2D& mesh, const SpaceConfig& config);

struct ElementMatrices {
  Eigen::MatrixXd A;  // A[i][j] = int_K Kinv v_i . v_j
  Eigen::MatrixXd B;  // B[m][j] = int_K phi_m div v_j
  Eigen::VectorXd f;  // f[m] = int_K f phi_m
};

/// Element blocks in the element-local basis (no orientation signs
/// applied).  Throws std::runtime_error on a non-SPD permeability sample
/// or degenerate geometry.
ElementMatrices assemble_element(const Mesh2D& mesh, int element_id,
                                 const SpaceConfig& config,
                                 const PermeabilityField& K,
                                 const ScalarField& f, int extra_quad = 0);

/// Flux-equation right-hand side from Dirichlet data: for every boundary
/// edge DOF, -int_edge u_D (v . n) ds, in global DOF convention.
Eigen::VectorXd assemble_dirichlet(const Mesh2D& mesh, const DofMap& dofs,
                                   const ScalarField& u_D);

/// Assembled mixed system kept as per-element blocks (global coefficient
/// convention: orientation signs folded in) plus the Dirichlet flux RHS.
struct MixedSystem {
  const Mesh2D* mesh = nullptr;
  DofMap dofs;
  std::vector<ElementMatrices> elements;
  Eigen::VectorXd dirichlet_rhs;

  /// Global saddle matrix [[A, -B'], [-B, 0]] with rhs [g; -f].
  SparseMatrix global_matrix() const;
  Eigen::VectorXd global_rhs() const;
};

MixedSystem assemble_mixed_system(const Mesh2D& mesh, const DofMap& dofs,
                                  const PermeabilityField& K,
                                  const ScalarField& f, const ScalarField& u_D,
                                  int extra_quad = 0);

/// Reduced system over edge fluxes plus one constant potential per element.
/// Internal fluxes and non-constant potential modes are eliminated by exact
/// per-element block elimination; recovery operators reproduce them.
class CondensedSystem {
 public:
  int dim() const { return dim_; }
  const SparseMatrix& matrix() const { return S_; }
  const Eigen::VectorXd& rhs() const { return rhs_; }

  /// Expands the condensed solution to full flux / potential coefficient
  /// vectors (global convention).
  void recover(const Eigen::VectorXd& condensed, Eigen::VectorXd& flux,
               Eigen::VectorXd& potential) const;

  friend CondensedSystem condense(const MixedSystem& system);

 private:
  const MixedSystem* system_ = nullptr;
  int dim_ = 0;
  SparseMatrix S_;
  Eigen::VectorXd rhs_;
  struct ElementRecovery {
    Eigen::PartialPivLU<Eigen::MatrixXd> elim_lu;
    Eigen::MatrixXd coupling;  // eliminated x kept
    Eigen::VectorXd rhs_elim;
  };
  std::vector<ElementRecovery> recovery_;
};

/// Throws std::runtime_error if a local elimination block is singular.
CondensedSystem condense(const MixedSystem& system);

struct MixedSolution {
  Eigen::VectorXd flux;       // global flux coefficients
  Eigen::VectorXd potential;  // per-element scalar coefficients
};

MixedSolution solve_condensed(const MixedSystem& system);
MixedSolution solve_direct(const MixedSystem& system);

/// Largest normal-flux jump across interior edges, sampled at edge
/// quadrature points (conformity certificate).
double max_normal_jump(const Mesh2D& mesh, const DofMap& dofs,
                       const Eigen::VectorXd& flux);

/// Largest per-element defect |int_K div sigma_h - int_K f| (discrete
/// conservation certificate).
double max_conservation_defect(const Mesh2D& mesh, const DofMap& dofs,
                               const Eigen::VectorXd& flux,
                               const ScalarField& f, int extra_quad = 0);

}  // namespace hdiv2d

#endif

// Batch convergence studies: run a mesh sequence for a family of enriched
// spaces, fit rates, compare against the expected orders, and emit CSV and
// SVG artifacts.

#ifndef HDIV2D_STUDY_HPP
#define HDIV2D_STUDY_HPP

#include <optional>
#include <string>
#include <vector>

#include "hdiv2d/errors.hpp"
#include "hdiv2d/mesh.hpp"
#include "hdiv2d/spaces.hpp"

namespace hdiv2d {

struct StudyConfig {
  MeshFamily mesh = MeshFamily::rect;
  SpaceFamily family = SpaceFamily::RT;
  int k = 1;
  std::vector<int> n_list;
  int i_min = 2;
  int i_max = 5;
  std::string out_dir = "out";
  bool direct_solve = false;  // skip static condensation
  int extra_quad = 0;         // bump for element matrices
  bool write_files = true;

  /// Throws std::invalid_argument on incompatible family/mesh pairing,
  /// empty n_list, or unsupported levels (needs >= 3 levels in 1..8).
  void validate() const;
};

struct ExpectedOrders {
  double flux = 0;
  double potential = 0;
  double divergence = 0;
};

/// Expected L2 convergence orders for the mixed method.
/// BDM/tri: flux k+1; potential k, k+1, k+2 (n = 0, 1, >= 2); divergence
/// k+n.  RT/affine: flux k+1; potential k+1 (n = 0) else k+2; divergence
/// k+n+1.  RT/non-affine: flux k+1; potential as affine; divergence k
/// (n = 0) else k+n.
ExpectedOrders expected_orders(SpaceFamily family, MeshFamily mesh, int k,
                               int n);

struct RunRecord {
  int n = 0;
  int i = 0;
  double h = 0;
  int dofs_total = 0;
  int dofs_condensed = 0;
  ErrorNorms errors;
  std::string status = "ok";
};

struct StudyOutcome {
  StudyConfig config;
  std::vector<RunRecord> runs;               // ordered by (n, i)
  std::vector<std::pair<int, FittedOrders>> orders;  // per n
  std::vector<std::pair<int, bool>> passed;          // per n, +-0.2 band
  bool all_passed = true;
  std::string csv_path;
};

/// Runs the study; per-run failures are recorded in the CSV status column
/// and the study continues.
StudyOutcome run_study(const StudyConfig& config);

std::string to_string(MeshFamily family);
std::string to_string(SpaceFamily family);
std::optional<MeshFamily> parse_mesh_family(const std::string& s);
std::optional<SpaceFamily> parse_space_family(const std::string& s);

}  // namespace hdiv2d

#endif

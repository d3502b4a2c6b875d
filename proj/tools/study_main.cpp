// Convergence-study driver.  With --mesh/--family it runs one study; with
// no selection it reproduces the default rate table (rect/RT, tri/BDM,
// trap/RT at k = 1, 2; add k = 3, 4 with --big).  Exit code 0 iff every
// fitted slope lands within +-0.2 of its expected order.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hdiv2d/study.hpp"

namespace {

struct Options {
  std::string mesh;
  std::string family;
  int k = 1;
  std::vector<int> n_list;
  std::string levels = "2..5";
  std::string out_dir = "out";
  bool direct = false;
  bool big = false;
};

bool parse_levels(const std::string& text, int& lo, int& hi) {
  const auto pos = text.find("..");
  if (pos == std::string::npos) return false;
  try {
    lo = std::stoi(text.substr(0, pos));
    hi = std::stoi(text.substr(pos + 2));
  } catch (...) {
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixed H(div) convergence studies"};
  app.set_config("--config", "", "flat key=value config file");

  Options opt;
  app.add_option("--mesh", opt.mesh, "mesh family: rect, tri, trap");
  app.add_option("--family", opt.family, "flux family: RT, BDM");
  app.add_option("--k", opt.k, "edge-trace degree (>= 1)");
  app.add_option("--n", opt.n_list, "enrichment levels, e.g. 0,1,2")
      ->delimiter(',');
  app.add_option("--levels", opt.levels, "refinement range LO..HI (default 2..5)");
  app.add_option("--out", opt.out_dir, "output directory");
  app.add_flag("--direct", opt.direct, "solve the full saddle system (no condensation)");
  app.add_flag("--big", opt.big, "default study also runs k = 3, 4");
  CLI11_PARSE(app, argc, argv);

  int lo = 2, hi = 5;
  if (!parse_levels(opt.levels, lo, hi)) {
    std::fprintf(stderr, "error: cannot parse --levels '%s' (expected LO..HI)\n",
                 opt.levels.c_str());
    return 2;
  }

  std::vector<hdiv2d::StudyConfig> configs;
  if (opt.mesh.empty() && opt.family.empty()) {
    // Default suite: every supported mesh/family row.
    std::vector<int> ks = {1, 2};
    if (opt.big) {
      ks.push_back(3);
      ks.push_back(4);
    }
    for (int k : ks) {
      configs.push_back({hdiv2d::MeshFamily::rect, hdiv2d::SpaceFamily::RT, k,
                         {0, 1, 2}, lo, hi, opt.out_dir, opt.direct});
      configs.push_back({hdiv2d::MeshFamily::tri, hdiv2d::SpaceFamily::BDM, k,
                         {0, 1, 2}, lo, hi, opt.out_dir, opt.direct});
      configs.push_back({hdiv2d::MeshFamily::trap, hdiv2d::SpaceFamily::RT, k,
                         {0, 1, 2, 3}, lo, hi, opt.out_dir, opt.direct});
    }
  } else {
    auto mesh = hdiv2d::parse_mesh_family(opt.mesh);
    auto family = hdiv2d::parse_space_family(opt.family);
    if (!mesh) {
      std::fprintf(stderr, "error: unknown mesh family '%s'\n", opt.mesh.c_str());
      return 2;
    }
    if (!family) {
      std::fprintf(stderr, "error: unknown flux family '%s'\n", opt.family.c_str());
      return 2;
    }
    if (opt.n_list.empty()) {
      std::fprintf(stderr, "error: --n must list at least one enrichment level\n");
      return 2;
    }
    configs.push_back({*mesh, *family, opt.k, opt.n_list, lo, hi, opt.out_dir,
                       opt.direct});
  }

  bool all_passed = true;
  try {
    for (const auto& config : configs) {
      hdiv2d::StudyOutcome outcome = hdiv2d::run_study(config);
      all_passed = all_passed && outcome.all_passed;
    }
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  }
  std::printf("%s\n", all_passed ? "ALL PASS" : "FAILURES");
  return all_passed ? 0 : 1;
}

#include "hdiv2d/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "hdiv2d/svg.hpp"

namespace hdiv2d {

std::string to_string(MeshFamily family) {
  switch (family) {
    case MeshFamily::rect: return "rect";
    case MeshFamily::tri: return "tri";
    default: return "trap";
  }
}

std::string to_string(SpaceFamily family) {
  return family == SpaceFamily::RT ? "RT" : "BDM";
}

std::optional<MeshFamily> parse_mesh_family(const std::string& s) {
  if (s == "rect") return MeshFamily::rect;
  if (s == "tri") return MeshFamily::tri;
  if (s == "trap") return MeshFamily::trap;
  return std::nullopt;
}

std::optional<SpaceFamily> parse_space_family(const std::string& s) {
  if (s == "RT") return SpaceFamily::RT;
  if (s == "BDM") return SpaceFamily::BDM;
  return std::nullopt;
}

void StudyConfig::validate() const {
  const bool tri_mesh = (mesh == MeshFamily::tri);
  if ((family == SpaceFamily::BDM) != tri_mesh)
    throw std::invalid_argument(
        "study: RT pairs with rect/trap meshes, BDM with tri meshes");
  if (n_list.empty()) throw std::invalid_argument("study: empty n list");
  for (int n : n_list)
    if (n < 0) throw std::invalid_argument("study: n must be >= 0");
  if (k < 1) throw std::invalid_argument("study: k must be >= 1");
  if (i_min < 1 || i_max > 8 || i_max - i_min < 2)
    throw std::invalid_argument("study: need at least 3 levels within 1..8");
}

ExpectedOrders expected_orders(SpaceFamily family, MeshFamily mesh, int k,
                               int n) {
  const bool tri_mesh = (mesh == MeshFamily::tri);
  if ((family == SpaceFamily::BDM) != tri_mesh || k < 1 || n < 0)
    throw std::invalid_argument("expected_orders: invalid combination");
  ExpectedOrders e;
  e.flux = k + 1;
  if (family == SpaceFamily::BDM) {
    e.potential = (n == 0) ? k : (n == 1 ? k + 1 : k + 2);
    e.divergence = k + n;
  } else if (mesh == MeshFamily::rect) {
    e.potential = (n == 0) ? k + 1 : k + 2;
    e.divergence = k + n + 1;
  } else {  // non-affine quadrilaterals
    e.potential = (n == 0) ? k + 1 : k + 2;
    e.divergence = (n == 0) ? k : k + n;
  }
  return e;
}

namespace {

Mesh2D build_mesh(MeshFamily family, int i) {
  switch (family) {
    case MeshFamily::rect: return build_rect_mesh(i);
    case MeshFamily::tri: return build_tri_mesh(i);
    default: return build_trap_mesh(i);
  }
}

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

constexpr double kSlopeBand = 0.2;

bool within_band(double slope, double expected) {
  return std::abs(slope - expected) <= kSlopeBand;
}

}  // namespace

StudyOutcome run_study(const StudyConfig& config) {
  config.validate();
  StudyOutcome outcome;
  outcome.config = config;

  ManufacturedSolution exact = exact_fields();
  PermeabilityField perm = [](const Eigen::Vector2d&) {
    return Eigen::Matrix2d::Identity();
  };

  std::vector<int> ns = config.n_list;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  std::ofstream csv;
  if (config.write_files) {
    std::filesystem::create_directories(config.out_dir);
    outcome.csv_path = config.out_dir + "/study_" + to_string(config.mesh) +
                       "_" + to_string(config.family) + "_k" +
                       std::to_string(config.k) + ".csv";
    csv.open(outcome.csv_path);
    csv << "family,k,n,i,h,dofs_total,dofs_condensed,e_flux,e_pot,e_div,"
           "slope_flux,slope_pot,slope_div,status\n";
  }

  struct SeriesSet {
    PlotSeries flux, pot, div;
  };
  std::vector<SeriesSet> plots;

  for (int n : ns) {
    SpaceConfig space(config.family, config.k, n);
    std::vector<LevelRecord> records;
    SeriesSet series;
    series.flux.label = series.pot.label = series.div.label =
        "n=" + std::to_string(n);
    ErrorNorms prev;
    bool have_prev = false;

    for (int i = config.i_min; i <= config.i_max; ++i) {
      RunRecord run;
      run.n = n;
      run.i = i;
      run.h = std::ldexp(1.0, -i);
      try {
        Mesh2D mesh = build_mesh(config.mesh, i);
        DofMap dofs = build_dof_map(mesh, space);
        run.dofs_total = dofs.n_flux_dofs() + dofs.n_potential_dofs();
        run.dofs_condensed = dofs.n_edge_dofs() + mesh.n_elements();
        MixedSystem system = assemble_mixed_system(mesh, dofs, perm, exact.f,
                                                   exact.u, config.extra_quad);
        MixedSolution sol =
            config.direct_solve ? solve_direct(system) : solve_condensed(system);
        run.errors = l2_errors(sol, exact, mesh, dofs);
        records.push_back({i, run.h, run.errors});
        series.flux.x.push_back(run.h);
        series.flux.y.push_back(run.errors.flux);
        series.pot.x.push_back(run.h);
        series.pot.y.push_back(run.errors.potential);
        series.div.x.push_back(run.h);
        series.div.y.push_back(run.errors.divergence);
      } catch (const std::exception& ex) {
        run.status = ex.what();
        outcome.all_passed = false;
      }
      if (csv.is_open()) {
        csv << to_string(config.family) << "," << config.k << "," << n << ","
            << i << "," << g(run.h) << "," << run.dofs_total << ","
            << run.dofs_condensed << ",";
        if (run.status == "ok") {
          csv << g(run.errors.flux) << "," << g(run.errors.potential) << ","
              << g(run.errors.divergence) << ",";
          if (have_prev) {
            csv << g(std::log2(prev.flux / run.errors.flux)) << ","
                << g(std::log2(prev.potential / run.errors.potential)) << ","
                << g(std::log2(prev.divergence / run.errors.divergence)) << ",";
          } else {
            csv << ",,,";
          }
        } else {
          csv << ",,,,,,";
        }
        csv << run.status << "\n";
        csv.flush();
      }
      if (run.status == "ok") {
        prev = run.errors;
        have_prev = true;
      }
      outcome.runs.push_back(run);
    }

    if (records.size() == size_t(config.i_max - config.i_min + 1)) {
      FittedOrders orders = fit_orders(records);
      ExpectedOrders want =
          expected_orders(config.family, config.mesh, config.k, n);
      bool pass = within_band(orders.ls_flux, want.flux) &&
                  within_band(orders.ls_potential, want.potential) &&
                  within_band(orders.ls_divergence, want.divergence);
      outcome.orders.emplace_back(n, orders);
      outcome.passed.emplace_back(n, pass);
      outcome.all_passed = outcome.all_passed && pass;
    } else {
      outcome.passed.emplace_back(n, false);
      outcome.all_passed = false;
    }
    plots.push_back(std::move(series));
  }

  if (config.write_files) {
    auto emit = [&](const std::string& kind,
                    PlotSeries SeriesSet::*member, double base_order) {
      std::vector<PlotSeries> list;
      std::vector<double> refs;
      for (size_t idx = 0; idx < plots.size(); ++idx) {
        list.push_back(plots[idx].*member);
        ExpectedOrders want =
            expected_orders(config.family, config.mesh, config.k, ns[idx]);
        double order = kind == "flux" ? want.flux
                       : kind == "potential" ? want.potential
                                             : want.divergence;
        if (std::find(refs.begin(), refs.end(), order) == refs.end())
          refs.push_back(order);
      }
      (void)base_order;
      std::string title = to_string(config.family) + std::to_string(config.k) +
                          " on " + to_string(config.mesh) + " meshes: " + kind +
                          " error";
      write_file(config.out_dir + "/" + to_string(config.mesh) + "_" +
                     to_string(config.family) + "_k" + std::to_string(config.k) +
                     "_" + kind + ".svg",
                 loglog_svg(title, "h", "L2 error", list, refs));
    };
    emit("flux", &SeriesSet::flux, config.k + 1);
    emit("potential", &SeriesSet::pot, config.k + 1);
    emit("divergence", &SeriesSet::div, config.k + 1);
  }

  // rate table
  std::printf("study %s/%s k=%d  levels %d..%d%s\n",
              to_string(config.mesh).c_str(), to_string(config.family).c_str(),
              config.k, config.i_min, config.i_max,
              config.direct_solve ? "  (direct solve)" : "");
  std::printf("  %-4s %-28s %-28s %-28s %s\n", "n", "flux slope (expect)",
              "potential slope (expect)", "divergence slope (expect)", "verdict");
  for (size_t idx = 0; idx < outcome.orders.size(); ++idx) {
    const auto& [n, orders] = outcome.orders[idx];
    ExpectedOrders want = expected_orders(config.family, config.mesh, config.k, n);
    const bool pass = outcome.passed[idx].second;
    std::printf("  %-4d %6.3f (%g)%18s %6.3f (%g)%18s %6.3f (%g)%18s %s\n", n,
                orders.ls_flux, want.flux, "", orders.ls_potential,
                want.potential, "", orders.ls_divergence, want.divergence, "",
                pass ? "PASS" : "FAIL");
    if (!orders.monotone_flux || !orders.monotone_potential ||
        !orders.monotone_divergence)
      std::printf("  %-4s non-monotone error sequence flagged\n", "");
  }
  return outcome;
}

}  // namespace hdiv2d

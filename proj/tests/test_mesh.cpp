#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hdiv2d/mesh.hpp"
#include "hdiv2d/quadrature.hpp"

using namespace hdiv2d;

namespace {

double total_area(const Mesh2D& mesh) {
  QuadRule qr = master_rule(CellShape::quadrilateral, 4);
  QuadRule tr = master_rule(CellShape::triangle, 4);
  double area = 0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const QuadRule& rule =
        mesh.elements[e].shape == CellShape::triangle ? tr : qr;
    GeoMap map = mesh.geo_map(e);
    for (int q = 0; q < rule.size(); ++q)
      area += rule.weights[q] * jacobian(map, rule.points[q]).J;
  }
  return area;
}

double element_area(const Mesh2D& mesh, int e) {
  const QuadRule rule = master_rule(mesh.elements[e].shape, 4);
  GeoMap map = mesh.geo_map(e);
  double area = 0;
  for (int q = 0; q < rule.size(); ++q)
    area += rule.weights[q] * jacobian(map, rule.points[q]).J;
  return area;
}

int boundary_edge_count(const Mesh2D& mesh) {
  int count = 0;
  for (const Edge& edge : mesh.edges) count += edge.boundary ? 1 : 0;
  return count;
}

}  // namespace

TEST_CASE("rect mesh entity counts") {
  Mesh2D mesh = build_rect_mesh(2);
  CHECK(mesh.n_elements() == 16);
  CHECK(mesh.n_vertices() == 25);  // (n+1)^2
  CHECK(mesh.n_edges() == 40);     // 2 n (n+1)
  CHECK(total_area(mesh) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(boundary_edge_count(mesh) == 16);  // 4n

  Mesh2D mesh3 = build_rect_mesh(3);
  CHECK(mesh3.h == doctest::Approx(0.125));
  CHECK(mesh3.n_elements() == 64);
}

TEST_CASE("mesh level bounds") {
  CHECK_THROWS(build_rect_mesh(0));
  CHECK_THROWS(build_rect_mesh(9));
  CHECK_THROWS(build_tri_mesh(0));
  CHECK_THROWS(build_trap_mesh(9));
}

TEST_CASE("tri mesh entity counts and congruent areas") {
  Mesh2D mesh = build_tri_mesh(2);
  CHECK(mesh.n_elements() == 32);  // 2 per square
  CHECK(mesh.n_edges() == 56);     // 40 grid edges + 16 diagonals
  const double half = mesh.h * mesh.h / 2.0;
  for (int e = 0; e < mesh.n_elements(); ++e)
    CHECK(element_area(mesh, e) == doctest::Approx(half).epsilon(1e-12));
  CHECK(total_area(mesh) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("trap mesh geometry") {
  Mesh2D mesh = build_trap_mesh(2);
  const double h = mesh.h;
  CHECK(mesh.n_elements() == 16);
  CHECK(total_area(mesh) == doctest::Approx(1.0).epsilon(1e-12));

  // vertical side lengths are 0.75h / 1.25h for every element
  for (const Element& el : mesh.elements) {
    auto p = [&](int k) {
      const Vertex& v = mesh.vertices[el.vertex_ids[k]];
      return Eigen::Vector2d(v.x, v.y);
    };
    double left = (p(3) - p(0)).norm();
    double right = (p(2) - p(1)).norm();
    CHECK(std::min(left, right) == doctest::Approx(0.75 * h).epsilon(1e-12));
    CHECK(std::max(left, right) == doctest::Approx(1.25 * h).epsilon(1e-12));
  }

  // genuinely bilinear: non-constant Jacobian on some element
  QuadRule rule = master_rule(CellShape::quadrilateral, 4);
  double worst_ratio = 1.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    GeoMap map = mesh.geo_map(e);
    double jmin = 1e300, jmax = 0;
    for (int q = 0; q < rule.size(); ++q) {
      double J = jacobian(map, rule.points[q]).J;
      CHECK(J > 0);
      jmin = std::min(jmin, J);
      jmax = std::max(jmax, J);
    }
    worst_ratio = std::max(worst_ratio, jmax / jmin);
  }
  CHECK(worst_ratio > 1.0 + 1e-6);

  // boundary vertices pinned to y = 0 and y = 1
  for (const Vertex& v : mesh.vertices) {
    if (v.y < 0.3 * h) CHECK(v.y == doctest::Approx(0.0));
    if (v.y > 1.0 - 0.3 * h) CHECK(v.y == doctest::Approx(1.0));
  }

  // interior vertical edges: midline offset +-0.125h from the straight grid
  for (const Edge& edge : mesh.edges) {
    const Vertex& a = mesh.vertices[edge.vertex_ids[0]];
    const Vertex& b = mesh.vertices[edge.vertex_ids[1]];
    if (std::abs(a.x - b.x) > 1e-14) continue;  // not vertical
    if (edge.boundary) continue;
    double mid = 0.5 * (a.y + b.y);
    double nearest = std::round(mid / h - 0.5) * h + 0.5 * h;
    CHECK(std::abs(std::abs(mid - nearest) - 0.125 * h) < 1e-12);
  }
}

TEST_CASE("nominal spacing halves between levels") {
  for (int i = 1; i < 5; ++i) {
    CHECK(build_trap_mesh(i).h / build_trap_mesh(i + 1).h == doctest::Approx(2.0));
    CHECK(build_rect_mesh(i).h == doctest::Approx(std::ldexp(1.0, -i)));
  }
}

TEST_CASE("edge orientation invariants") {
  for (auto* builder : {&build_rect_mesh, &build_tri_mesh, &build_trap_mesh}) {
    Mesh2D mesh = (*builder)(2);
    for (int ei = 0; ei < mesh.n_edges(); ++ei) {
      const Edge& edge = mesh.edges[ei];
      if (edge.boundary) {
        CHECK(edge.n_adjacent == 1);
        // sign chosen so the global normal is outward
        const Element& el = mesh.elements[edge.adjacent_element_ids[0]];
        for (int le = 0; le < el.num_edges(); ++le)
          if (el.edge_ids[le] == ei) CHECK(el.edge_signs[le] == 1);
      } else {
        CHECK(edge.n_adjacent == 2);
        int product = 1;
        for (int side = 0; side < 2; ++side) {
          const Element& el = mesh.elements[edge.adjacent_element_ids[side]];
          for (int le = 0; le < el.num_edges(); ++le)
            if (el.edge_ids[le] == ei) product *= el.edge_signs[le];
        }
        CHECK(product == -1);
        // interior edges directed lexicographically
        CHECK(edge.vertex_ids[0] < edge.vertex_ids[1]);
      }
    }
  }
}

TEST_CASE("element vertex ordering is counterclockwise") {
  for (auto* builder : {&build_rect_mesh, &build_tri_mesh, &build_trap_mesh}) {
    Mesh2D mesh = (*builder)(3);
    QuadRule qr = master_rule(CellShape::quadrilateral, 3);
    QuadRule tr = master_rule(CellShape::triangle, 3);
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const QuadRule& rule =
          mesh.elements[e].shape == CellShape::triangle ? tr : qr;
      GeoMap map = mesh.geo_map(e);
      for (int q = 0; q < rule.size(); ++q)
        CHECK(jacobian(map, rule.points[q]).J > 0);
    }
  }
}

TEST_CASE("mesh dump format") {
  Mesh2D mesh = build_rect_mesh(1);
  std::ostringstream os;
  mesh.dump(os);
  std::istringstream is(os.str());
  std::string tag;
  int vcount = 0, ecount = 0;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    ls >> tag;
    if (tag == "v") ++vcount;
    if (tag == "e") ++ecount;
  }
  CHECK(vcount == mesh.n_vertices());
  CHECK(ecount == mesh.n_elements());
}

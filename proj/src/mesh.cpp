#include "hdiv2d/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

namespace hdiv2d {

namespace {

void check_level(int i) {
  if (i < 1 || i > 8) throw std::invalid_argument("mesh level out of range [1,8]");
}

// Collects edges from element connectivity.  Edge directions and signs are
// assigned afterwards by orient_edges.
void build_edges(Mesh2D& mesh) {
  std::map<std::pair<int, int>, int> edge_of;
  mesh.edges.clear();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    Element& el = mesh.elements[e];
    for (int le = 0; le < el.num_edges(); ++le) {
      auto ev = edge_vertices(el.shape, le);
      int a = el.vertex_ids[ev[0]];
      int b = el.vertex_ids[ev[1]];
      auto key = std::minmax(a, b);
      auto it = edge_of.find(key);
      int id;
      if (it == edge_of.end()) {
        id = mesh.n_edges();
        edge_of.emplace(key, id);
        Edge edge;
        edge.vertex_ids = {key.first, key.second};
        mesh.edges.push_back(edge);
      } else {
        id = it->second;
      }
      Edge& edge = mesh.edges[id];
      if (edge.n_adjacent >= 2) throw std::runtime_error("edge shared by more than two elements");
      edge.adjacent_element_ids[edge.n_adjacent++] = e;
      el.edge_ids[le] = id;
    }
  }
  for (Edge& edge : mesh.edges) edge.boundary = (edge.n_adjacent == 1);
}

int local_edge_of(const Element& el, int edge_id) {
  for (int le = 0; le < el.num_edges(); ++le)
    if (el.edge_ids[le] == edge_id) return le;
  throw std::logic_error("edge not found in element");
}

}  // namespace

Mesh2D orient_edges(Mesh2D mesh) {
  for (int ei = 0; ei < mesh.n_edges(); ++ei) {
    Edge& edge = mesh.edges[ei];
    if (edge.boundary) {
      // Direct the edge along the CCW traversal of its unique element so
      // the global normal points out of the domain.
      const Element& el = mesh.elements[edge.adjacent_element_ids[0]];
      int le = local_edge_of(el, ei);
      auto ev = edge_vertices(el.shape, le);
      edge.vertex_ids = {el.vertex_ids[ev[0]], el.vertex_ids[ev[1]]};
    } else {
      // Lexicographic direction: a pure function of the vertex ids.
      int a = edge.vertex_ids[0], b = edge.vertex_ids[1];
      edge.vertex_ids = {std::min(a, b), std::max(a, b)};
    }
  }
  for (Element& el : mesh.elements) {
    for (int le = 0; le < el.num_edges(); ++le) {
      const Edge& edge = mesh.edges[el.edge_ids[le]];
      auto ev = edge_vertices(el.shape, le);
      int first = el.vertex_ids[ev[0]];
      el.edge_signs[le] = (edge.vertex_ids[0] == first) ? 1 : -1;
    }
  }
  return mesh;
}

GeoMap Mesh2D::geo_map(int element_id) const {
  const Element& el = elements[element_id];
  auto v = [&](int k) {
    const Vertex& p = vertices[el.vertex_ids[k]];
    return Eigen::Vector2d(p.x, p.y);
  };
  if (el.shape == CellShape::triangle) return GeoMap::triangle(v(0), v(1), v(2));
  return GeoMap::quadrilateral(v(0), v(1), v(2), v(3));
}

void Mesh2D::dump(std::ostream& os) const {
  for (const Vertex& v : vertices) os << "v " << v.x << " " << v.y << "\n";
  for (const Element& el : elements) {
    os << "e " << (el.shape == CellShape::triangle ? "tri" : "quad");
    for (int k = 0; k < el.num_vertices(); ++k) os << " " << el.vertex_ids[k];
    os << "\n";
  }
}

Mesh2D build_rect_mesh(int i) {
  check_level(i);
  const int n = 1 << i;
  const double h = 1.0 / n;
  Mesh2D mesh;
  mesh.family = MeshFamily::rect;
  mesh.h = h;
  for (int b = 0; b <= n; ++b)
    for (int a = 0; a <= n; ++a) mesh.vertices.push_back({a * h, b * h});
  auto vid = [n](int a, int b) { return b * (n + 1) + a; };
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) {
      Element el;
      el.shape = CellShape::quadrilateral;
      el.vertex_ids = {vid(a, b), vid(a + 1, b), vid(a + 1, b + 1), vid(a, b + 1)};
      mesh.elements.push_back(el);
    }
  build_edges(mesh);
  return orient_edges(std::move(mesh));
}

Mesh2D build_tri_mesh(int i) {
  check_level(i);
  const int n = 1 << i;
  const double h = 1.0 / n;
  Mesh2D mesh;
  mesh.family = MeshFamily::tri;
  mesh.h = h;
  for (int b = 0; b <= n; ++b)
    for (int a = 0; a <= n; ++a) mesh.vertices.push_back({a * h, b * h});
  auto vid = [n](int a, int b) { return b * (n + 1) + a; };
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) {
      int ll = vid(a, b), lr = vid(a + 1, b);
      int ul = vid(a, b + 1), ur = vid(a + 1, b + 1);
      // Lower-left to upper-right diagonal.  Vertices are listed so the
      // master hypotenuse is mapped onto the diagonal for both triangles;
      // shared physical edges then have equal master edge lengths on the
      // two sides, which normal-trace conformity relies on.
      Element t1;
      t1.shape = CellShape::triangle;
      t1.vertex_ids = {lr, ur, ll, -1};
      Element t2;
      t2.shape = CellShape::triangle;
      t2.vertex_ids = {ul, ll, ur, -1};
      mesh.elements.push_back(t1);
      mesh.elements.push_back(t2);
    }
  build_edges(mesh);
  return orient_edges(std::move(mesh));
}

Mesh2D build_trap_mesh(int i) {
  check_level(i);
  const int n = 1 << i;
  const double h = 1.0 / n;
  Mesh2D mesh;
  mesh.family = MeshFamily::trap;
  mesh.h = h;
  // Odd rows shifted by +-h/4 alternating per column: every cell is a
  // trapezoid with vertical sides 0.75h and 1.25h, and rows tile exactly.
  // Row 0 and row n (even, since n = 2^i) stay on y = 0 and y = 1.
  for (int b = 0; b <= n; ++b)
    for (int a = 0; a <= n; ++a) {
      double shift = (b % 2 == 1) ? ((a % 2 == 0) ? h / 4 : -h / 4) : 0.0;
      mesh.vertices.push_back({a * h, b * h + shift});
    }
  auto vid = [n](int a, int b) { return b * (n + 1) + a; };
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) {
      Element el;
      el.shape = CellShape::quadrilateral;
      el.vertex_ids = {vid(a, b), vid(a + 1, b), vid(a + 1, b + 1), vid(a, b + 1)};
      mesh.elements.push_back(el);
    }
  build_edges(mesh);
  return orient_edges(std::move(mesh));
}

}  // namespace hdiv2d

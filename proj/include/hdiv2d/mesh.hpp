// Structured meshes of the unit square: uniform rectangles, diagonally
// split triangles, and congruent trapezoids with vertical sides 0.75h /
// 1.25h.  Edges carry a global direction so that normal-flux degrees of
// freedom can be shared between neighboring elements.

#ifndef HDIV2D_MESH_HPP
#define HDIV2D_MESH_HPP

#include <array>
#include <iosfwd>
#include <vector>

#include "hdiv2d/geometry.hpp"
#include "hdiv2d/master_element.hpp"

namespace hdiv2d {

struct Vertex {
  double x = 0;
  double y = 0;
};

struct Element {
  CellShape shape = CellShape::quadrilateral;
  std::array<int, 4> vertex_ids{-1, -1, -1, -1};  // counterclockwise
  std::array<int, 4> edge_ids{-1, -1, -1, -1};
  // +1 if the element outward normal on local edge le agrees with the
  // global edge normal, -1 otherwise.  For straight edges this sign also
  // tells whether the global edge direction matches the local CCW one
  // (sign < 0 means the edge parametrization is flipped).
  std::array<int, 4> edge_signs{0, 0, 0, 0};

  int num_vertices() const { return hdiv2d::num_vertices(shape); }
  int num_edges() const { return hdiv2d::num_edges(shape); }
  bool edge_flipped(int le) const { return edge_signs[le] < 0; }
};

struct Edge {
  std::array<int, 2> vertex_ids{-1, -1};  // global direction: first -> second
  std::array<int, 2> adjacent_element_ids{-1, -1};
  int n_adjacent = 0;
  bool boundary = false;
};

enum class MeshFamily { rect, tri, trap };

struct Mesh2D {
  std::vector<Vertex> vertices;
  std::vector<Element> elements;
  std::vector<Edge> edges;
  MeshFamily family = MeshFamily::rect;
  double h = 0;  // nominal spacing

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  GeoMap geo_map(int element_id) const;

  /// Plain-text dump for debugging: "v x y" per vertex, "e shape v0 v1 ..."
  /// per element.
  void dump(std::ostream& os) const;
};

/// Uniform mesh of (2^i)^2 squares with spacing h = 2^{-i}.  1 <= i <= 8.
Mesh2D build_rect_mesh(int i);

/// Each square of build_rect_mesh(i) split along the lower-left to
/// upper-right diagonal into two triangles.
Mesh2D build_tri_mesh(int i);

/// Columns of congruent trapezoids with horizontal extent h and vertical
/// parallel sides alternating 0.75h and 1.25h; boundary vertices stay on
/// y = 0 and y = 1.
Mesh2D build_trap_mesh(int i);

/// (Re)computes global edge directions and per-element orientation signs.
/// Interior edges are directed lexicographically (lower vertex id first);
/// boundary edges are directed so the global normal points out of the
/// domain.  Builders call this; exposed for renumbering scenarios.
Mesh2D orient_edges(Mesh2D mesh);

}  // namespace hdiv2d

#endif

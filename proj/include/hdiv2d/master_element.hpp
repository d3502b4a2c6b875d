// Master element geometry: reference triangle T and reference square R,
// their vertex coordinates, edge connectivity, outward normals and edge
// parametrizations. Shared by the mesh, spaces and assembly modules.

#ifndef HDIV2D_MASTER_ELEMENT_HPP
#define HDIV2D_MASTER_ELEMENT_HPP

#include <array>

#include <Eigen/Dense>

namespace hdiv2d {

enum class CellShape { triangle, quadrilateral };

inline int num_vertices(CellShape s) { return s == CellShape::triangle ? 3 : 4; }
inline int num_edges(CellShape s) { return s == CellShape::triangle ? 3 : 4; }

/// Measure of the master element: |T| = 1/2, |R| = 4.
inline double master_measure(CellShape s) {
  return s == CellShape::triangle ? 0.5 : 4.0;
}

/// Master vertex coordinates, counterclockwise.
/// T = {x>=0, y>=0, x+y<=1}, R = [-1,1]^2.
inline Eigen::Vector2d master_vertex(CellShape s, int v) {
  if (s == CellShape::triangle) {
    static const std::array<Eigen::Vector2d, 3> tv = {
        Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)};
    return tv[v];
  }
  static const std::array<Eigen::Vector2d, 4> qv = {
      Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, -1), Eigen::Vector2d(1, 1),
      Eigen::Vector2d(-1, 1)};
  return qv[v];
}

/// Local edge e runs from vertex e to vertex (e+1) mod nv.
inline std::array<int, 2> edge_vertices(CellShape s, int e) {
  const int nv = num_vertices(s);
  return {e, (e + 1) % nv};
}

/// Point on master edge e at parameter t in [-1,1], affine from the first
/// to the second local endpoint.
inline Eigen::Vector2d master_edge_point(CellShape s, int e, double t) {
  auto ev = edge_vertices(s, e);
  Eigen::Vector2d a = master_vertex(s, ev[0]);
  Eigen::Vector2d b = master_vertex(s, ev[1]);
  return 0.5 * (1.0 - t) * a + 0.5 * (1.0 + t) * b;
}

/// Outward unit normal of master edge e.
inline Eigen::Vector2d master_edge_normal(CellShape s, int e) {
  auto ev = edge_vertices(s, e);
  Eigen::Vector2d d = master_vertex(s, ev[1]) - master_vertex(s, ev[0]);
  Eigen::Vector2d n(d.y(), -d.x());  // rotate -90 deg: outward for CCW element
  return n.normalized();
}

/// Unit tangent of master edge e (first to second endpoint).
inline Eigen::Vector2d master_edge_tangent(CellShape s, int e) {
  auto ev = edge_vertices(s, e);
  Eigen::Vector2d d = master_vertex(s, ev[1]) - master_vertex(s, ev[0]);
  return d.normalized();
}

inline double master_edge_length(CellShape s, int e) {
  auto ev = edge_vertices(s, e);
  return (master_vertex(s, ev[1]) - master_vertex(s, ev[0])).norm();
}

}  // namespace hdiv2d

#endif

#include "hdiv2d/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "hdiv2d/orthopoly.hpp"

namespace hdiv2d {

namespace {

// Gauss-Legendre nodes/weights on [-1,1] for np points: Newton iteration on
// P_np from the Chebyshev-like initial guess.
void gauss_legendre_nodes(int np, std::vector<double>& x,
                          std::vector<double>& w) {
  x.resize(np);
  w.resize(np);
  for (int i = 0; i < np; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (np + 0.5));
    for (int it = 0; it < 100; ++it) {
      auto lv = legendre_all(np, t);
      double dt = lv.p / lv.dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    auto lv = legendre_all(np, t);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * lv.dp * lv.dp);
  }
}

}  // namespace

QuadRule gauss_interval(int d) {
  if (d < 1 || d > 40) throw std::invalid_argument("gauss_interval: degree out of range [1,40]");
  const int np = (d + 2) / 2;  // exact for degree <= 2*np - 1 >= d
  std::vector<double> x, w;
  gauss_legendre_nodes(np, x, w);
  QuadRule rule;
  rule.exactness_degree = 2 * np - 1;
  for (int i = 0; i < np; ++i) {
    rule.points.emplace_back(x[i], 0.0);
    rule.weights.push_back(w[i]);
  }
  return rule;
}

QuadRule gauss_square(int d) {
  QuadRule line = gauss_interval(d);
  QuadRule rule;
  rule.exactness_degree = line.exactness_degree;
  for (int i = 0; i < line.size(); ++i)
    for (int j = 0; j < line.size(); ++j) {
      rule.points.emplace_back(line.points[i].x(), line.points[j].x());
      rule.weights.push_back(line.weights[i] * line.weights[j]);
    }
  return rule;
}

QuadRule gauss_triangle(int d) {
  if (d < 1 || d > 30) throw std::invalid_argument("gauss_triangle: degree out of range [1,30]");
  QuadRule rule;
  rule.exactness_degree = d;
  if (d == 1) {
    rule.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
    rule.weights.push_back(0.5);
    return rule;
  }
  // Collapsed coordinates: (x, y) = (xi, eta (1 - xi)) maps [0,1]^2 onto T
  // with area factor (1 - xi).  A monomial x^a y^b becomes
  // xi^a (1-xi)^{b+1} eta^b, so exactness d+1 in xi and d in eta suffices.
  QuadRule gxi = gauss_interval(d + 1);
  QuadRule geta = gauss_interval(d);
  for (int i = 0; i < gxi.size(); ++i) {
    double xi = 0.5 * (gxi.points[i].x() + 1.0);
    double wxi = 0.5 * gxi.weights[i];
    for (int j = 0; j < geta.size(); ++j) {
      double eta = 0.5 * (geta.points[j].x() + 1.0);
      double weta = 0.5 * geta.weights[j];
      rule.points.emplace_back(xi, eta * (1.0 - xi));
      rule.weights.push_back(wxi * weta * (1.0 - xi));
    }
  }
  return rule;
}

QuadRule master_rule(CellShape shape, int d) {
  return shape == CellShape::triangle ? gauss_triangle(d) : gauss_square(d);
}

}  // namespace hdiv2d

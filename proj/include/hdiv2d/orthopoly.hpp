// Legendre polynomials and integrated Legendre (lobatto bubble) functions,
// evaluated by recurrence.

#ifndef HDIV2D_ORTHOPOLY_HPP
#define HDIV2D_ORTHOPOLY_HPP

namespace hdiv2d {

/// P_n(x), P'_n(x), P''_n(x) in one pass.
struct LegendreValue {
  double p = 0;
  double dp = 0;
  double ddp = 0;
};

inline LegendreValue legendre_all(int n, double x) {
  // P_{m+1} = ((2m+1) x P_m - m P_{m-1}) / (m+1)
  // P'_{m+1} = (2m+1) P_m + P'_{m-1},  P''_{m+1} = (2m+1) P'_m + P''_{m-1}
  double p0 = 1, d0 = 0, dd0 = 0;
  if (n == 0) return {p0, d0, dd0};
  double p1 = x, d1 = 1, dd1 = 0;
  for (int m = 1; m < n; ++m) {
    double p2 = ((2 * m + 1) * x * p1 - m * p0) / (m + 1);
    double d2 = (2 * m + 1) * p1 + d0;
    double dd2 = (2 * m + 1) * d1 + dd0;
    p0 = p1; d0 = d1; dd0 = dd1;
    p1 = p2; d1 = d2; dd1 = dd2;
  }
  return {p1, d1, dd1};
}

inline double legendre(int n, double x) { return legendre_all(n, x).p; }
inline double legendre_d(int n, double x) { return legendre_all(n, x).dp; }

/// Integrated Legendre L_j(x) = (P_j - P_{j-2}) / (2j-1), j >= 2.
/// Vanishes at x = +-1; L_j' = P_{j-1}; parity (-1)^j.
inline double integrated_legendre(int j, double x) {
  return (legendre(j, x) - legendre(j - 2, x)) / (2 * j - 1);
}

inline double integrated_legendre_d(int j, double x) {
  return legendre(j - 1, x);
}

}  // namespace hdiv2d

#endif

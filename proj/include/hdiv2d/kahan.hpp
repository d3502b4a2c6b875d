#ifndef HDIV2D_KAHAN_HPP
#define HDIV2D_KAHAN_HPP

namespace hdiv2d {

/// Compensated summation; keeps large reductions order-stable.
struct KahanSum {
  double sum = 0;
  double c = 0;

  void add(double x) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

}  // namespace hdiv2d

#endif

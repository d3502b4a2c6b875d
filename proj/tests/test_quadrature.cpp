#include <doctest.h>

#include <cmath>

#include "hdiv2d/quadrature.hpp"

using namespace hdiv2d;

namespace {

double integrate(const QuadRule& rule, int a, int b) {
  double s = 0;
  for (int q = 0; q < rule.size(); ++q)
    s += rule.weights[q] * std::pow(rule.points[q].x(), a) *
         std::pow(rule.points[q].y(), b);
  return s;
}

// Analytic monomial integrals on the master domains.
double exact_interval(int a) { return a % 2 ? 0.0 : 2.0 / (a + 1); }

double exact_square(int a, int b) {
  return exact_interval(a) * exact_interval(b);
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// int_T x^a y^b = a! b! / (a + b + 2)!
double exact_triangle(int a, int b) {
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

}  // namespace

TEST_CASE("interval rule basics") {
  QuadRule r1 = gauss_interval(1);
  CHECK(r1.size() == 1);
  CHECK(r1.points[0].x() == doctest::Approx(0.0));
  CHECK(r1.weights[0] == doctest::Approx(2.0));

  QuadRule r3 = gauss_interval(3);
  CHECK(r3.size() == 2);
  CHECK(std::abs(r3.points[0].x()) == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(r3.weights[0] == doctest::Approx(1.0));
  CHECK(r3.weights[1] == doctest::Approx(1.0));

  CHECK(integrate(gauss_interval(5), 4, 0) == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("interval rule rejects out-of-range degree") {
  CHECK_THROWS(gauss_interval(0));
  CHECK_THROWS(gauss_interval(41));
  CHECK_THROWS(gauss_triangle(0));
  CHECK_THROWS(gauss_triangle(31));
}

TEST_CASE("square rule basics") {
  CHECK(gauss_square(1).size() == 1);
  CHECK(gauss_square(1).weights[0] == doctest::Approx(4.0));
  CHECK(gauss_square(3).size() == 4);
  CHECK(integrate(gauss_square(5), 2, 4) ==
        doctest::Approx(2.0 / 3.0 * 2.0 / 5.0).epsilon(1e-14));
}

TEST_CASE("triangle rule basics") {
  QuadRule r1 = gauss_triangle(1);
  CHECK(r1.size() == 1);
  CHECK(r1.points[0].x() == doctest::Approx(1.0 / 3.0));
  CHECK(r1.points[0].y() == doctest::Approx(1.0 / 3.0));
  CHECK(r1.weights[0] == doctest::Approx(0.5));

  CHECK(integrate(gauss_triangle(2), 1, 1) ==
        doctest::Approx(1.0 / 24.0).epsilon(1e-13));
  CHECK(integrate(gauss_triangle(6), 3, 3) ==
        doctest::Approx(1.0 / 1120.0).epsilon(1e-12));
}

TEST_CASE("exactness sweep and positive weights") {
  for (int d = 1; d <= 20; ++d) {
    QuadRule interval = gauss_interval(d);
    for (double w : interval.weights) CHECK(w > 0);
    for (int a = 0; a <= interval.exactness_degree; ++a)
      CHECK(integrate(interval, a, 0) ==
            doctest::Approx(exact_interval(a)).epsilon(1e-12));

    QuadRule square = gauss_square(d);
    for (double w : square.weights) CHECK(w > 0);
    for (int a = 0; a <= d; ++a)
      for (int b = 0; b <= d; ++b)
        CHECK(integrate(square, a, b) ==
              doctest::Approx(exact_square(a, b)).epsilon(1e-12).scale(1.0));

    QuadRule tri = gauss_triangle(d);
    for (double w : tri.weights) CHECK(w > 0);
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b)
        CHECK(integrate(tri, a, b) ==
              doctest::Approx(exact_triangle(a, b)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("weights sum to the master measure") {
  auto total = [](const QuadRule& r) {
    double s = 0;
    for (double w : r.weights) s += w;
    return s;
  };
  CHECK(total(gauss_interval(7)) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(total(gauss_square(7)) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(total(gauss_triangle(7)) == doctest::Approx(0.5).epsilon(1e-13));
}

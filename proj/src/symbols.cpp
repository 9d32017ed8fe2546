#include "detail/symbols.hpp"

#include <cmath>
#include <numbers>

namespace rplab::detail {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

// With x = w a, e = exp(-x):
//   sinh x / (cosh x - c) = (1 - e^2) / (1 + e^2 - 2 c e)
double alias_p1(double k, double w, double a) {
  const double e = std::exp(-w * a);
  const double c = std::cos(k * a);
  return a / (2.0 * w) * (1.0 - e * e) / (1.0 + e * e - 2.0 * c * e);
}

// -1/(2w) d/dw of alias_p1
double alias_p2(double k, double w, double a) {
  const double e = std::exp(-w * a);
  const double c = std::cos(k * a);
  const double den = 1.0 + e * e - 2.0 * c * e;
  const double g = (1.0 - e * e) / den;
  // a (1 - c cosh x) / (cosh x - c)^2 rescaled by 4 e^2
  const double dg = a * (4.0 * e * e - 2.0 * c * (e + e * e * e)) / (den * den);
  const double ds1 = -a / (2.0 * w * w) * g + a / (2.0 * w) * dg;
  return -ds1 / (2.0 * w);
}

double alias_power(double k, double w, double a, double p) {
  if (p == 1.0) return alias_p1(k, w, a);
  if (p == 2.0) return alias_p2(k, w, a);
  constexpr int terms = 64;
  double sum = 0.0;
  for (int n = -terms; n <= terms; ++n) {
    const double q = k + two_pi * n / a;
    sum += std::pow(q * q + w * w, -p);
  }
  // midpoint estimate of both tails
  const double s = two_pi / a;
  sum += 2.0 * std::pow(s, -2.0 * p) * std::pow(terms + 0.5, 1.0 - 2.0 * p) / (2.0 * p - 1.0);
  return sum;
}

std::complex<double> alias_drift(double k, double w1, double w2, double a) {
  using namespace std::complex_literals;
  const std::complex<double> z1 = std::exp(-(w1 - 1i * k) * a);
  const std::complex<double> z2 = std::exp(-(w2 + 1i * k) * a);
  return a * (z2 / (2.0 * w2 * (1.0 - z2)) + z1 / (2.0 * w1 * (1.0 - z1)) + 1.0 / (4.0 * w1) + 1.0 / (4.0 * w2));
}

}  // namespace rplab::detail

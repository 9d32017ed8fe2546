#pragma once

#include <complex>

namespace rplab::detail {

/// sum_n 1 / ((k + 2 pi n / a)^2 + w^2)
double alias_p1(double k, double w, double a);
/// sum_n 1 / ((k + 2 pi n / a)^2 + w^2)^2
double alias_p2(double k, double w, double a);
/// sum_n ((k + 2 pi n / a)^2 + w^2)^{-p}, p > 1/2
double alias_power(double k, double w, double a, double p);
/// sum_n of the drift symbol in k0 at fixed (w1, w2)
std::complex<double> alias_drift(double k, double w1, double w2, double a);

}  // namespace rplab::detail

#include <functional>
#include <span>
#include <vector>

namespace rplab::detail {

/// Evaluates f at k, averaging over both signs of every component flagged as
/// sitting on the Brillouin-zone edge (where -k is not a separate grid point).
inline std::complex<double> zone_edge_average(const std::function<std::complex<double>(std::span<const double>)>& f,
                                              std::vector<double>& k, std::span<const char> edge) {
  std::vector<std::size_t> flip;
  for (std::size_t j = 0; j < k.size(); ++j)
    if (edge[j]) flip.push_back(j);
  if (flip.empty()) return f(k);
  std::complex<double> acc{};
  const std::size_t combos = std::size_t{1} << flip.size();
  for (std::size_t mask = 0; mask < combos; ++mask) {
    for (std::size_t b = 0; b < flip.size(); ++b) k[flip[b]] = std::abs(k[flip[b]]) * ((mask >> b) & 1 ? 1.0 : -1.0);
    acc += f(k);
  }
  return acc / static_cast<double>(combos);
}

}  // namespace rplab::detail

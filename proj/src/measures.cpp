#include "rplab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rplab/error.hpp"

namespace rplab {

namespace {

constexpr double even_tol = 1e-12;
constexpr double divergence_slope = 0.5;

void require_pair(std::span<const double> K, std::span<const double> L) {
  if (K.size() != L.size()) throw Error(ErrorCode::InvalidArgument, "K and L differ in length");
  for (std::size_t i = 0; i < K.size(); ++i) {
    if (!std::isfinite(K[i]) || !std::isfinite(L[i])) throw Error(ErrorCode::InvalidArgument, "non-finite symbol");
    if (!(K[i] > 0.0))
      throw Error(ErrorCode::HermitianPartNotPositive, "K <= 0 at mode " + std::to_string(i));
  }
}

void split(const FourierMultiplier& D, std::vector<double>& K, std::vector<double>& L) {
  K.resize(D.values.size());
  L.resize(D.values.size());
  for (std::size_t i = 0; i < K.size(); ++i) {
    K[i] = D.values[i].real();
    L[i] = D.values[i].imag();
  }
}

}  // namespace

YngvasonReport yngvason(std::span<const double> K, std::span<const double> L) {
  require_pair(K, L);
  YngvasonReport r;
  const std::size_t n = K.size();
  r.lambda.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.lambda[i] = L[i] / K[i];

  r.order.resize(n);
  std::iota(r.order.begin(), r.order.end(), 0);
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(r.lambda[a]) > std::abs(r.lambda[b]); });
  cplx log_det{};
  for (auto i : r.order) {
    const double l = r.lambda[i];
    r.hs_norm_sq += l * l;
    r.log_z += 0.5 * std::log1p(l * l);
    r.log_z_partial.push_back(r.log_z);
    r.z_partial.push_back(std::exp(r.log_z));
    log_det += std::log(cplx(1.0, -l));
  }
  r.z_final = std::exp(r.log_z);
  r.det_sqrt = std::exp(0.5 * log_det);

  std::vector<double> s = r.lambda, t = r.lambda;
  for (auto& v : t) v = -v;
  std::sort(s.begin(), s.end());
  std::sort(t.begin(), t.end());
  double scale = 0.0;
  for (double v : s) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(s[i] - t[i]) > even_tol * std::max(scale, 1e-300)) r.spectrum_even = false;
  return r;
}

YngvasonReport yngvason(const FourierMultiplier& D) {
  std::vector<double> K, L;
  split(D, K, L);
  return yngvason(K, L);
}

MeasureDecomposition decompose(std::span<const double> K, std::span<const double> L) {
  require_pair(K, L);
  MeasureDecomposition m;
  m.G.resize(K.size());
  m.Y.resize(K.size());
  for (std::size_t i = 0; i < K.size(); ++i) {
    const double mod2 = K[i] * K[i] + L[i] * L[i];
    m.G[i] = mod2 / K[i];
    m.Y[i] = L[i] / mod2;
    const cplx inv = 1.0 / cplx(K[i], L[i]);
    const cplx rhs = cplx(1.0 / m.G[i], -m.Y[i]);
    m.identity_defect = std::max(m.identity_defect, std::abs(inv - rhs) / std::abs(inv));
  }
  const auto y = yngvason(K, L);
  m.log_z = y.log_z;
  m.z = y.z_final;
  return m;
}

MeasureDecomposition decompose(const FourierMultiplier& D) {
  std::vector<double> K, L;
  split(D, K, L);
  return decompose(K, L);
}

RefinementSweep refinement_sweep(std::vector<YngvasonReport>& reports) {
  RefinementSweep s;
  std::vector<double> x, y;
  for (const auto& r : reports) {
    s.modes.push_back(r.lambda.size());
    s.hs_norm_sq.push_back(r.hs_norm_sq);
    s.log_z.push_back(r.log_z);
    if (r.hs_norm_sq > 0.0 && !r.lambda.empty()) {
      x.push_back(std::log(static_cast<double>(r.lambda.size())));
      y.push_back(std::log(r.hs_norm_sq));
    }
  }
  if (x.size() >= 2) {
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
    }
    s.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    s.divergence_flag = s.slope > divergence_slope;
  }
  for (auto& r : reports) r.divergence_flag = s.divergence_flag;
  return s;
}

}  // namespace rplab

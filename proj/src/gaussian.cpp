#include "rplab/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "rplab/error.hpp"

namespace rplab {

cplx characteristic(const CovarianceOperator& D, std::span<const cplx> f) { return std::exp(-0.5 * D.bilinear(f, f)); }

TwoPoint two_point(const CovarianceOperator& D) {
  return [&D](std::size_t x, std::size_t y) { return D.entry(x, y); };
}

namespace {

using Memo = std::map<std::vector<std::size_t>, cplx>;

cplx recurse(const TwoPoint& s2, const std::vector<std::size_t>& pts, Memo& memo) {
  if (pts.empty()) return 1.0;
  if (pts.size() % 2) return 0.0;
  if (auto it = memo.find(pts); it != memo.end()) return it->second;
  cplx acc{};
  std::vector<std::size_t> rest;
  rest.reserve(pts.size() - 2);
  for (std::size_t j = 1; j < pts.size(); ++j) {
    rest.clear();
    for (std::size_t i = 1; i < pts.size(); ++i)
      if (i != j) rest.push_back(pts[i]);
    acc += s2(pts[0], pts[j]) * recurse(s2, rest, memo);
  }
  memo.emplace(pts, acc);
  return acc;
}

}  // namespace

cplx schwinger(const TwoPoint& s2, std::span<const std::size_t> points) {
  if (points.size() % 2) return 0.0;
  std::vector<std::size_t> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end());
  Memo memo;
  return recurse(s2, pts, memo);
}

cplx schwinger(const CovarianceOperator& D, std::span<const std::size_t> points) {
  for (auto p : points)
    if (p >= D.grid()->size()) throw Error(ErrorCode::InvalidArgument, "point outside the grid");
  return schwinger(two_point(D), points);
}

cplx pairing_oracle(const TwoPoint& s2, std::span<const std::size_t> points) {
  if (points.size() > 12) throw Error(ErrorCode::OracleTooLarge, "pairing oracle limited to 12 points");
  if (points.size() % 2) return 0.0;
  struct State {
    std::vector<std::size_t> left;
    cplx weight;
  };
  std::vector<State> stack{{std::vector<std::size_t>(points.begin(), points.end()), 1.0}};
  cplx total{};
  while (!stack.empty()) {
    State st = std::move(stack.back());
    stack.pop_back();
    if (st.left.empty()) {
      total += st.weight;
      continue;
    }
    const std::size_t last = st.left.back();
    st.left.pop_back();
    for (std::size_t i = 0; i < st.left.size(); ++i) {
      State next{{}, st.weight * s2(st.left[i], last)};
      next.left.reserve(st.left.size() - 1);
      for (std::size_t r = 0; r < st.left.size(); ++r)
        if (r != i) next.left.push_back(st.left[r]);
      stack.push_back(std::move(next));
    }
  }
  return total;
}

cplx pairing_oracle(const CovarianceOperator& D, std::span<const std::size_t> points) {
  for (auto p : points)
    if (p >= D.grid()->size()) throw Error(ErrorCode::InvalidArgument, "point outside the grid");
  return pairing_oracle(two_point(D), points);
}

cplx moment(const CovarianceOperator& D, std::span<const cplx> f, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "moment order must be non-negative");
  if (n % 2) return 0.0;
  const cplx q = D.bilinear(f, f);
  double dfact = 1.0;
  for (int k = n - 1; k > 1; k -= 2) dfact *= k;
  return dfact * std::pow(q, n / 2);
}

cplx characteristic_series(const CovarianceOperator& D, std::span<const cplx> f, int order) {
  const cplx q = D.bilinear(f, f);
  // i^{2k}/(2k)! (2k-1)!! q^k = (-q/2)^k / k!
  cplx term = 1.0, acc = 1.0;
  for (int k = 1; 2 * k <= order; ++k) {
    term *= -0.5 * q / static_cast<double>(k);
    acc += term;
  }
  return acc;
}

cplx moment_from_characteristic(const CovarianceOperator& D, std::span<const cplx> f, int n, int nodes) {
  if (n < 0 || nodes <= n) throw Error(ErrorCode::InvalidArgument, "need more contour nodes than the moment order");
  const double q = std::abs(D.bilinear(f, f));
  const double r = q > 0.0 ? std::sqrt(std::max(n, 1) / q) : 1.0;
  std::vector<cplx> scaled(f.size());
  cplx c{};
  for (int j = 0; j < nodes; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / nodes;
    const cplx lambda = std::polar(r, theta);
    for (std::size_t s = 0; s < f.size(); ++s) scaled[s] = lambda * f[s];
    c += characteristic(D, scaled) * std::polar(1.0, -n * theta);
  }
  c /= static_cast<double>(nodes) * std::pow(r, n);
  // c_n = i^n <Phi^n> / n!
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  return c * fact / std::pow(cplx(0.0, 1.0), n);
}

}  // namespace rplab

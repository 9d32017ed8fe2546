#include "rplab/compactify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "rplab/error.hpp"

namespace rplab {

namespace {

/// Row-major walk over a table shape.
bool advance(std::vector<std::size_t>& idx, const std::vector<std::size_t>& shape) {
  for (std::size_t j = shape.size(); j-- > 0;) {
    if (++idx[j] < shape[j]) return true;
    idx[j] = 0;
  }
  return false;
}

std::size_t flat(const std::vector<std::size_t>& idx, const std::vector<std::size_t>& shape) {
  std::size_t f = 0;
  for (std::size_t j = 0; j < shape.size(); ++j) f = f * shape[j] + idx[j];
  return f;
}

double slice_max(const CovarianceOperator& D, std::size_t axis, std::size_t row) {
  const auto& shape = D.table_shape();
  std::vector<std::size_t> idx(shape.size(), 0);
  double m = 0.0;
  do {
    if (idx[axis] == row) m = std::max(m, std::abs(D.table()[flat(idx, shape)]));
  } while (advance(idx, shape));
  return m;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

PeriodizationResult periodize(const CovarianceOperator& D, std::size_t axis, double period, double tol) {
  const auto& g = *D.grid();
  if (axis >= g.dim()) throw Error(ErrorCode::InvalidArgument, "no axis " + std::to_string(axis));
  const auto& ax = g.axis(axis);
  if (ax.kind != AxisKind::Line) throw Error(ErrorCode::InvalidArgument, "axis is already compact");
  if (!(period > 0.0) || !(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "period and tol must be positive");
  const double ratio = period / ax.spacing;
  const long nc = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(nc)) > 1e-9 * ratio || nc < 2 || nc % 2 != 0)
    throw Error(ErrorCode::GridMismatch, "period is not an even multiple of the spacing");
  const long N = ax.sites;
  if (N < 3 * nc) throw Error(ErrorCode::GridMismatch, "line window must cover at least three periods");

  PeriodizationResult out{D, axis, period, 1, 0.0, {}, 0.0};
  // table row r <-> difference r - (N - 1)
  const double m1 = slice_max(D, axis, static_cast<std::size_t>(N - 1 + nc));
  const double m2 = slice_max(D, axis, static_cast<std::size_t>(N - 1 + 2 * nc));
  out.decay_rate = m1 == 0.0 || m2 == 0.0 ? std::numeric_limits<double>::infinity()
                                          : std::log(m1 / m2) / (static_cast<double>(nc) * ax.spacing);
  if (!(out.decay_rate > 0.0) || std::exp(-out.decay_rate * period) >= 0.5)
    throw Error(ErrorCode::NoDecay, "kernel does not decay along axis " + std::to_string(axis) +
                                        " (rate " + sci(out.decay_rate) + ")");

  std::vector<AxisSpec> axes = g.axes();
  axes[axis] = AxisSpec::circle(static_cast<int>(nc), period);
  auto grid = build_grid(std::move(axes));

  const auto& src_shape = D.table_shape();
  auto shape = src_shape;
  shape[axis] = static_cast<std::size_t>(nc);
  std::size_t total = 1;
  for (auto s : shape) total *= s;

  // centred representative r in [-nc/2, nc/2) of each circle difference
  auto image = [&](std::vector<std::size_t> idx, long n) {
    long r = static_cast<long>(idx[axis]);
    if (r >= nc / 2) r -= nc;
    idx[axis] = static_cast<std::size_t>(r + n * nc + N - 1);
    return D.table()[flat(idx, src_shape)];
  };
  auto shell = [&](long n) {
    std::vector<cplx> t(total);
    std::vector<std::size_t> idx(shape.size(), 0);
    std::size_t k = 0;
    do {
      t[k++] = n == 0 ? image(idx, 0) : image(idx, n) + image(idx, -n);
    } while (advance(idx, shape));
    return t;
  };

  auto sum = shell(0);
  const long available = (N - 1 - nc / 2) / nc;
  long n = 0;
  for (;;) {
    if (n + 1 > available)
      throw Error(ErrorCode::NotConverged, "image sum did not reach tol " + sci(tol) + " within " +
                                               std::to_string(2 * n + 1) + " images");
    ++n;
    const auto term = shell(n);
    double tmax = 0.0, smax = 0.0;
    for (std::size_t k = 0; k < total; ++k) {
      sum[k] += term[k];
      tmax = std::max(tmax, std::abs(term[k]));
      smax = std::max(smax, std::abs(sum[k]));
    }
    const double res = smax > 0.0 ? tmax / smax : 0.0;
    out.residual_history.push_back(res);
    if (res < tol) break;
  }
  out.images_used = static_cast<int>(2 * n + 1);
  out.truncation_residual = out.residual_history.back();
  out.D_c = CovarianceOperator(grid, std::move(sum), "periodized(" + D.provenance() + ")", D.synthesis_residual());
  return out;
}

CompactificationRP verify_compactification_rp(const CovarianceOperator& D, std::size_t compact_axis, double period,
                                               std::size_t checked_axis, double tol, double image_tol) {
  CompactificationRP out;
  const RPCondition cond{ConditionKind::DoublyRP, checked_axis};
  out.before = check(cond, D, tol);
  out.covariance_defect_before = kernel_reflection_covariance_defect(D, checked_axis);
  const auto p = periodize(D, compact_axis, period, image_tol);
  out.after = check(cond, p.D_c, tol);
  out.covariance_defect_after = kernel_reflection_covariance_defect(p.D_c, checked_axis);
  if (out.before.verdict == Verdict::NotApplicable || out.after.verdict == Verdict::NotApplicable) {
    out.verdict = Verdict::NotApplicable;
  } else {
    out.verdict = out.before.verdict == Verdict::Pass && out.after.verdict == Verdict::Pass ? Verdict::Pass
                                                                                            : Verdict::Fail;
  }
  return out;
}

}  // namespace rplab

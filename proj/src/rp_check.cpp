#include "rplab/rp_check.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <regex>

#include "rplab/error.hpp"

namespace rplab {

namespace {

bool needs_axis(ConditionKind k) { return k != ConditionKind::MeasurePositivity; }

std::vector<cplx> reflect(const SpacetimeGrid& g, std::size_t axis, std::span<const cplx> f) {
  const auto& r = g.reflection(axis);
  std::vector<cplx> out(f.size());
  for (std::size_t s = 0; s < f.size(); ++s) out[s] = f[r[s]];
  return out;
}

void require_support(const SpacetimeGrid& g, std::size_t axis, std::span<const cplx> f) {
  if (f.size() != g.size()) throw Error(ErrorCode::InvalidArgument, "field size does not match grid");
  const auto plus = g.halfspace(axis, +1);
  for (std::size_t s = 0; s < f.size(); ++s)
    if (!plus[s] && f[s] != cplx{})
      throw Error(ErrorCode::SupportError, "test function is nonzero at site " + std::to_string(s) +
                                               " outside the positive half along axis " + std::to_string(axis));
}

double spectral_norm(const Eigen::MatrixXcd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
  return svd.singularValues()(0);
}

}  // namespace

std::string RPCondition::id() const {
  switch (kind) {
    case ConditionKind::MeasurePositivity: return "MeasurePositivity";
    case ConditionKind::TimeRP: return "TimeRP";
    case ConditionKind::AltTimeRP: return "AltTimeRP";
    case ConditionKind::SpatialRP: return "SpatialRP(" + std::to_string(axis) + ")";
    case ConditionKind::AltSpatialRP: return "AltSpatialRP(" + std::to_string(axis) + ")";
    case ConditionKind::DoublyRP: return "DoublyRP(" + std::to_string(axis) + ")";
  }
  return "?";
}

RPCondition RPCondition::parse(const std::string& id) {
  if (id == "MeasurePositivity") return {ConditionKind::MeasurePositivity, 0};
  if (id == "TimeRP") return {ConditionKind::TimeRP, 0};
  if (id == "AltTimeRP") return {ConditionKind::AltTimeRP, 0};
  static const std::regex re(R"((SpatialRP|AltSpatialRP|DoublyRP)\((\d+)\))");
  std::smatch m;
  if (std::regex_match(id, m, re)) {
    const auto axis = static_cast<std::size_t>(std::stoul(m[2]));
    if (m[1] == "SpatialRP") return {ConditionKind::SpatialRP, axis};
    if (m[1] == "AltSpatialRP") return {ConditionKind::AltSpatialRP, axis};
    return {ConditionKind::DoublyRP, axis};
  }
  throw Error(ErrorCode::ConfigError, "unknown condition id '" + id + "'");
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Pass: return "Pass";
    case Verdict::Fail: return "Fail";
    case Verdict::NotApplicable: return "NotApplicable";
  }
  return "?";
}

Eigen::MatrixXcd compressed_matrix(const CovarianceOperator& D, std::size_t axis, bool alt) {
  const auto& g = *D.grid();
  const auto sites = g.halfspace_sites(axis, +1);
  const auto& r = g.reflection(axis);
  const double vol = g.cell_volume();
  const auto n = static_cast<Eigen::Index>(sites.size());
  Eigen::MatrixXcd A(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto x = sites[static_cast<std::size_t>(i)], y = sites[static_cast<std::size_t>(j)];
      A(i, j) = vol * (alt ? D.entry(x, r[y]) : D.entry(r[x], y));
    }
  return A;
}

RPReport assess(const Eigen::MatrixXcd& A, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  RPReport rep;
  rep.dimension = static_cast<std::size_t>(A.rows());
  rep.tol = tol;
  const double fro = A.norm();
  rep.herm_defect = fro > 0.0 ? (A - A.adjoint()).norm() / fro : 0.0;
  rep.norm = spectral_norm(A);
  if (A.size() > 0) {
    const Eigen::MatrixXcd H = 0.5 * (A + A.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    rep.min_eig = es.eigenvalues()(0);
  }
  const bool ok = rep.herm_defect <= tol && rep.min_eig >= -tol * rep.norm;
  rep.verdict = ok ? Verdict::Pass : Verdict::Fail;
  return rep;
}

double kernel_reflection_covariance_defect(const CovarianceOperator& D, std::size_t axis) {
  const auto& g = *D.grid();
  const auto& shape = D.table_shape();
  std::vector<int> d(g.dim()), pd(g.dim()), nd(g.dim());
  std::vector<int> lo(g.dim()), hi(g.dim());
  for (std::size_t j = 0; j < g.dim(); ++j) {
    const auto& ax = g.axis(j);
    lo[j] = ax.kind == AxisKind::Line ? -(ax.sites - 1) : 0;
    hi[j] = lo[j] + static_cast<int>(shape[j]) - 1;
  }
  double diff = 0.0, scale = 0.0;
  d = lo;
  for (;;) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      pd[j] = j == axis ? -d[j] : d[j];
      nd[j] = -d[j];
    }
    const cplx a = D.kernel(pd), b = std::conj(D.kernel(nd));
    diff = std::max(diff, std::abs(a - b));
    scale = std::max(scale, std::abs(D.kernel(d)));
    std::size_t j = d.size();
    while (j-- > 0) {
      if (++d[j] <= hi[j]) break;
      d[j] = lo[j];
    }
    if (j == static_cast<std::size_t>(-1)) break;
  }
  return scale > 0.0 ? diff / scale : 0.0;
}

RPReport check_unchecked(const RPCondition& cond, const CovarianceOperator& D, double tol) {
  const auto& g = *D.grid();
  RPReport rep;
  rep.condition = cond;
  rep.tol = tol;
  const bool spatial = cond.kind == ConditionKind::SpatialRP || cond.kind == ConditionKind::AltSpatialRP;
  if (needs_axis(cond.kind) && (cond.axis >= g.dim() || (spatial && cond.axis == 0))) {
    rep.note = "axis " + std::to_string(cond.axis) + " is not available on this grid";
    return rep;
  }

  auto finish = [&](RPReport r, bool alt) {
    r.condition = cond;
    if (needs_axis(cond.kind)) {
      r.covariance_defect = kernel_reflection_covariance_defect(D, cond.axis);
      if (r.verdict == Verdict::Fail) r.witness = find_witness(D, cond.axis, tol, alt);
    }
    return r;
  };

  switch (cond.kind) {
    case ConditionKind::MeasurePositivity: {
      auto r = assess(D.matrix(), tol);
      r.condition = cond;
      return r;
    }
    case ConditionKind::TimeRP:
    case ConditionKind::SpatialRP: return finish(assess(compressed_matrix(D, cond.axis, false), tol), false);
    case ConditionKind::AltTimeRP:
    case ConditionKind::AltSpatialRP: return finish(assess(compressed_matrix(D, cond.axis, true), tol), true);
    case ConditionKind::DoublyRP: {
      auto a = finish(assess(compressed_matrix(D, cond.axis, false), tol), false);
      auto b = finish(assess(compressed_matrix(D, cond.axis, true), tol), true);
      RPReport r = a;
      r.herm_defect = std::max(a.herm_defect, b.herm_defect);
      r.min_eig = std::min(a.min_eig, b.min_eig);
      r.norm = std::max(a.norm, b.norm);
      r.verdict = a.verdict == Verdict::Pass && b.verdict == Verdict::Pass ? Verdict::Pass : Verdict::Fail;
      if (!r.witness) r.witness = b.witness;
      r.note = "pi D: " + std::string(to_string(a.verdict)) + ", D pi: " + std::string(to_string(b.verdict));
      return r;
    }
  }
  return rep;
}

RPReport check(const RPCondition& cond, const CovarianceOperator& D, double tol) {
  if (D.evenness_defect() > 1e-10)
    throw Error(ErrorCode::NotACovariance, "kernel is not symmetric: " + D.provenance());
  return check_unchecked(cond, D, tol);
}

cplx reflected_form(const CovarianceOperator& D, std::size_t axis, std::span<const cplx> f, std::span<const cplx> g,
                    bool alt) {
  const auto& grid = *D.grid();
  std::vector<cplx> h;
  if (alt) {
    h = D.apply(reflect(grid, axis, g));
  } else {
    h = reflect(grid, axis, D.apply(g));
  }
  cplx acc{};
  for (std::size_t s = 0; s < h.size(); ++s) acc += std::conj(f[s]) * h[s];
  return grid.cell_volume() * acc;
}

std::optional<Witness> find_witness(const CovarianceOperator& D, std::size_t axis, double tol, bool alt) {
  const auto A = compressed_matrix(D, axis, alt);
  if (A.size() == 0) return std::nullopt;
  const Eigen::MatrixXcd H = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  if (es.eigenvalues()(0) >= -tol * spectral_norm(A)) return std::nullopt;
  const auto& g = *D.grid();
  const auto sites = g.halfspace_sites(axis, +1);
  Witness w;
  w.field.assign(g.size(), cplx{});
  for (std::size_t i = 0; i < sites.size(); ++i) w.field[sites[i]] = es.eigenvectors()(static_cast<Eigen::Index>(i), 0);
  w.value = reflected_form(D, axis, w.field, w.field, alt);
  return w;
}

Eigen::MatrixXcd build_M(const CovarianceOperator& D, std::size_t axis, const std::vector<std::vector<cplx>>& fs) {
  const auto& g = *D.grid();
  for (const auto& f : fs) require_support(g, axis, f);
  const auto n = static_cast<Eigen::Index>(fs.size());
  Eigen::MatrixXcd M(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    std::vector<cplx> cf(fs[static_cast<std::size_t>(j)].size());
    for (std::size_t s = 0; s < cf.size(); ++s) cf[s] = std::conj(fs[static_cast<std::size_t>(j)][s]);
    const auto tcf = reflect(g, axis, cf);
    for (Eigen::Index jp = 0; jp < n; ++jp) {
      const auto& fp = fs[static_cast<std::size_t>(jp)];
      std::vector<cplx> h(fp.size());
      for (std::size_t s = 0; s < h.size(); ++s) h[s] = fp[s] - tcf[s];
      M(j, jp) = std::exp(-0.5 * D.bilinear(h, h));
    }
  }
  return M;
}

Eigen::MatrixXcd k_matrix(const CovarianceOperator& D, std::size_t axis, const std::vector<std::vector<cplx>>& fs) {
  const auto n = static_cast<Eigen::Index>(fs.size());
  Eigen::MatrixXcd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index jp = 0; jp < n; ++jp)
      k(j, jp) = reflected_form(D, axis, fs[static_cast<std::size_t>(j)], fs[static_cast<std::size_t>(jp)]);
  return k;
}

GaussianIdentity verify_gaussian_identity(const CovarianceOperator& D, std::size_t axis,
                                          const std::vector<std::vector<cplx>>& fs, std::span<const cplx> cs) {
  if (cs.size() != fs.size()) throw Error(ErrorCode::InvalidArgument, "one coefficient per test function required");
  const auto M = build_M(D, axis, fs);
  const auto k = k_matrix(D, axis, fs);
  const auto n = fs.size();
  std::vector<cplx> d(n);
  for (std::size_t j = 0; j < n; ++j) d[j] = cs[j] * std::exp(-0.5 * D.bilinear(fs[j], fs[j]));
  GaussianIdentity out;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t jp = 0; jp < n; ++jp) {
      const auto a = static_cast<Eigen::Index>(j), b = static_cast<Eigen::Index>(jp);
      out.lhs += std::conj(cs[j]) * cs[jp] * M(a, b);
      out.rhs += std::conj(d[j]) * d[jp] * std::exp(k(a, b));
    }
  const double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
  out.defect = scale > 0.0 ? std::abs(out.lhs - out.rhs) / scale : 0.0;
  out.covariance_defect = kernel_reflection_covariance_defect(D, axis);
  return out;
}

KBound check_K_geq_I(const CovarianceOperator& D, std::size_t axis, const std::vector<std::vector<cplx>>& fs,
                     double tol) {
  for (const auto& f : fs) require_support(*D.grid(), axis, f);
  const auto k = k_matrix(D, axis, fs);
  const Eigen::MatrixXcd kh = 0.5 * (k + k.adjoint());
  const Eigen::MatrixXcd K = kh.array().exp().matrix();
  const auto n = K.rows();
  KBound out;
  if (n == 0) return out;
  auto min_eig = [](const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  };
  out.min_eig = min_eig(K);
  out.min_eig_k = min_eig(kh);
  out.min_eig_excess = min_eig(K - Eigen::MatrixXcd::Ones(n, n));
  const double delta = kh.diagonal().real().minCoeff();
  out.schur_bound = out.min_eig_k * (delta > 0.0 ? std::expm1(delta) / delta : 1.0);
  out.pass = out.min_eig >= 1.0 - tol;
  return out;
}

Equivalence check_equivalence(const CovarianceOperator& D, std::size_t axis, double tol) {
  Equivalence out;
  const auto& g = *D.grid();
  if (axis >= g.dim() || D.evenness_defect() > 1e-10 || kernel_reflection_covariance_defect(D, axis) > 1e-10) {
    out.reflected_first.note = out.reflected_last.note = "precondition failed";
    return out;
  }
  const auto A = compressed_matrix(D, axis, false);
  const auto B = compressed_matrix(D, axis, true);
  const ConditionKind ka = axis == 0 ? ConditionKind::TimeRP : ConditionKind::SpatialRP;
  const ConditionKind kb = axis == 0 ? ConditionKind::AltTimeRP : ConditionKind::AltSpatialRP;
  out.reflected_first = assess(A, tol);
  out.reflected_first.condition = {ka, axis};
  out.reflected_last = assess(B, tol);
  out.reflected_last.condition = {kb, axis};
  out.agree = out.reflected_first.verdict == out.reflected_last.verdict;
  const double na = A.norm();
  out.identity_defect = na > 0.0 ? (B - A.conjugate()).norm() / na : 0.0;
  out.verdict = out.agree && out.identity_defect <= tol ? Verdict::Pass : Verdict::Fail;
  return out;
}

MMatrixPositivity m_matrix_positivity(const CovarianceOperator& D, std::size_t axis, int draws, std::uint64_t seed,
                                      double tol) {
  const auto& g = *D.grid();
  const auto sites = g.halfspace_sites(axis, +1);
  MMatrixPositivity out;
  out.seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto consider = [&](const std::vector<std::vector<cplx>>& fs) {
    const auto M = build_M(D, axis, fs);
    const Eigen::MatrixXcd H = 0.5 * (M + M.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    const double scale = std::max(spectral_norm(M), 1e-300);
    const double e = es.eigenvalues()(0) / scale;
    out.min_eig = std::min(out.min_eig, e);
    if (e < -tol) out.positive = false;
    ++out.draws;
  };

  const double vol = g.cell_volume();
  for (int t = 0; t < draws; ++t) {
    std::vector<std::vector<cplx>> fs(3, std::vector<cplx>(g.size()));
    for (auto& f : fs) {
      for (auto s : sites) f[s] = {gauss(rng), gauss(rng)};
      // keep <conj f, D f> of order one
      const double q = std::abs(D.bilinear(f, f)) + std::abs(D.sesquilinear(f, f));
      const double scale = q > 0.0 ? 1.0 / std::sqrt(q) : 1.0 / vol;
      for (auto& v : f) v *= scale;
    }
    consider(fs);
  }

  // two-point probe {0, lambda v} with v the most negative direction; the M matrix
  // is congruent to [[1, 1], [1, exp(lambda^2 <v, theta D v>)]]
  const auto A = compressed_matrix(D, axis, false);
  if (A.size() > 0) {
    const Eigen::MatrixXcd H = 0.5 * (A + A.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    std::vector<cplx> v(g.size());
    for (std::size_t i = 0; i < sites.size(); ++i) v[sites[i]] = es.eigenvectors()(static_cast<Eigen::Index>(i), 0);
    const double form = std::abs(reflected_form(D, axis, v, v));
    const double q = std::abs(D.bilinear(v, v)) + form;
    const double lambda = q > 0.0 ? std::sqrt(0.1 / q) : 1.0;
    for (auto& x : v) x *= lambda;
    consider({std::vector<cplx>(g.size()), v});
  }
  return out;
}

}  // namespace rplab

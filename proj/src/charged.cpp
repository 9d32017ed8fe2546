#include "rplab/charged.hpp"

#include <algorithm>
#include <regex>

#include "rplab/error.hpp"

namespace rplab {

ChargedCovariance build_charged(const FourierMultiplier& sp, const FourierMultiplier& sm) {
  if (!sp.grid || !sm.grid || !sp.grid->same_shape(*sm.grid))
    throw Error(ErrorCode::GridMismatch, "charged components must live on the same grid");
  const auto& neg = sp.grid->momentum_negation();
  std::vector<cplx> v(sp.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = sp.values[i] * sm.values[neg[i]];
  SymbolFn lat;
  if (sp.lattice && sm.lattice)
    lat = [a = sp.lattice, b = sm.lattice](std::span<const double> k) {
      std::vector<double> q(k.begin(), k.end());
      for (auto& x : q) x = -x;
      return a(k) * b(q);
    };
  auto symbol = make_multiplier(sp.grid, std::move(v), lat, sp.provenance + "*" + sm.provenance + "(-k)");
  auto D = assemble_kernel(symbol);
  auto DT = D.transposed();
  return {sp, sm, std::move(symbol), std::move(D), std::move(DT)};
}

ChargedCovariance build_charged(const MultiplierSpec& plus, const MultiplierSpec& minus, GridPtr grid) {
  return build_charged(sigma_from_D(sample(plus, grid)), sigma_from_D(sample(minus, grid)));
}

Eigen::MatrixXcd ChargedCovariance::block_matrix() const {
  const auto n = static_cast<Eigen::Index>(D.grid()->size());
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  B.topRightCorner(n, n) = D.matrix();
  B.bottomLeftCorner(n, n) = DT.matrix();
  return B;
}

Eigen::MatrixXcd ChargedCovariance::conjugated_block_matrix() const {
  const auto n = static_cast<Eigen::Index>(D.grid()->size());
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  B.topLeftCorner(n, n) = DT.matrix();
  B.bottomRightCorner(n, n) = D.matrix();
  return B;
}

TwoPoint ChargedCovariance::two_point() const {
  const std::size_t n = D.grid()->size();
  return [this, n](std::size_t a, std::size_t b) -> cplx {
    const bool pa = a < n, pb = b < n;
    if (pa == pb) return 0.0;
    return pa ? D.entry(a, b - n) : DT.entry(a - n, b);
  };
}

ChargedTestFunction charge_conjugate(const ChargedTestFunction& f) { return {f.minus, f.plus}; }

ChargedCharacteristic charged_characteristic(const ChargedCovariance& C, const ChargedTestFunction& f) {
  const std::size_t n = C.D.grid()->size();
  if (f.plus.size() != n || f.minus.size() != n)
    throw Error(ErrorCode::InvalidArgument, "charged test function does not match the grid");
  ChargedCharacteristic out;
  out.value = std::exp(-C.D.bilinear(f.plus, f.minus));
  // <conj F, D F> on the doubled space
  const double vol = C.D.grid()->cell_volume();
  Eigen::VectorXcd F(2 * n);
  for (std::size_t s = 0; s < n; ++s) {
    F(static_cast<Eigen::Index>(s)) = f.plus[s];
    F(static_cast<Eigen::Index>(n + s)) = f.minus[s];
  }
  const cplx form = vol * (F.transpose() * (C.block_matrix() * F))(0);
  out.matrix_form = std::exp(-0.5 * form);
  out.defect = std::abs(out.value - out.matrix_form) / std::max(std::abs(out.value), 1e-300);
  return out;
}

std::string ChargedCondition::id() const {
  switch (kind) {
    case ChargedConditionKind::Measure: return "ChargedMeasure";
    case ChargedConditionKind::TimeRP: return "ChargedTimeRP";
    case ChargedConditionKind::AltTimeRP: return "ChargedAltTimeRP";
    case ChargedConditionKind::SpatialRP: return "ChargedSpatialRP(" + std::to_string(axis) + ")";
    case ChargedConditionKind::AltSpatialRP: return "ChargedAltSpatialRP(" + std::to_string(axis) + ")";
  }
  return "?";
}

ChargedCondition ChargedCondition::parse(const std::string& id) {
  if (id == "ChargedMeasure") return {ChargedConditionKind::Measure, 0};
  if (id == "ChargedTimeRP") return {ChargedConditionKind::TimeRP, 0};
  if (id == "ChargedAltTimeRP") return {ChargedConditionKind::AltTimeRP, 0};
  static const std::regex re(R"((ChargedSpatialRP|ChargedAltSpatialRP)\((\d+)\))");
  std::smatch m;
  if (std::regex_match(id, m, re)) {
    const auto axis = static_cast<std::size_t>(std::stoul(m[2]));
    return {m[1] == "ChargedSpatialRP" ? ChargedConditionKind::SpatialRP : ChargedConditionKind::AltSpatialRP, axis};
  }
  throw Error(ErrorCode::ConfigError, "unknown charged condition id '" + id + "'");
}

ChargedReport check_charged(const ChargedCondition& cond, const ChargedCovariance& C, double tol) {
  // theta C D = diag(theta D^T, theta D); D theta C = diag(D theta, D^T theta)
  RPCondition neutral;
  switch (cond.kind) {
    case ChargedConditionKind::Measure: neutral = {ConditionKind::MeasurePositivity, 0}; break;
    case ChargedConditionKind::TimeRP: neutral = {ConditionKind::TimeRP, 0}; break;
    case ChargedConditionKind::AltTimeRP: neutral = {ConditionKind::AltTimeRP, 0}; break;
    case ChargedConditionKind::SpatialRP: neutral = {ConditionKind::SpatialRP, cond.axis}; break;
    case ChargedConditionKind::AltSpatialRP: neutral = {ConditionKind::AltSpatialRP, cond.axis}; break;
  }
  ChargedReport out;
  out.condition = cond;
  const bool alt = cond.kind == ChargedConditionKind::AltTimeRP || cond.kind == ChargedConditionKind::AltSpatialRP;
  // block acting on the + component
  out.transposed_block = check_unchecked(neutral, alt ? C.D : C.DT, tol);
  out.direct_block = check_unchecked(neutral, alt ? C.DT : C.D, tol);
  const auto a = out.transposed_block.verdict, b = out.direct_block.verdict;
  if (a == Verdict::NotApplicable || b == Verdict::NotApplicable) {
    out.verdict = Verdict::NotApplicable;
  } else {
    out.verdict = a == Verdict::Pass && b == Verdict::Pass ? Verdict::Pass : Verdict::Fail;
  }
  if (out.transposed_block.witness) {
    out.witness_block = "+";
  } else if (out.direct_block.witness) {
    out.witness_block = "-";
  }
  return out;
}

double charged_reflection_covariance_defect(const FourierMultiplier& sp, const FourierMultiplier& sm,
                                            std::size_t axis) {
  if (!sp.grid->same_shape(*sm.grid)) throw Error(ErrorCode::GridMismatch, "charged components differ in grid");
  const auto partner = sp.grid->momentum_reflection_partner(axis);
  double defect = 0.0;
  for (std::size_t i = 0; i < sp.values.size(); ++i) {
    defect = std::max(defect, std::abs(std::conj(sp.values[partner[i]]) - sm.values[i]));
    defect = std::max(defect, std::abs(std::conj(sm.values[partner[i]]) - sp.values[i]));
  }
  return defect;
}

}  // namespace rplab

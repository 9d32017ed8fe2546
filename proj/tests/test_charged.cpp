#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "rplab/charged.hpp"
#include "rplab/error.hpp"
#include "support.hpp"

using namespace rplab;
using namespace testing_support;

namespace {

GridPtr square(int n, double a) { return build_grid({AxisSpec::line(n, a), AxisSpec::line(n, a)}); }

cplx permanent(const Eigen::MatrixXcd& m) {
  std::vector<int> p(static_cast<std::size_t>(m.rows()));
  std::iota(p.begin(), p.end(), 0);
  cplx acc{};
  do {
    cplx t = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) t *= m(static_cast<Eigen::Index>(i), p[i]);
    acc += t;
  } while (std::next_permutation(p.begin(), p.end()));
  return acc;
}

/// sigma_- := conj(sigma_+(-pi_0 k)) for a given sigma_+.
FourierMultiplier reflected_partner(const FourierMultiplier& sp) {
  const auto partner = sp.grid->momentum_reflection_partner(0);
  std::vector<cplx> v(sp.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::conj(sp.values[partner[i]]);
  SymbolFn lat;
  if (sp.lattice)
    lat = [f = sp.lattice](std::span<const double> k) {
      std::vector<double> q(k.begin(), k.end());
      for (std::size_t j = 1; j < q.size(); ++j) q[j] = -q[j];
      return std::conj(f(q));
    };
  return make_multiplier(sp.grid, std::move(v), lat, "partner");
}

}  // namespace

TEST_CASE("neutral pair gives a real symmetric block covariance") {
  const auto C = build_charged(FreeField{1.0}, FreeField{1.0}, square(8, 0.5));
  const auto B = C.block_matrix();
  const Eigen::Index n = 64;
  CHECK(B.topLeftCorner(n, n).norm() == 0.0);
  CHECK(B.bottomRightCorner(n, n).norm() == 0.0);
  CHECK((B - B.transpose()).norm() <= 1e-14 * B.norm());
  CHECK(B.imag().norm() <= 1e-14 * B.norm());
  CHECK((C.D.matrix() - C.DT.matrix()).norm() <= 1e-14 * B.norm());
}

TEST_CASE("charged symbol is sigma_+(k) sigma_-(-k)") {
  auto g = square(8, 0.5);
  const auto C = build_charged(DriftFreeField{1.0, 0.3}, FreeField{2.0}, g);
  const auto& neg = g->momentum_negation();
  for (std::size_t i = 0; i < g->size(); ++i)
    CHECK(std::abs(C.symbol.values[i] - C.sigma_plus.values[i] * C.sigma_minus.values[neg[i]]) < 1e-15);
  // block structure survives complex symbols
  const auto B = C.block_matrix();
  CHECK((B - B.transpose()).norm() <= 1e-14 * B.norm());
}

TEST_CASE("charged characteristic matches the block quadratic form") {
  auto g = square(6, 0.5);
  const auto C = build_charged(DriftFreeField{1.0, 0.2}, FreeField{1.0}, g);
  std::mt19937_64 rng(11);
  const ChargedTestFunction zero{std::vector<cplx>(g->size()), std::vector<cplx>(g->size())};
  CHECK(charged_characteristic(C, zero).value == cplx(1.0));
  auto half = zero;
  half.plus = random_field(g->size(), rng);
  CHECK(std::abs(charged_characteristic(C, half).value - 1.0) < 1e-15);
  for (int t = 0; t < 100; ++t) {
    ChargedTestFunction f{random_field(g->size(), rng), random_field(g->size(), rng)};
    for (auto& v : f.plus) v *= 0.1;
    for (auto& v : f.minus) v *= 0.1;
    CHECK(charged_characteristic(C, f).defect <= 1e-12);
  }
}

TEST_CASE("charge conjugation swaps components and blocks") {
  auto g = square(6, 0.5);
  const auto C = build_charged(DriftFreeField{1.0, 0.2}, FreeField{1.5}, g);
  std::mt19937_64 rng(3);
  ChargedTestFunction f{random_field(g->size(), rng), random_field(g->size(), rng)};
  const auto cf = charge_conjugate(f);
  CHECK(cf.plus == f.minus);
  CHECK(cf.minus == f.plus);
  const auto ccf = charge_conjugate(cf);
  CHECK(ccf.plus == f.plus);
  CHECK(ccf.minus == f.minus);
  // C D = [[D^T, 0], [0, D]] as the product of the swap with the block matrix
  const Eigen::Index n = static_cast<Eigen::Index>(g->size());
  Eigen::MatrixXcd swap = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  swap.topRightCorner(n, n).setIdentity();
  swap.bottomLeftCorner(n, n).setIdentity();
  CHECK((swap * C.block_matrix() - C.conjugated_block_matrix()).norm() == 0.0);
}

TEST_CASE("charged condition ids round-trip") {
  for (const char* id : {"ChargedMeasure", "ChargedTimeRP", "ChargedAltTimeRP", "ChargedSpatialRP(1)",
                         "ChargedAltSpatialRP(1)"})
    CHECK(ChargedCondition::parse(id).id() == id);
  CHECK_THROWS_AS(ChargedCondition::parse("TimeRP"), Error);
}

TEST_CASE("charged time reflection positivity") {
  auto g = square(12, 0.25);
  SUBCASE("free pair passes every condition") {
    const auto C = build_charged(FreeField{1.0}, FreeField{1.0}, g);
    for (const char* id : {"ChargedMeasure", "ChargedTimeRP", "ChargedAltTimeRP", "ChargedSpatialRP(1)"}) {
      const auto r = check_charged(ChargedCondition::parse(id), C);
      CHECK_MESSAGE(r.verdict == Verdict::Pass, id);
      CHECK(r.witness_block.empty());
    }
  }
  SUBCASE("sigma_- = conj sigma_+(-theta k) passes") {
    const auto sp = sigma_from_D(sample(DriftFreeField{1.0, 0.3}, g));
    const auto sm = reflected_partner(sp);
    CHECK(charged_reflection_covariance_defect(sp, sm, 0) < 1e-14);
    const auto C = build_charged(sp, sm);
    CHECK(check_charged({ChargedConditionKind::TimeRP, 0}, C).verdict == Verdict::Pass);
  }
  SUBCASE("a non-positive component fails with a tagged witness") {
    auto line = build_grid({AxisSpec::line(48, 0.25)});
    const auto C = build_charged(PowerCovariance{1.0, 2.0}, PowerCovariance{1.0, 2.0}, line);
    const auto r = check_charged({ChargedConditionKind::TimeRP, 0}, C);
    CHECK(r.verdict == Verdict::Fail);
    CHECK((r.witness_block == "+" || r.witness_block == "-"));
  }
  SUBCASE("missing axis is not applicable") {
    auto line = build_grid({AxisSpec::line(16, 0.25)});
    const auto C = build_charged(FreeField{1.0}, FreeField{1.0}, line);
    CHECK(check_charged({ChargedConditionKind::SpatialRP, 1}, C).verdict == Verdict::NotApplicable);
  }
}

TEST_CASE("charged reflection covariance defect") {
  auto g = square(8, 0.5);
  const auto s = sigma_from_D(sample(FreeField{1.0}, g));
  CHECK(charged_reflection_covariance_defect(s, s, 0) < 1e-15);
  const auto d = sigma_from_D(sample(DriftFreeField{1.0, 0.3}, g));
  CHECK(charged_reflection_covariance_defect(d, s, 0) > 1e-3);
  CHECK_THROWS_AS(build_charged(s, sigma_from_D(sample(FreeField{1.0}, square(6, 0.5)))), Error);
}

TEST_CASE("charged Schwinger functions are permanents") {
  auto g = build_grid({AxisSpec::line(10, 0.5)});
  const auto C = build_charged(DriftFreeField{1.0, 0.0}, PowerCovariance{0.7, 1.0}, g);
  const auto s2 = C.two_point();
  const std::size_t N = g->size();
  // unequal charge counts vanish
  const std::vector<std::size_t> odd{1, 4, N + 2};
  CHECK(std::abs(schwinger(s2, odd)) == 0.0);
  const std::vector<std::size_t> same{1, 4, 7, 2};
  CHECK(std::abs(schwinger(s2, same)) == 0.0);
  const std::vector<std::size_t> xs{1, 3, 8}, ys{0, 5, 6};
  for (std::size_t n = 1; n <= 3; ++n) {
    std::vector<std::size_t> pts;
    Eigen::MatrixXcd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back(xs[i]);
      pts.push_back(N + ys[i]);
      for (std::size_t j = 0; j < n; ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = C.D.entry(xs[i], ys[j]);
    }
    const cplx perm = permanent(m);
    CHECK(rel(schwinger(s2, pts), perm) < 1e-12);
    CHECK(rel(pairing_oracle(s2, pts), perm) < 1e-12);
  }
}

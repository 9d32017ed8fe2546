#include "doctest.h"
#include "families.hpp"
#include "rplab/error.hpp"
#include "rplab/rp_check.hpp"
#include "support.hpp"

using namespace rplab;
using namespace testing_support;

namespace {

GridPtr square(int n, double a) { return build_grid({AxisSpec::line(n, a), AxisSpec::line(n, a)}); }

std::vector<std::vector<cplx>> positive_fields(const SpacetimeGrid& g, std::size_t axis, int count, double scale,
                                               std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::vector<std::vector<cplx>> fs(count, std::vector<cplx>(g.size()));
  for (auto& f : fs)
    for (auto s : g.halfspace_sites(axis, +1)) f[s] = scale * cplx(gauss(rng), gauss(rng));
  return fs;
}

}  // namespace

TEST_CASE("condition ids round-trip") {
  for (const char* id : {"MeasurePositivity", "TimeRP", "AltTimeRP", "SpatialRP(1)", "AltSpatialRP(2)", "DoublyRP(0)"})
    CHECK(RPCondition::parse(id).id() == id);
  CHECK_THROWS_AS(RPCondition::parse("Nope"), Error);
}

TEST_CASE("free field is time reflection positive") {
  const auto D = kernel(sample(FreeField{1.0}, square(16, 0.25)));
  const auto r = check({ConditionKind::TimeRP, 0}, D);
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.dimension == 128);
  CHECK(r.herm_defect <= 1e-10);
  CHECK(r.min_eig >= -1e-10 * r.norm);
  CHECK(r.covariance_defect < 1e-12);
  CHECK(!r.witness);
  for (const auto& id : {"AltTimeRP", "MeasurePositivity", "SpatialRP(1)", "DoublyRP(0)"})
    CHECK(check(RPCondition::parse(id), D).verdict == Verdict::Pass);
}

TEST_CASE("delta kernel compresses to zero") {
  const auto D = kernel(sample(Constant{1.0}, square(8, 0.5)));
  const auto r = check({ConditionKind::TimeRP, 0}, D);
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.min_eig == 0.0);
  CHECK(compressed_matrix(D, 0, false).norm() < 1e-13);
}

TEST_CASE("p = 2 fails with a certified witness, p = 1 passes") {
  auto g = build_grid({AxisSpec::line(64, 0.25)});
  const auto D2 = kernel(sample(PowerCovariance{1.0, 2.0}, g));
  const auto r = check({ConditionKind::TimeRP, 0}, D2);
  CHECK(r.verdict == Verdict::Fail);
  REQUIRE(r.witness);
  const auto& w = *r.witness;
  const auto plus = g->halfspace(0, +1);
  for (std::size_t s = 0; s < g->size(); ++s)
    if (!plus[s]) CHECK(w.field[s] == cplx{});
  // independent recomputation through the dense matrix
  Eigen::VectorXcd f(g->size());
  for (std::size_t s = 0; s < g->size(); ++s) f(s) = w.field[s];
  Eigen::VectorXcd Df = D2.matrix() * f;
  Eigen::VectorXcd tDf(g->size());
  for (std::size_t s = 0; s < g->size(); ++s) tDf(s) = Df(g->reflection(0)[s]);
  const cplx value = g->cell_volume() * f.dot(tDf);
  CHECK(value.real() < 0.0);
  CHECK(std::abs(value - w.value) < 1e-12 * std::abs(value));

  const auto D1 = kernel(sample(PowerCovariance{1.0, 1.0}, g));
  CHECK(check({ConditionKind::TimeRP, 0}, D1).verdict == Verdict::Pass);
  CHECK(!find_witness(D1, 0));
}

TEST_CASE("tolerance is honoured by the witness finder") {
  auto g = build_grid({AxisSpec::line(32, 0.25)});
  const auto base = kernel(sample(FreeField{1.0}, g));
  const auto bad = kernel(sample(PowerCovariance{1.0, 2.0}, g));
  auto mix = [&](double eps) {
    std::vector<cplx> t(base.table().size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = base.table()[i] + eps * bad.table()[i];
    return CovarianceOperator(g, t, "mix");
  };
  // the free part dominates all but the smallest compressed eigenvalues; pick eps
  // below tol relative to the norm
  CHECK(!find_witness(mix(1e-14), 0, 1e-10));
  CHECK(find_witness(bad, 0, 1e-10));
}

TEST_CASE("not applicable and not a covariance") {
  auto g = build_grid({AxisSpec::line(8, 0.5)});
  const auto D = kernel(sample(FreeField{1.0}, g));
  CHECK(check(RPCondition::parse("SpatialRP(1)"), D).verdict == Verdict::NotApplicable);
  CHECK(check(RPCondition::parse("DoublyRP(3)"), D).verdict == Verdict::NotApplicable);

  const auto odd = assemble_kernel(sample(k0_family(), square(8, 0.5)));
  try {
    check({ConditionKind::TimeRP, 0}, odd);
    FAIL("expected NotACovariance");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotACovariance);
  }
}

TEST_CASE("reflection-covariant complex kernels compress to hermitian matrices") {
  for (const MultiplierSpec& spec : {MultiplierSpec{k0k1_family()}, MultiplierSpec{DriftFreeField{1.0, 0.5}}}) {
    const auto D = kernel(sample(spec, square(12, 0.4)));
    CHECK(kernel_reflection_covariance_defect(D, 0) < 1e-12);
    const auto A = compressed_matrix(D, 0, false);
    CHECK((A - A.adjoint()).norm() <= 1e-10 * A.norm());
  }
}

TEST_CASE("M matrix") {
  std::mt19937_64 rng(17);
  auto g = square(8, 0.5);
  const auto D = kernel(sample(FreeField{1.0}, g));
  const auto M0 = build_M(D, 0, {std::vector<cplx>(g->size())});
  CHECK(M0.rows() == 1);
  CHECK(std::abs(M0(0, 0) - 1.0) == 0.0);

  const auto fs = positive_fields(*g, 0, 2, 0.5, rng);
  const auto M = build_M(D, 0, fs);
  CHECK((M - M.adjoint()).norm() < 1e-12 * M.norm());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (M + M.adjoint()));
  CHECK(es.eigenvalues()(0) >= -1e-12);

  std::vector<cplx> outside(g->size());
  outside[0] = 1.0;
  try {
    build_M(D, 0, {outside});
    FAIL("expected SupportError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SupportError);
  }
}

TEST_CASE("gaussian identity") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss;
  auto g = square(8, 0.5);
  for (const MultiplierSpec& spec : {MultiplierSpec{FreeField{1.0}}, MultiplierSpec{DriftFreeField{1.0, 0.5}}}) {
    const auto D = kernel(sample(spec, g));
    const auto fs = positive_fields(*g, 0, 5, 0.4, rng);
    std::vector<cplx> cs(5);
    for (auto& c : cs) c = {gauss(rng), gauss(rng)};
    const auto id = verify_gaussian_identity(D, 0, fs, cs);
    CHECK(id.defect < 1e-10);
    CHECK(id.covariance_defect < 1e-12);

    const auto single = verify_gaussian_identity(D, 0, {fs[0]}, std::vector<cplx>{1.0});
    CHECK(single.defect < 1e-12);
  }
  const auto D = kernel(sample(FreeField{1.0}, g));
  const std::vector<std::vector<cplx>> zeros(3, std::vector<cplx>(g->size()));
  const std::vector<cplx> cs{1.0, {0.0, 2.0}, -0.5};
  const auto z = verify_gaussian_identity(D, 0, zeros, cs);
  cplx expect{};
  for (auto a : cs)
    for (auto b : cs) expect += std::conj(a) * b;
  CHECK(z.defect == 0.0);
  CHECK(std::abs(z.lhs - expect) < 1e-15);
}

TEST_CASE("exponential gram bound") {
  auto g = square(8, 0.5);
  const auto D = kernel(sample(FreeField{1.0}, g));
  const std::vector<cplx> zero(g->size());

  // degenerate draws: ones matrix, smallest eigenvalue 0
  const auto ones = check_K_geq_I(D, 0, {zero, zero});
  CHECK(std::abs(ones.min_eig) < 1e-15);
  CHECK(!ones.pass);
  CHECK(ones.min_eig_excess >= -1e-15);

  CHECK(check_K_geq_I(D, 0, {zero}).min_eig == doctest::Approx(1.0));

  // single f with <f, theta D f> = t > 0
  std::vector<cplx> f(g->size());
  const int site[] = {4, 3};
  f[g->index(site)] = 1.0;
  const double t = reflected_form(D, 0, f, f).real();
  CHECK(t > 0.0);
  const auto one = check_K_geq_I(D, 0, {f});
  CHECK(one.min_eig == doctest::Approx(std::exp(t)));
  CHECK(one.pass);

  // orthogonal bumps at different times, scaled so that k is diagonal-dominant with lambda_min(k) >= 1
  std::vector<std::vector<cplx>> fs;
  for (int n : {4, 7}) {
    std::vector<cplx> h(g->size());
    const int s[] = {n, n == 4 ? 0 : 7};
    h[g->index(s)] = 1.0;
    const double kk = reflected_form(D, 0, h, h).real();
    for (auto& v : h) v *= std::sqrt(20.0 / kk);
    fs.push_back(h);
  }
  const auto strong = check_K_geq_I(D, 0, fs);
  CHECK(strong.min_eig_k >= 1.0);
  CHECK(strong.pass);
  CHECK(strong.min_eig >= strong.schur_bound - 1e-12);

  // small positive k: exp o k >= J holds but exp o k >= I does not
  std::vector<std::vector<cplx>> small;
  for (auto h : fs) {
    for (auto& v : h) v *= 0.01;
    small.push_back(h);
  }
  const auto weak = check_K_geq_I(D, 0, small);
  CHECK(weak.min_eig_k > 0.0);
  CHECK(weak.min_eig < 1.0);
  CHECK(weak.min_eig_excess >= -1e-14);
  CHECK(weak.min_eig >= weak.schur_bound - 1e-14);
}

TEST_CASE("reflected-first and reflected-last orderings agree") {
  auto g = square(12, 0.4);
  const auto free = check_equivalence(kernel(sample(FreeField{1.0}, g)), 0);
  CHECK(free.agree);
  CHECK(free.reflected_first.verdict == Verdict::Pass);
  CHECK(free.reflected_last.verdict == Verdict::Pass);
  CHECK(free.identity_defect < 1e-12);

  const auto complex = check_equivalence(kernel(sample(k0k1_family(), g)), 0);
  CHECK(complex.agree);
  CHECK(complex.identity_defect < 1e-12);
  MESSAGE("k0k1 family verdict: " << to_string(complex.reflected_first.verdict));

  const auto p2 = check_equivalence(kernel(sample(PowerCovariance{1.0, 2.0}, g)), 0);
  CHECK(p2.agree);
  CHECK(p2.reflected_first.verdict == Verdict::Fail);
  CHECK(p2.reflected_last.verdict == Verdict::Fail);

  const auto drift = check_equivalence(kernel(sample(DriftFreeField{1.0, 0.5}, g)), 0);
  CHECK(drift.reflected_first.verdict == Verdict::Pass);
  CHECK(drift.agree);
}

TEST_CASE("M-matrix positivity matches compressed verdicts") {
  auto g = square(8, 0.5);
  for (const MultiplierSpec& spec :
       {MultiplierSpec{FreeField{1.0}}, MultiplierSpec{PowerCovariance{1.0, 2.0}}, MultiplierSpec{k0k1_family()},
        MultiplierSpec{DriftFreeField{1.0, 0.4}}}) {
    const auto D = kernel(sample(spec, g));
    const auto rep = check({ConditionKind::TimeRP, 0}, D);
    const auto m = m_matrix_positivity(D, 0, 50, 99);
    CHECK(m.draws == 51);
    CHECK(m.positive == (rep.verdict == Verdict::Pass));
  }
}

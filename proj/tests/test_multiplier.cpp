#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rplab/error.hpp"
#include "rplab/multiplier.hpp"
#include "support.hpp"

using namespace rplab;
using namespace testing_support;
using namespace std::complex_literals;

namespace {

// Symmetric complex family: K = (k^2+1)^{-1}, L = 0.3 k0 k1 (k^2+1)^{-2}
ExplicitFunction k0k1_family() {
  return {[](std::span<const double> k) {
            double k2 = 0;
            for (double q : k) k2 += q * q;
            const double K = 1.0 / (k2 + 1.0);
            return cplx(K, 0.3 * k[0] * k[1] * K * K);
          },
          "k0k1"};
}

ExplicitTable random_table(const SpacetimeGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 2.0), v(-1.0, 1.0);
  ExplicitTable t;
  for (std::size_t i = 0; i < g.size(); ++i) {
    t.K.push_back(u(rng));
    t.L.push_back(v(rng));
  }
  return t;
}

}  // namespace

TEST_CASE("free field sampling") {
  auto g = build_grid({AxisSpec::line(8, 0.5)});
  const auto m = sample(FreeField{1.0}, g);
  CHECK(m.values[4] == cplx(1.0, 0.0));  // k = 0
  CHECK(m.flags.symmetric);
  CHECK(m.flags.hermitian);
  CHECK(m.flags.real_kernel);

  auto g2 = build_grid({AxisSpec::line(4, 1.0), AxisSpec::line(4, 1.0)});
  ExplicitTable t;
  t.K.assign(16, 1.0);
  t.L.assign(16, 0.0);
  CHECK(sample(t, g2).flags.hermitian);

  ExplicitTable bad = t;
  bad.K[3] = -0.1;
  try {
    sample(bad, g2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HermitianPartNotPositive);
  }
}

TEST_CASE("circle kernel matches the image sum") {
  const double ell = 16.0, m = 1.0;
  auto g = build_grid({AxisSpec::circle(256, ell)});
  const auto D = kernel(sample(FreeField{m}, g));
  double worst = 0.0;
  for (int n = 0; n < 256; ++n) {
    const double x = std::min(n, 256 - n) * g->axis(0).step();
    const double exact = std::cosh(m * (ell / 2 - x)) / (2 * m * std::sinh(m * ell / 2));
    const int d[] = {n};
    worst = std::max(worst, std::abs(D.kernel(d) - exact) / exact);
  }
  CHECK(worst < 1e-6);
  MESSAGE("circle kernel max relative error " << worst);
}

TEST_CASE("line kernel approximates the infinite-line kernel") {
  auto g = build_grid({AxisSpec::line(64, 0.25)});
  const auto D = kernel(sample(FreeField{1.0}, g));
  CHECK(D.synthesis_residual() < 1e-14);
  for (int n = -63; n <= 63; ++n) {
    const int d[] = {n};
    const double exact = std::exp(-std::abs(n) * 0.25) / 2.0;
    CHECK(std::abs(D.kernel(d) - exact) < 1e-13);
  }
}

TEST_CASE("lattice free field inverts the lattice Helmholtz operator") {
  const double a = 0.5, m = 0.7;
  auto g = build_grid({AxisSpec::line(32, a)});
  const auto D = kernel(sample(LatticeFreeField{m}, g));
  for (int n = -30; n <= 30; ++n) {
    const int dm[] = {n - 1}, d0[] = {n}, dp[] = {n + 1};
    const cplx lhs = (2.0 * D.kernel(d0) - D.kernel(dm) - D.kernel(dp)) / (a * a) + m * m * D.kernel(d0);
    CHECK(std::abs(lhs - (n == 0 ? 1.0 / a : 0.0)) < 1e-12);
  }
}

TEST_CASE("hermitian and constant kernels") {
  auto g = build_grid({AxisSpec::line(6, 0.5), AxisSpec::circle(4, 2.0)});
  const auto A = kernel(sample(FreeField{1.0}, g)).matrix();
  CHECK((A - A.adjoint()).norm() <= 1e-12 * A.norm());

  const auto C = kernel(sample(Constant{2.5}, g)).matrix();
  CHECK((C - 2.5 * Eigen::MatrixXcd::Identity(g->size(), g->size())).norm() < 1e-12);
}

TEST_CASE("non-symmetric multipliers are not covariances") {
  auto g = build_grid({AxisSpec::line(8, 0.5), AxisSpec::line(8, 0.5)});
  ExplicitFunction odd{[](std::span<const double> k) {
                         const double K = 1.0 / (k[0] * k[0] + k[1] * k[1] + 1.0);
                         return cplx(K, 0.3 * k[0] * K * K);
                       },
                       "odd"};
  const auto m = sample(odd, g);
  CHECK(!m.flags.symmetric);
  try {
    kernel(m);
    FAIL("expected NotACovariance");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotACovariance);
  }
  CHECK(sample(k0k1_family(), g).flags.symmetric);
}

TEST_CASE("transpose, conjugate and adjoint algebra") {
  std::mt19937_64 rng(11);
  auto g = build_grid({AxisSpec::line(4, 0.5), AxisSpec::circle(6, 3.0)});
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = sample(random_table(*g, rng), g);
    const auto A = assemble_kernel(m).matrix();
    const auto T = assemble_kernel(m.transposed()).matrix();
    const auto C = assemble_kernel(m.conjugated()).matrix();
    const auto S = assemble_kernel(m.adjoint()).matrix();
    CHECK((T - A.transpose()).norm() <= 1e-12 * A.norm());
    CHECK((C - A.conjugate()).norm() <= 1e-12 * A.norm());
    CHECK((S - A.adjoint()).norm() <= 1e-12 * A.norm());
    CHECK(!m.flags.real_kernel);
    // operator-level algebra agrees with the symbol-level one
    CHECK((assemble_kernel(m).transposed().matrix() - T).norm() <= 1e-12 * A.norm());
  }
  // reality flag iff the matrix is real
  const auto r = sample(FreeField{1.0}, g);
  const auto R = kernel(r).matrix();
  CHECK(r.flags.real_kernel);
  CHECK((R - R.conjugate()).norm() <= 1e-12 * R.norm());
}

TEST_CASE("symmetric kernels are even") {
  auto g = build_grid({AxisSpec::line(8, 0.5), AxisSpec::circle(6, 3.0)});
  CHECK(kernel(sample(FreeField{1.0}, g)).evenness_defect() < 1e-12);
  CHECK(kernel(sample(k0k1_family(), g)).evenness_defect() < 1e-12);
  CHECK(kernel(sample(DriftFreeField{1.0, 0.4}, g)).evenness_defect() < 1e-12);
}

TEST_CASE("sigma branch") {
  auto g = build_grid({AxisSpec::line(8, 0.5), AxisSpec::line(8, 0.5)});
  const auto D = sample(FreeField{1.0}, g);
  const auto s = sigma_from_D(D);
  const auto& neg = g->momentum_negation();
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(s.values[i].imag() == 0.0);
    CHECK(s.values[i].real() > 0.0);
    CHECK(rel(s.values[i] * s.values[neg[i]], D.values[i]) < 1e-12);
  }

  ExplicitTable t;
  t.K.assign(g->size(), 1.0);
  t.L.assign(g->size(), 1.0);
  const auto one_plus_i = sigma_from_D(sample(t, g));
  CHECK(rel(one_plus_i.values[0] * one_plus_i.values[0], 1.0 + 1i) < 1e-15);
  CHECK(one_plus_i.values[0].real() > 0.0);

  const auto c = sample(k0k1_family(), g);
  const auto sc = sigma_from_D(c);
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(sc.values[i].real() > 0.0);
    CHECK(rel(sc.values[i] * sc.values[i], c.values[i]) < 1e-12);
  }
}

TEST_CASE("reflection covariance of sigma") {
  auto g = build_grid({AxisSpec::line(8, 0.5), AxisSpec::line(8, 0.5)});
  const auto s = sigma_from_D(sample(FreeField{1.0}, g));
  CHECK(reflection_covariance_defect(s, 0) == 0.0);
  CHECK(reflection_covariance_defect(s, 1) < 1e-12);

  CHECK(reflection_covariance_defect(sigma_from_D(sample(k0k1_family(), g)), 0) < 1e-12);
  CHECK(reflection_covariance_defect(sigma_from_D(sample(DriftFreeField{1.0, 0.5}, g)), 0) < 1e-12);

  ExplicitFunction even{[](std::span<const double> k) {
                          const double K = 1.0 / (k[0] * k[0] + k[1] * k[1] + 1.0);
                          return cplx(K, 0.3 * K);
                        },
                        "even"};
  CHECK(reflection_covariance_defect(sigma_from_D(sample(even, g)), 0) > 1e-3);
}

TEST_CASE("D bounds") {
  auto g = build_grid({AxisSpec::line(8, 0.5), AxisSpec::line(8, 0.5)});
  const auto b = estimate_bounds(sample(FreeField{1.0}, g), 1.0);
  CHECK(b.M1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.M2 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.M3 == 0.0);
  CHECK(b.bound_holds);

  ExplicitFunction half{[](std::span<const double> k) {
                          const double K = 1.0 / (k[0] * k[0] + k[1] * k[1] + 1.0);
                          return cplx(K, 0.5 * K);
                        },
                        "half"};
  const auto mh = sample(half, g);
  const auto bh = estimate_bounds(mh, 1.0);
  CHECK(bh.M3 == doctest::Approx(0.5));
  CHECK(bh.bound_holds);
  // constant L/K at its maximum: the bound is attained everywhere
  double slack = 1.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto k = g->momentum(i);
    const double c = 1.0 / (k[0] * k[0] + k[1] * k[1] + 1.0);
    slack = std::min(slack, 1.0 - std::abs(mh.values[i]) / (std::sqrt(1.25) * c));
  }
  CHECK(std::abs(slack) < 1e-12);

  // varying L/K: strict at every momentum where |L/K| < M3
  const auto mc = sample(k0k1_family(), g);
  const auto bc = estimate_bounds(mc, 1.0);
  CHECK(bc.bound_holds);
  const double c0 = std::sqrt(1 + bc.M3 * bc.M3) * bc.M2;
  const int zero[] = {4, 4};
  CHECK(std::abs(mc.values[g->index(zero)]) < c0 * (1.0 - 1e-3));
}

TEST_CASE("time-zero restriction") {
  std::mt19937_64 rng(5);
  auto g = build_grid({AxisSpec::line(64, 0.25), AxisSpec::line(8, 0.5)});
  const auto m = sample(FreeField{1.0}, g);
  const auto h = random_field(8, rng);
  const auto r = time_zero_norm(m, h, 1.0);
  CHECK(r.ratio <= 1.0 + 1e-10);
  CHECK(r.ratio > 0.9);

  const std::vector<cplx> zero(8);
  const auto z = time_zero_norm(m, zero, 1.0);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);

  // refining the time axis at fixed extent drives the ratio to 1
  double prev = 0.0;
  for (int n : {64, 128, 256, 512}) {
    auto gi = build_grid({AxisSpec::line(n, 16.0 / n), AxisSpec::line(8, 0.5)});
    const double ratio = time_zero_norm(sample(FreeField{1.0}, gi), h, 1.0).ratio;
    CHECK(ratio <= 1.0 + 1e-10);
    CHECK(ratio > prev);
    prev = ratio;
  }
  CHECK(prev > 0.98);

  auto one = build_grid({AxisSpec::line(8, 0.5)});
  CHECK_THROWS_AS(time_zero_norm(sample(FreeField{1.0}, one), h, 1.0), Error);
}

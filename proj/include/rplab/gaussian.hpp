#pragma once

#include <span>
#include <vector>

#include "rplab/multiplier.hpp"

namespace rplab {

/// S(f) = exp(-1/2 <conj f, D f>)
cplx characteristic(const CovarianceOperator& D, std::span<const cplx> f);

/// Two-point function S_2(x, y) = D(x - y) as a callable on site indices.
using TwoPoint = std::function<cplx(std::size_t, std::size_t)>;
TwoPoint two_point(const CovarianceOperator& D);

/// Gaussian recursion S_n = sum_j S_2(x_1, x_j) S_{n-2}(rest), memoized on point multisets.
cplx schwinger(const TwoPoint& s2, std::span<const std::size_t> points);
cplx schwinger(const CovarianceOperator& D, std::span<const std::size_t> points);

/// Sum over all perfect matchings of prod S_2(x_i, x_j). Throws OracleTooLarge for n > 12.
cplx pairing_oracle(const TwoPoint& s2, std::span<const std::size_t> points);
cplx pairing_oracle(const CovarianceOperator& D, std::span<const std::size_t> points);

/// <Phi(f)^n> = (n-1)!! <conj f, D f>^{n/2} for even n, 0 for odd n.
cplx moment(const CovarianceOperator& D, std::span<const cplx> f, int n);

/// sum_{n <= order} i^n / n! <Phi(f)^n>
cplx characteristic_series(const CovarianceOperator& D, std::span<const cplx> f, int order);

/// n-th moment read off the Taylor coefficient of lambda -> S(lambda f), computed by a
/// discrete Cauchy integral over a circle in the complex lambda plane.
cplx moment_from_characteristic(const CovarianceOperator& D, std::span<const cplx> f, int n, int nodes = 64);

}  // namespace rplab

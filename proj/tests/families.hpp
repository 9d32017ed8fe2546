#pragma once

#include <span>

#include "rplab/multiplier.hpp"

namespace testing_support {

/// K = (k^2+1)^{-1}, L = c k0 k1 (k^2+1)^{-2}: even and time-reflection covariant.
inline rplab::ExplicitFunction k0k1_family(double c = 0.3) {
  return {[c](std::span<const double> k) {
            double k2 = 0;
            for (double q : k) k2 += q * q;
            const double K = 1.0 / (k2 + 1.0);
            return rplab::cplx(K, c * k[0] * (k.size() > 1 ? k[1] : 0.0) * K * K);
          },
          "k0k1"};
}

/// K = (k^2+1)^{-1}, L = c k0 (k^2+1)^{-2}: odd, hence not a covariance.
inline rplab::ExplicitFunction k0_family(double c = 0.3) {
  return {[c](std::span<const double> k) {
            double k2 = 0;
            for (double q : k) k2 += q * q;
            const double K = 1.0 / (k2 + 1.0);
            return rplab::cplx(K, c * k[0] * K * K);
          },
          "k0"};
}

}  // namespace testing_support

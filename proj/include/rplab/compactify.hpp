#pragma once

#include <vector>

#include "rplab/multiplier.hpp"
#include "rplab/rp_check.hpp"

namespace rplab {

struct PeriodizationResult {
  CovarianceOperator D_c;
  std::size_t axis = 0;
  double period = 0.0;
  int images_used = 1;  // 2 n + 1
  double truncation_residual = 0.0;
  /// Residual after each added image pair.
  std::vector<double> residual_history;
  /// Empirical exponential decay rate of the kernel along the axis.
  double decay_rate = 0.0;
};

/// D_c(x) = sum_n D(x + n period e_axis). The axis must be a Line whose window covers at
/// least three periods; period / spacing must be an even integer.
PeriodizationResult periodize(const CovarianceOperator& D, std::size_t axis, double period, double tol = 1e-12);

struct CompactificationRP {
  RPReport before;
  RPReport after;
  double covariance_defect_before = 0.0;
  double covariance_defect_after = 0.0;
  Verdict verdict = Verdict::NotApplicable;
};

/// DoublyRP(checked_axis) on D and on D compactified along `compact_axis`.
CompactificationRP verify_compactification_rp(const CovarianceOperator& D, std::size_t compact_axis, double period,
                                               std::size_t checked_axis, double tol = 1e-10,
                                               double image_tol = 1e-12);

}  // namespace rplab

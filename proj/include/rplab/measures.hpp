#pragma once

#include <span>
#include <vector>

#include "rplab/multiplier.hpp"

namespace rplab {

/// Diagnostics of lambda = L/K for a commuting pair K > 0, L real.
struct YngvasonReport {
  std::vector<double> lambda;            // per mode, input order
  std::vector<std::size_t> order;        // modes by |lambda| descending
  std::vector<double> z_partial;         // running (prod (1 + lambda^2))^{1/2} along `order`
  std::vector<double> log_z_partial;
  double hs_norm_sq = 0.0;               // sum lambda^2
  double log_z = 0.0;
  double z_final = 1.0;                  // may overflow to inf; log_z stays finite
  cplx det_sqrt{1.0, 0.0};               // det(I - i Lambda)^{1/2}, principal branch of the summed logs
  bool spectrum_even = true;             // {lambda} = {-lambda}
  bool divergence_flag = false;          // set by a refinement sweep
};

YngvasonReport yngvason(std::span<const double> K, std::span<const double> L);
/// K = Re D, L = Im D on the momentum grid.
YngvasonReport yngvason(const FourierMultiplier& D);

struct MeasureDecomposition {
  std::vector<double> G;  // (K^2 + L^2) / K
  std::vector<double> Y;  // L / (K^2 + L^2)
  double z = 1.0;
  double log_z = 0.0;
  double identity_defect = 0.0;  // max |1/D - (1/G - iY)| / |1/D|
};

MeasureDecomposition decompose(std::span<const double> K, std::span<const double> L);
MeasureDecomposition decompose(const FourierMultiplier& D);

struct RefinementSweep {
  std::vector<std::size_t> modes;
  std::vector<double> hs_norm_sq;
  std::vector<double> log_z;
  double slope = 0.0;  // least-squares slope of log hs_norm_sq against log modes
  bool divergence_flag = false;  // slope > 0.5
};

/// Trend of the diagnostics over reports computed on successively larger grids.
/// Sets divergence_flag on the reports as well.
RefinementSweep refinement_sweep(std::vector<YngvasonReport>& reports);

}  // namespace rplab

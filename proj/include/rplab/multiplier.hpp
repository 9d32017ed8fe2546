#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rplab/grid.hpp"

namespace rplab {

/// Symbol evaluated at a momentum vector with one component per axis.
using SymbolFn = std::function<cplx(std::span<const double>)>;

/// D(k) = (k^2 + m^2)^{-1}
struct FreeField {
  double mass = 1.0;
};
/// Same with k_j replaced by (2/a_j) sin(k_j a_j / 2).
struct LatticeFreeField {
  double mass = 1.0;
};
/// D(k) = (k^2 + m^2)^{-p}; not reflection positive for p > 1.
struct PowerCovariance {
  double mass = 1.0;
  double power = 1.0;
};
/// Complex reflection-positive family. With w(q) = sqrt(qhat^2 + m^2) + b sin(q_1 a_1)/a_1,
/// w1 = w(kbar), w2 = w(-kbar):
///   D(k) = 1/(2 w1 (w1 - i k0)) + 1/(2 w2 (w2 + i k0)).
/// Requires |b| < 1. Its OS energy at spatial momentum kbar is w1.
struct DriftFreeField {
  double mass = 1.0;
  double drift = 0.0;
};
struct Constant {
  cplx value{1.0, 0.0};
};
/// K and L per native momentum index (row-major, index m + N/2 per axis).
struct ExplicitTable {
  std::vector<double> K;
  std::vector<double> L;
};
/// Closed-form symbol; sampled band-limited.
struct ExplicitFunction {
  SymbolFn symbol;
  std::string label = "explicit";
};

using MultiplierSpec =
    std::variant<FreeField, LatticeFreeField, PowerCovariance, DriftFreeField, Constant, ExplicitTable, ExplicitFunction>;

std::string describe(const MultiplierSpec& spec);
/// Mass of the reference operator (k^2+m^2)^{-1} naturally attached to a spec, if any.
std::optional<double> reference_mass(const MultiplierSpec& spec);

struct MultiplierFlags {
  bool symmetric = false;    // D(k) = D(-k)
  bool real_kernel = false;  // D(-k) = conj D(k)
  bool hermitian = false;    // D(k) real
};

/// A translation-invariant operator given by its symbol on the momentum grid.
/// `values` holds the symbol D(k); `lattice` (may be empty) evaluates the symbol
/// used to synthesize position-space kernels on refined momentum grids.
struct FourierMultiplier {
  GridPtr grid;
  std::vector<cplx> values;
  SymbolFn lattice;
  MultiplierFlags flags;
  std::string provenance;

  FourierMultiplier transposed() const;
  FourierMultiplier conjugated() const;
  FourierMultiplier adjoint() const;
};

MultiplierFlags compute_flags(const SpacetimeGrid& grid, std::span<const cplx> values, double tol = 1e-12);

/// Builds a multiplier from explicit values and an optional kernel evaluator.
FourierMultiplier make_multiplier(GridPtr grid, std::vector<cplx> values, SymbolFn lattice, std::string provenance);

FourierMultiplier sample(const MultiplierSpec& spec, GridPtr grid);

/// Field kernel: sigma = K^{1/2} * sqrt(1 + i L/K), principal branch.
FourierMultiplier sigma_from_D(const FourierMultiplier& mult);

/// max_k |conj(sigma(-pi_j k)) - sigma(k)|.
double reflection_covariance_defect(const FourierMultiplier& sigma, std::size_t axis);

struct BoundEstimates {
  double M1 = 0.0;
  double M2 = 0.0;
  double M3 = 0.0;
  double m_ref = 0.0;
  bool bound_holds = false;
  /// Momentum index where the bound or a ratio failed.
  std::optional<std::size_t> offending_index;
  std::vector<double> offending_momentum;
};

BoundEstimates estimate_bounds(const FourierMultiplier& mult, double m_ref);

struct TimeZeroNorm {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs, or 0 when both vanish
};

/// <delta x h, |D| delta x h> against (1+M3^2)^{1/2} M2 ||h||^2_{-1/2}. `h` lives on grid.spatial().
TimeZeroNorm time_zero_norm(const FourierMultiplier& mult, std::span<const cplx> h, double m_ref);

/// Dense translation-invariant kernel on lattice L2. The table stores the kernel
/// density K(d) for site differences d: Line axes cover d in [-(N-1), N-1], Circle
/// axes d in [0, N) with wrap. The operator is (Df)(x) = vol * sum_y K(x - y) f(y).
class CovarianceOperator {
 public:
  CovarianceOperator(GridPtr grid, std::vector<cplx> table, std::string provenance, double residual = 0.0);

  const GridPtr& grid() const noexcept { return grid_; }
  const std::vector<cplx>& table() const noexcept { return table_; }
  const std::vector<std::size_t>& table_shape() const noexcept { return shape_; }
  const std::string& provenance() const noexcept { return provenance_; }
  double synthesis_residual() const noexcept { return residual_; }

  /// Kernel density at a difference given in lattice steps per axis.
  cplx kernel(std::span<const int> diff) const;
  /// Kernel density K(x - y) between two sites.
  cplx entry(std::size_t x, std::size_t y) const;
  /// Full operator matrix vol * K(x - y).
  Eigen::MatrixXcd matrix() const;

  std::vector<cplx> apply(std::span<const cplx> f) const;
  /// sum_xy f(x) D(x,y) g(y) * vol
  cplx bilinear(std::span<const cplx> f, std::span<const cplx> g) const;
  /// <f, D g> = sum_xy conj f(x) D(x,y) g(y) * vol
  cplx sesquilinear(std::span<const cplx> f, std::span<const cplx> g) const;

  CovarianceOperator transposed() const;
  CovarianceOperator conjugated() const;
  CovarianceOperator adjoint() const { return transposed().conjugated(); }

  /// max |K(d) - K(-d)| / max |K|
  double evenness_defect() const;

 private:
  std::size_t table_index(std::size_t x, std::size_t y) const;
  const Eigen::MatrixXcd* dense() const;

  struct DenseCache {
    std::once_flag once;
    Eigen::MatrixXcd matrix;
  };

  GridPtr grid_;
  std::vector<cplx> table_;
  std::vector<std::size_t> shape_;
  std::vector<std::size_t> strides_;
  std::string provenance_;
  double residual_ = 0.0;
  std::shared_ptr<DenseCache> dense_ = std::make_shared<DenseCache>();
};

/// Kernel of any multiplier, symmetric or not.
CovarianceOperator assemble_kernel(const FourierMultiplier& mult);
/// Kernel of a covariance; throws NotACovariance unless the multiplier is symmetric.
CovarianceOperator kernel(const FourierMultiplier& mult);

/// Lattice kernel K(n a) for n in [-(N-1), N-1] of a one-dimensional symbol on an axis.
/// Line axes are synthesized on a refined momentum grid.
std::vector<cplx> kernel_1d(const AxisSpec& axis, const std::function<cplx(double)>& symbol);

}  // namespace rplab

#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace rplab {

using cplx = std::complex<double>;

enum class AxisKind { Line, Circle };

/// One factor X_j of the spacetime. Sites sit at x_n = (n + 1/2) a - extent/2,
/// so no site lies on the reflection hyperplane x_j = 0.
struct AxisSpec {
  AxisKind kind = AxisKind::Line;
  int sites = 0;
  double spacing = 0.0;  // Line only; Circle derives it from length
  double length = 0.0;   // Circle only

  static AxisSpec line(int sites, double spacing) { return {AxisKind::Line, sites, spacing, 0.0}; }
  static AxisSpec circle(int sites, double length) { return {AxisKind::Circle, sites, 0.0, length}; }

  double step() const noexcept { return kind == AxisKind::Circle ? length / sites : spacing; }
  double extent() const noexcept { return sites * step(); }
  double coordinate(int n) const noexcept { return (n + 0.5) * step() - 0.5 * extent(); }
  /// k_m = 2 pi m / extent for m in [-N/2, N/2); `i` indexes that range from 0.
  double momentum(int i) const noexcept;
};

/// A site permutation or partial shift. target[i] == npos means the site is dropped.
struct SiteMap {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> target;
  bool unitary = true;

  /// (T f)(target[i]) = f(i); dropped sites leave zeros.
  std::vector<cplx> apply(std::span<const cplx> f) const;
};

class SpacetimeGrid {
 public:
  explicit SpacetimeGrid(std::vector<AxisSpec> axes);

  std::size_t dim() const noexcept { return axes_.size(); }
  std::size_t size() const noexcept { return total_; }
  const AxisSpec& axis(std::size_t j) const { return axes_.at(j); }
  const std::vector<AxisSpec>& axes() const noexcept { return axes_; }
  int extent(std::size_t j) const { return axes_.at(j).sites; }
  std::size_t stride(std::size_t j) const { return strides_.at(j); }
  double cell_volume() const noexcept { return volume_; }

  /// Row-major: axis 0 (time) varies slowest.
  std::size_t index(std::span<const int> n) const;
  std::vector<int> unravel(std::size_t site) const;
  int component(std::size_t site, std::size_t j) const {
    return static_cast<int>((site / strides_[j]) % static_cast<std::size_t>(axes_[j].sites));
  }
  double coordinate(std::size_t site, std::size_t j) const;
  std::vector<double> momentum(std::size_t momentum_index) const;

  const std::vector<std::size_t>& reflection(std::size_t j) const { return reflections_.at(j); }
  /// Site index of the momentum -k (the Nyquist row maps to itself).
  const std::vector<std::size_t>& momentum_negation() const noexcept { return negation_; }
  /// Index of -pi_j k: every momentum component negated except component j.
  std::vector<std::size_t> momentum_reflection_partner(std::size_t j) const;

  /// Mask of sites with x_j > 0 (sign > 0) or x_j < 0 (sign < 0).
  std::vector<char> halfspace(std::size_t j, int sign) const;
  std::vector<std::size_t> halfspace_sites(std::size_t j, int sign) const;

  SiteMap translate(std::size_t j, int steps) const;

  /// The spatial sub-grid (axes 1..d-1); throws NoSpatialAxis for d = 1.
  SpacetimeGrid spatial() const;

  bool same_shape(const SpacetimeGrid& other) const;

 private:
  std::vector<AxisSpec> axes_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 0;
  double volume_ = 1.0;
  std::vector<std::vector<std::size_t>> reflections_;
  std::vector<std::size_t> negation_;
};

using GridPtr = std::shared_ptr<const SpacetimeGrid>;

inline GridPtr build_grid(std::vector<AxisSpec> axes) {
  return std::make_shared<const SpacetimeGrid>(std::move(axes));
}

struct LatticeField {
  GridPtr grid;
  std::vector<cplx> values;

  static LatticeField zeros(GridPtr g) {
    LatticeField f{g, {}};
    f.values.assign(g->size(), cplx{});
    return f;
  }
};

/// Unitary DFT: F(k) = N^{-1/2} sum_x f(x) exp(-i k.x), taken axis by axis.
std::vector<cplx> dft(const SpacetimeGrid& grid, std::span<const cplx> field);
std::vector<cplx> idft(const SpacetimeGrid& grid, std::span<const cplx> spectrum);

inline LatticeField dft(const LatticeField& f) { return {f.grid, dft(*f.grid, f.values)}; }
inline LatticeField idft(const LatticeField& f) { return {f.grid, idft(*f.grid, f.values)}; }

}  // namespace rplab

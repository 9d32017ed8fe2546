#include "rplab/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "detail/axis_transform.hpp"
#include "rplab/error.hpp"

namespace rplab {

double AxisSpec::momentum(int i) const noexcept {
  return 2.0 * std::numbers::pi * (i - sites / 2) / extent();
}

std::vector<cplx> SiteMap::apply(std::span<const cplx> f) const {
  std::vector<cplx> out(f.size());
  for (std::size_t i = 0; i < target.size(); ++i)
    if (target[i] != npos) out[target[i]] = f[i];
  return out;
}

SpacetimeGrid::SpacetimeGrid(std::vector<AxisSpec> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw Error(ErrorCode::InvalidGrid, "grid needs at least one axis");
  for (std::size_t j = 0; j < axes_.size(); ++j) {
    const auto& ax = axes_[j];
    const std::string where = "axis " + std::to_string(j);
    if (ax.sites <= 0 || ax.sites % 2 != 0)
      throw Error(ErrorCode::InvalidGrid, where + ": site count must be a positive even integer");
    if (ax.kind == AxisKind::Line && !(ax.spacing > 0.0 && std::isfinite(ax.spacing)))
      throw Error(ErrorCode::InvalidGrid, where + ": spacing must be positive");
    if (ax.kind == AxisKind::Circle && !(ax.length > 0.0 && std::isfinite(ax.length)))
      throw Error(ErrorCode::InvalidGrid, where + ": circle length must be positive");
  }

  strides_.assign(axes_.size(), 1);
  for (std::size_t j = axes_.size() - 1; j > 0; --j)
    strides_[j - 1] = strides_[j] * static_cast<std::size_t>(axes_[j].sites);
  total_ = strides_[0] * static_cast<std::size_t>(axes_[0].sites);
  for (const auto& ax : axes_) volume_ *= ax.step();

  reflections_.resize(axes_.size());
  for (std::size_t j = 0; j < axes_.size(); ++j) {
    auto& perm = reflections_[j];
    perm.resize(total_);
    const int n_j = axes_[j].sites;
    for (std::size_t s = 0; s < total_; ++s) {
      const int c = component(s, j);
      perm[s] = s + (static_cast<std::size_t>(n_j - 1 - c) - static_cast<std::size_t>(c)) * strides_[j];
    }
  }

  negation_.resize(total_);
  for (std::size_t s = 0; s < total_; ++s) {
    std::size_t t = 0;
    for (std::size_t j = 0; j < axes_.size(); ++j) {
      const int n_j = axes_[j].sites;
      t += static_cast<std::size_t>((n_j - component(s, j)) % n_j) * strides_[j];
    }
    negation_[s] = t;
  }
}

std::size_t SpacetimeGrid::index(std::span<const int> n) const {
  if (n.size() != axes_.size()) throw Error(ErrorCode::InvalidArgument, "index rank mismatch");
  std::size_t s = 0;
  for (std::size_t j = 0; j < n.size(); ++j) {
    if (n[j] < 0 || n[j] >= axes_[j].sites) throw Error(ErrorCode::InvalidArgument, "site index out of range");
    s += static_cast<std::size_t>(n[j]) * strides_[j];
  }
  return s;
}

std::vector<int> SpacetimeGrid::unravel(std::size_t site) const {
  std::vector<int> n(axes_.size());
  for (std::size_t j = 0; j < axes_.size(); ++j) n[j] = component(site, j);
  return n;
}

double SpacetimeGrid::coordinate(std::size_t site, std::size_t j) const {
  return axes_.at(j).coordinate(component(site, j));
}

std::vector<double> SpacetimeGrid::momentum(std::size_t momentum_index) const {
  std::vector<double> k(axes_.size());
  for (std::size_t j = 0; j < axes_.size(); ++j) k[j] = axes_[j].momentum(component(momentum_index, j));
  return k;
}

std::vector<std::size_t> SpacetimeGrid::momentum_reflection_partner(std::size_t j) const {
  if (j >= axes_.size()) throw Error(ErrorCode::InvalidArgument, "axis out of range");
  std::vector<std::size_t> out(total_);
  for (std::size_t s = 0; s < total_; ++s) {
    std::size_t t = 0;
    for (std::size_t a = 0; a < axes_.size(); ++a) {
      const int n_a = axes_[a].sites;
      const int c = component(s, a);
      t += static_cast<std::size_t>(a == j ? c : (n_a - c) % n_a) * strides_[a];
    }
    out[s] = t;
  }
  return out;
}

std::vector<char> SpacetimeGrid::halfspace(std::size_t j, int sign) const {
  if (j >= axes_.size()) throw Error(ErrorCode::InvalidArgument, "axis out of range");
  std::vector<char> mask(total_);
  const int half = axes_[j].sites / 2;
  for (std::size_t s = 0; s < total_; ++s) {
    const bool positive = component(s, j) >= half;
    mask[s] = static_cast<char>(sign > 0 ? positive : !positive);
  }
  return mask;
}

std::vector<std::size_t> SpacetimeGrid::halfspace_sites(std::size_t j, int sign) const {
  const auto mask = halfspace(j, sign);
  std::vector<std::size_t> sites;
  sites.reserve(total_ / 2);
  for (std::size_t s = 0; s < total_; ++s)
    if (mask[s]) sites.push_back(s);
  return sites;
}

SiteMap SpacetimeGrid::translate(std::size_t j, int steps) const {
  if (j >= axes_.size()) throw Error(ErrorCode::InvalidArgument, "axis out of range");
  const auto& ax = axes_[j];
  SiteMap map;
  map.target.resize(total_);
  map.unitary = ax.kind == AxisKind::Circle || steps == 0;
  for (std::size_t s = 0; s < total_; ++s) {
    const int c = component(s, j);
    int dest = c + steps;
    if (ax.kind == AxisKind::Circle) {
      dest %= ax.sites;
      if (dest < 0) dest += ax.sites;
    } else if (dest < 0 || dest >= ax.sites) {
      map.target[s] = SiteMap::npos;
      continue;
    }
    map.target[s] = s + static_cast<std::size_t>(dest) * strides_[j] - static_cast<std::size_t>(c) * strides_[j];
  }
  return map;
}

SpacetimeGrid SpacetimeGrid::spatial() const {
  if (axes_.size() < 2) throw Error(ErrorCode::NoSpatialAxis, "grid has no spatial axis");
  return SpacetimeGrid(std::vector<AxisSpec>(axes_.begin() + 1, axes_.end()));
}

bool SpacetimeGrid::same_shape(const SpacetimeGrid& other) const {
  if (axes_.size() != other.axes_.size()) return false;
  for (std::size_t j = 0; j < axes_.size(); ++j) {
    const auto& a = axes_[j];
    const auto& b = other.axes_[j];
    if (a.kind != b.kind || a.sites != b.sites || std::abs(a.step() - b.step()) > 1e-12 * a.step()) return false;
  }
  return true;
}

namespace {

std::vector<cplx> transform(const SpacetimeGrid& grid, std::span<const cplx> in, double sign) {
  if (in.size() != grid.size()) throw Error(ErrorCode::InvalidArgument, "field size does not match grid");
  std::vector<cplx> data(in.begin(), in.end());
  std::vector<std::size_t> shape;
  for (const auto& ax : grid.axes()) shape.push_back(static_cast<std::size_t>(ax.sites));
  for (std::size_t j = 0; j < grid.dim(); ++j) {
    const auto& ax = grid.axis(j);
    const auto n = static_cast<std::size_t>(ax.sites);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<cplx> w(n * n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        // forward: rows are momenta, columns sites; inverse swaps roles
        const double k = ax.momentum(static_cast<int>(sign < 0 ? r : c));
        const double x = ax.coordinate(static_cast<int>(sign < 0 ? c : r));
        w[r * n + c] = std::polar(norm, sign * k * x);
      }
    data = detail::transform_axis(data, shape, j, w, n);
  }
  return data;
}

}  // namespace

std::vector<cplx> dft(const SpacetimeGrid& grid, std::span<const cplx> field) { return transform(grid, field, -1.0); }

std::vector<cplx> idft(const SpacetimeGrid& grid, std::span<const cplx> spectrum) {
  return transform(grid, spectrum, +1.0);
}

}  // namespace rplab

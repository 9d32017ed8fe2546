#include <algorithm>
#include <cmath>
#include <numbers>

#include "detail/axis_transform.hpp"
#include "detail/symbols.hpp"
#include "rplab/error.hpp"
#include "rplab/multiplier.hpp"

namespace rplab {

namespace {

constexpr std::size_t max_padded_total = std::size_t{1} << 21;
constexpr std::size_t max_padded_axis = std::size_t{1} << 16;
constexpr double synthesis_tol = 1e-15;
// below this a residual that no longer halves is roundoff
constexpr double roundoff_floor = 1e-13;
// entries this far below the kernel maximum are summation noise
constexpr double noise_floor = 1e-14;
// operators up to this many sites keep a dense copy for repeated application
constexpr std::size_t dense_sites = 4096;

void chop(std::vector<cplx>& t) {
  double scale = 0.0;
  for (const auto& v : t) scale = std::max(scale, std::abs(v));
  const double floor = noise_floor * scale;
  for (auto& v : t) {
    if (std::abs(v.real()) < floor) v.real(0.0);
    if (std::abs(v.imag()) < floor) v.imag(0.0);
  }
}

std::size_t table_extent(const AxisSpec& ax) {
  return ax.kind == AxisKind::Line ? static_cast<std::size_t>(2 * ax.sites - 1) : static_cast<std::size_t>(ax.sites);
}

double padded_momentum(std::size_t m, std::size_t M, double a) {
  return 2.0 * std::numbers::pi * (static_cast<double>(m) - static_cast<double>(M / 2)) / (static_cast<double>(M) * a);
}

/// Kernel table from symbol samples on an M_0 x ... x M_{d-1} momentum grid.
std::vector<cplx> transform_table(const std::vector<AxisSpec>& axes, std::vector<cplx> data,
                                  const std::vector<std::size_t>& M) {
  std::vector<std::size_t> shape = M;
  for (std::size_t j = 0; j < axes.size(); ++j) {
    const auto& ax = axes[j];
    const double a = ax.step();
    const std::size_t rows = table_extent(ax);
    const int offset = ax.kind == AxisKind::Line ? ax.sites - 1 : 0;
    std::vector<cplx> w(rows * M[j]);
    const double norm = 1.0 / (static_cast<double>(M[j]) * a);
    for (std::size_t r = 0; r < rows; ++r) {
      const double d = (static_cast<int>(r) - offset) * a;
      for (std::size_t c = 0; c < M[j]; ++c) w[r * M[j] + c] = std::polar(norm, padded_momentum(c, M[j], a) * d);
    }
    data = detail::transform_axis(data, shape, j, w, rows);
  }
  return data;
}

std::vector<cplx> sample_padded(const std::vector<AxisSpec>& axes, const SymbolFn& f,
                                const std::vector<std::size_t>& M) {
  std::size_t total = 1;
  for (auto m : M) total *= m;
  std::vector<cplx> out(total);
  std::vector<double> k(axes.size());
  std::vector<std::size_t> idx(axes.size(), 0);
  std::vector<char> edge(axes.size());
  for (std::size_t s = 0; s < total; ++s) {
    for (std::size_t j = 0; j < axes.size(); ++j) {
      k[j] = padded_momentum(idx[j], M[j], axes[j].step());
      edge[j] = idx[j] == 0;
    }
    out[s] = detail::zone_edge_average(f, k, edge);
    for (std::size_t j = axes.size(); j-- > 0;) {
      if (++idx[j] < M[j]) break;
      idx[j] = 0;
    }
  }
  return out;
}

struct Synthesis {
  std::vector<cplx> table;
  double residual = 0.0;
};

Synthesis synthesize(const std::vector<AxisSpec>& axes, const SymbolFn& lattice, std::span<const cplx> native) {
  std::vector<std::size_t> M;
  for (const auto& ax : axes) M.push_back(static_cast<std::size_t>(ax.sites));
  if (!lattice) return {transform_table(axes, std::vector<cplx>(native.begin(), native.end()), M), 0.0};

  bool has_line = false;
  for (std::size_t j = 0; j < axes.size(); ++j)
    if (axes[j].kind == AxisKind::Line) {
      M[j] *= 2;
      has_line = true;
    }
  auto run = [&](const std::vector<std::size_t>& m) { return transform_table(axes, sample_padded(axes, lattice, m), m); };
  Synthesis out{run(M), 0.0};
  if (!has_line) return out;

  out.residual = 1.0;
  for (;;) {
    auto next = M;
    std::size_t total = 1;
    bool fits = true;
    for (std::size_t j = 0; j < axes.size(); ++j) {
      if (axes[j].kind == AxisKind::Line) next[j] *= 2;
      fits = fits && next[j] <= max_padded_axis;
      total *= next[j];
    }
    if (!fits || total > max_padded_total) break;
    auto cur = run(next);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      diff = std::max(diff, std::abs(cur[i] - out.table[i]));
      scale = std::max(scale, std::abs(cur[i]));
    }
    out.table = std::move(cur);
    const double previous = out.residual;
    out.residual = scale > 0.0 ? diff / scale : 0.0;
    M = next;
    if (out.residual <= synthesis_tol) break;
    if (out.residual < roundoff_floor && out.residual > 0.5 * previous) break;
  }
  return out;
}

}  // namespace

CovarianceOperator::CovarianceOperator(GridPtr grid, std::vector<cplx> table, std::string provenance, double residual)
    : grid_(std::move(grid)), table_(std::move(table)), provenance_(std::move(provenance)), residual_(residual) {
  if (!grid_) throw Error(ErrorCode::InvalidArgument, "missing grid");
  for (const auto& ax : grid_->axes()) shape_.push_back(table_extent(ax));
  strides_.assign(shape_.size(), 1);
  for (std::size_t j = shape_.size() - 1; j > 0; --j) strides_[j - 1] = strides_[j] * shape_[j];
  if (table_.size() != strides_[0] * shape_[0]) throw Error(ErrorCode::InvalidArgument, "kernel table size mismatch");
}

cplx CovarianceOperator::kernel(std::span<const int> diff) const {
  if (diff.size() != shape_.size()) throw Error(ErrorCode::InvalidArgument, "difference rank mismatch");
  std::size_t idx = 0;
  for (std::size_t j = 0; j < diff.size(); ++j) {
    const auto& ax = grid_->axis(j);
    int d = diff[j];
    if (ax.kind == AxisKind::Line) {
      if (d <= -ax.sites || d >= ax.sites) throw Error(ErrorCode::InvalidArgument, "difference outside the window");
      d += ax.sites - 1;
    } else {
      d = ((d % ax.sites) + ax.sites) % ax.sites;
    }
    idx += static_cast<std::size_t>(d) * strides_[j];
  }
  return table_[idx];
}

std::size_t CovarianceOperator::table_index(std::size_t x, std::size_t y) const {
  std::size_t idx = 0;
  for (std::size_t j = 0; j < shape_.size(); ++j) {
    const auto& ax = grid_->axis(j);
    int d = grid_->component(x, j) - grid_->component(y, j);
    d = ax.kind == AxisKind::Line ? d + ax.sites - 1 : (d + ax.sites) % ax.sites;
    idx += static_cast<std::size_t>(d) * strides_[j];
  }
  return idx;
}

cplx CovarianceOperator::entry(std::size_t x, std::size_t y) const { return table_[table_index(x, y)]; }

Eigen::MatrixXcd CovarianceOperator::matrix() const {
  const auto n = static_cast<Eigen::Index>(grid_->size());
  const double vol = grid_->cell_volume();
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < n; ++y) m(x, y) = vol * entry(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
  return m;
}

const Eigen::MatrixXcd* CovarianceOperator::dense() const {
  if (grid_->size() > dense_sites) return nullptr;
  std::call_once(dense_->once, [this] { dense_->matrix = matrix(); });
  return &dense_->matrix;
}

std::vector<cplx> CovarianceOperator::apply(std::span<const cplx> f) const {
  const std::size_t n = grid_->size();
  if (f.size() != n) throw Error(ErrorCode::InvalidArgument, "field size does not match grid");
  if (const auto* m = dense()) {
    std::vector<cplx> out(n);
    Eigen::Map<Eigen::VectorXcd>(out.data(), static_cast<Eigen::Index>(n)) =
        *m * Eigen::Map<const Eigen::VectorXcd>(f.data(), static_cast<Eigen::Index>(n));
    return out;
  }
  const double vol = grid_->cell_volume();
  std::vector<cplx> out(n);
  for (std::size_t x = 0; x < n; ++x) {
    cplx acc{};
    for (std::size_t y = 0; y < n; ++y)
      if (f[y] != cplx{}) acc += entry(x, y) * f[y];
    out[x] = vol * acc;
  }
  return out;
}

cplx CovarianceOperator::bilinear(std::span<const cplx> f, std::span<const cplx> g) const {
  const auto dg = apply(g);
  cplx acc{};
  for (std::size_t x = 0; x < dg.size(); ++x) acc += f[x] * dg[x];
  return grid_->cell_volume() * acc;
}

cplx CovarianceOperator::sesquilinear(std::span<const cplx> f, std::span<const cplx> g) const {
  const auto dg = apply(g);
  cplx acc{};
  for (std::size_t x = 0; x < dg.size(); ++x) acc += std::conj(f[x]) * dg[x];
  return grid_->cell_volume() * acc;
}

namespace {
/// Table index of -d for every table index d.
std::vector<std::size_t> negated_table_index(const SpacetimeGrid& g, const std::vector<std::size_t>& shape) {
  std::size_t total = 1;
  for (auto s : shape) total *= s;
  std::vector<std::size_t> out(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rest = i, idx = 0, stride = total;
    for (std::size_t j = 0; j < shape.size(); ++j) {
      stride /= shape[j];
      const std::size_t c = rest / stride;
      rest %= stride;
      const std::size_t neg = g.axis(j).kind == AxisKind::Line ? shape[j] - 1 - c : (shape[j] - c) % shape[j];
      idx += neg * stride;
    }
    out[i] = idx;
  }
  return out;
}
}  // namespace

CovarianceOperator CovarianceOperator::transposed() const {
  const auto neg = negated_table_index(*grid_, shape_);
  std::vector<cplx> t(table_.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = table_[neg[i]];
  return {grid_, std::move(t), provenance_ + "^T", residual_};
}

CovarianceOperator CovarianceOperator::conjugated() const {
  std::vector<cplx> t(table_.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::conj(table_[i]);
  return {grid_, std::move(t), "conj(" + provenance_ + ")", residual_};
}

double CovarianceOperator::evenness_defect() const {
  const auto neg = negated_table_index(*grid_, shape_);
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < table_.size(); ++i) {
    diff = std::max(diff, std::abs(table_[i] - table_[neg[i]]));
    scale = std::max(scale, std::abs(table_[i]));
  }
  return scale > 0.0 ? diff / scale : 0.0;
}

CovarianceOperator assemble_kernel(const FourierMultiplier& mult) {
  auto s = synthesize(mult.grid->axes(), mult.lattice, mult.values);
  chop(s.table);
  return {mult.grid, std::move(s.table), mult.provenance, s.residual};
}

CovarianceOperator kernel(const FourierMultiplier& mult) {
  if (!mult.flags.symmetric)
    throw Error(ErrorCode::NotACovariance, "multiplier is not symmetric under k -> -k: " + mult.provenance);
  return assemble_kernel(mult);
}

std::vector<cplx> kernel_1d(const AxisSpec& axis, const std::function<cplx(double)>& symbol) {
  const std::vector<AxisSpec> axes{axis};
  SymbolFn f = [&symbol](std::span<const double> k) { return symbol(k[0]); };
  auto t = synthesize(axes, f, {}).table;
  chop(t);
  return t;
}

}  // namespace rplab

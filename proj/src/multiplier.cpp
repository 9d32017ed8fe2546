#include "rplab/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "detail/symbols.hpp"
#include "rplab/error.hpp"

namespace rplab {

namespace {

using namespace std::complex_literals;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double khat(double k, double a) { return 2.0 / a * std::sin(0.5 * k * a); }

void require_mass(double m) {
  if (!(m > 0.0 && std::isfinite(m))) throw Error(ErrorCode::InvalidArgument, "mass must be positive");
}

std::vector<double> spacings(const SpacetimeGrid& g) {
  std::vector<double> a;
  for (const auto& ax : g.axes()) a.push_back(ax.step());
  return a;
}

double spatial_sq(std::span<const double> k) {
  double s = 0.0;
  for (std::size_t j = 1; j < k.size(); ++j) s += k[j] * k[j];
  return s;
}

double lattice_sq(std::span<const double> k, const std::vector<double>& a, std::size_t from) {
  double s = 0.0;
  for (std::size_t j = from; j < k.size(); ++j) {
    const double q = khat(k[j], a[j]);
    s += q * q;
  }
  return s;
}

struct Symbols {
  SymbolFn raw;
  SymbolFn lattice;
};

/// Drift energies (w1, w2) at a momentum.
std::pair<double, double> drift_energies(std::span<const double> k, const std::vector<double>& a, double m, double b) {
  const double base = std::sqrt(lattice_sq(k, a, 1) + m * m);
  const double shift = k.size() > 1 ? b * std::sin(k[1] * a[1]) / a[1] : 0.0;
  return {base + shift, base - shift};
}

Symbols symbols_for(const MultiplierSpec& spec, const SpacetimeGrid& grid) {
  const auto a = spacings(grid);
  return std::visit(
      overloaded{
          [&](const FreeField& s) -> Symbols {
            require_mass(s.mass);
            const double m2 = s.mass * s.mass;
            SymbolFn raw = [m2](std::span<const double> k) {
              return cplx(1.0 / (k[0] * k[0] + spatial_sq(k) + m2), 0.0);
            };
            SymbolFn lat = [m2, a0 = a[0]](std::span<const double> k) {
              return cplx(detail::alias_p1(k[0], std::sqrt(spatial_sq(k) + m2), a0), 0.0);
            };
            return {raw, lat};
          },
          [&](const LatticeFreeField& s) -> Symbols {
            require_mass(s.mass);
            const double m2 = s.mass * s.mass;
            SymbolFn f = [m2, a](std::span<const double> k) { return cplx(1.0 / (lattice_sq(k, a, 0) + m2), 0.0); };
            return {f, f};
          },
          [&](const PowerCovariance& s) -> Symbols {
            require_mass(s.mass);
            if (!(s.power > 0.0 && std::isfinite(s.power)))
              throw Error(ErrorCode::InvalidArgument, "power must be positive");
            const double m2 = s.mass * s.mass;
            const double p = s.power;
            SymbolFn raw = [m2, p](std::span<const double> k) {
              return cplx(std::pow(k[0] * k[0] + spatial_sq(k) + m2, -p), 0.0);
            };
            if (p <= 0.5) return {raw, raw};
            SymbolFn lat = [m2, p, a0 = a[0]](std::span<const double> k) {
              return cplx(detail::alias_power(k[0], std::sqrt(spatial_sq(k) + m2), a0, p), 0.0);
            };
            return {raw, lat};
          },
          [&](const DriftFreeField& s) -> Symbols {
            require_mass(s.mass);
            if (!(std::abs(s.drift) < 1.0)) throw Error(ErrorCode::InvalidArgument, "drift must satisfy |b| < 1");
            const double m = s.mass, b = s.drift;
            SymbolFn raw = [a, m, b](std::span<const double> k) {
              const auto [w1, w2] = drift_energies(k, a, m, b);
              return 1.0 / (2.0 * w1 * (w1 - 1i * k[0])) + 1.0 / (2.0 * w2 * (w2 + 1i * k[0]));
            };
            SymbolFn lat = [a, m, b](std::span<const double> k) {
              const auto [w1, w2] = drift_energies(k, a, m, b);
              return detail::alias_drift(k[0], w1, w2, a[0]);
            };
            return {raw, lat};
          },
          [&](const Constant& s) -> Symbols {
            SymbolFn f = [c = s.value](std::span<const double>) { return c; };
            return {f, f};
          },
          [&](const ExplicitTable&) -> Symbols { return {}; },
          [&](const ExplicitFunction& s) -> Symbols {
            if (!s.symbol) throw Error(ErrorCode::InvalidArgument, "explicit function is empty");
            return {s.symbol, s.symbol};
          },
      },
      spec);
}

/// Wraps an evaluator so it sees a transformed momentum.
SymbolFn remap(const SymbolFn& f, bool negate, bool conj) {
  if (!f) return {};
  return [f, negate, conj](std::span<const double> k) {
    cplx v;
    if (negate) {
      std::vector<double> q(k.begin(), k.end());
      for (auto& x : q) x = -x;
      v = f(q);
    } else {
      v = f(k);
    }
    return conj ? std::conj(v) : v;
  };
}

}  // namespace

std::string describe(const MultiplierSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const FreeField& s) { os << "free_field(m=" << s.mass << ")"; },
                 [&](const LatticeFreeField& s) { os << "lattice_free_field(m=" << s.mass << ")"; },
                 [&](const PowerCovariance& s) { os << "power(m=" << s.mass << ",p=" << s.power << ")"; },
                 [&](const DriftFreeField& s) { os << "drift(m=" << s.mass << ",b=" << s.drift << ")"; },
                 [&](const Constant& s) { os << "constant(" << s.value.real() << "," << s.value.imag() << ")"; },
                 [&](const ExplicitTable& s) { os << "table(" << s.K.size() << ")"; },
                 [&](const ExplicitFunction& s) { os << s.label; },
             },
             spec);
  return os.str();
}

std::optional<double> reference_mass(const MultiplierSpec& spec) {
  return std::visit(overloaded{
                        [](const FreeField& s) -> std::optional<double> { return s.mass; },
                        [](const LatticeFreeField& s) -> std::optional<double> { return s.mass; },
                        [](const PowerCovariance& s) -> std::optional<double> { return s.mass; },
                        [](const DriftFreeField& s) -> std::optional<double> { return s.mass; },
                        [](const auto&) -> std::optional<double> { return std::nullopt; },
                    },
                    spec);
}

MultiplierFlags compute_flags(const SpacetimeGrid& grid, std::span<const cplx> values, double tol) {
  double scale = 0.0;
  for (const auto& v : values) scale = std::max(scale, std::abs(v));
  const double eps = tol * std::max(scale, 1e-300);
  const auto& neg = grid.momentum_negation();
  MultiplierFlags f{true, true, true};
  for (std::size_t i = 0; i < values.size(); ++i) {
    const cplx v = values[i], w = values[neg[i]];
    if (std::abs(v - w) > eps) f.symmetric = false;
    if (std::abs(w - std::conj(v)) > eps) f.real_kernel = false;
    if (std::abs(v.imag()) > eps) f.hermitian = false;
  }
  return f;
}

FourierMultiplier make_multiplier(GridPtr grid, std::vector<cplx> values, SymbolFn lattice, std::string provenance) {
  if (!grid) throw Error(ErrorCode::InvalidArgument, "missing grid");
  if (values.size() != grid->size()) throw Error(ErrorCode::InvalidArgument, "multiplier size does not match grid");
  FourierMultiplier m{std::move(grid), std::move(values), std::move(lattice), {}, std::move(provenance)};
  m.flags = compute_flags(*m.grid, m.values);
  return m;
}

FourierMultiplier sample(const MultiplierSpec& spec, GridPtr grid) {
  if (!grid) throw Error(ErrorCode::InvalidArgument, "missing grid");
  const auto sym = symbols_for(spec, *grid);
  std::vector<cplx> values(grid->size());
  if (const auto* t = std::get_if<ExplicitTable>(&spec)) {
    if (t->K.size() != grid->size() || (!t->L.empty() && t->L.size() != grid->size()))
      throw Error(ErrorCode::InvalidArgument, "explicit table size does not match grid");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = {t->K[i], t->L.empty() ? 0.0 : t->L[i]};
  } else {
    std::vector<char> edge(grid->dim());
    for (std::size_t i = 0; i < values.size(); ++i) {
      auto k = grid->momentum(i);
      for (std::size_t j = 0; j < edge.size(); ++j) edge[j] = grid->component(i, j) == 0;
      values[i] = detail::zone_edge_average(sym.raw, k, edge);
    }
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
      throw Error(ErrorCode::InvalidArgument, "symbol is not finite at momentum index " + std::to_string(i));
    if (!(values[i].real() > 0.0))
      throw Error(ErrorCode::HermitianPartNotPositive,
                  "hermitian part is not positive at momentum index " + std::to_string(i));
  }
  return make_multiplier(std::move(grid), std::move(values), sym.lattice, describe(spec));
}

FourierMultiplier FourierMultiplier::transposed() const {
  const auto& neg = grid->momentum_negation();
  std::vector<cplx> v(values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values[neg[i]];
  return make_multiplier(grid, std::move(v), remap(lattice, true, false), provenance + "^T");
}

FourierMultiplier FourierMultiplier::conjugated() const {
  const auto& neg = grid->momentum_negation();
  std::vector<cplx> v(values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::conj(values[neg[i]]);
  return make_multiplier(grid, std::move(v), remap(lattice, true, true), "conj(" + provenance + ")");
}

FourierMultiplier FourierMultiplier::adjoint() const {
  std::vector<cplx> v(values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::conj(values[i]);
  return make_multiplier(grid, std::move(v), remap(lattice, false, true), provenance + "^*");
}

namespace {
cplx sqrt_branch(cplx d) {
  const double k = d.real();
  if (!(k > 0.0)) throw Error(ErrorCode::HermitianPartNotPositive, "square-root branch undefined");
  return std::sqrt(k) * std::sqrt(cplx(1.0, d.imag() / k));
}
}  // namespace

FourierMultiplier sigma_from_D(const FourierMultiplier& mult) {
  std::vector<cplx> v(mult.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = sqrt_branch(mult.values[i]);
  SymbolFn lat;
  if (mult.lattice) lat = [f = mult.lattice](std::span<const double> k) { return sqrt_branch(f(k)); };
  return make_multiplier(mult.grid, std::move(v), lat, "sigma(" + mult.provenance + ")");
}

double reflection_covariance_defect(const FourierMultiplier& sigma, std::size_t axis) {
  const auto partner = sigma.grid->momentum_reflection_partner(axis);
  double defect = 0.0;
  for (std::size_t i = 0; i < sigma.values.size(); ++i)
    defect = std::max(defect, std::abs(std::conj(sigma.values[partner[i]]) - sigma.values[i]));
  return defect;
}

BoundEstimates estimate_bounds(const FourierMultiplier& mult, double m_ref) {
  require_mass(m_ref);
  const auto& g = *mult.grid;
  BoundEstimates b;
  b.m_ref = m_ref;
  b.M1 = HUGE_VAL;
  b.M2 = 0.0;
  b.bound_holds = true;
  auto fail = [&](std::size_t i) {
    if (!b.offending_index) {
      b.offending_index = i;
      b.offending_momentum = g.momentum(i);
    }
    b.bound_holds = false;
  };
  std::vector<double> cref(mult.values.size());
  for (std::size_t i = 0; i < mult.values.size(); ++i) {
    const auto k = g.momentum(i);
    double k2 = 0.0;
    for (double q : k) k2 += q * q;
    cref[i] = 1.0 / (k2 + m_ref * m_ref);
    const double K = mult.values[i].real(), L = mult.values[i].imag();
    if (!(K > 0.0)) throw Error(ErrorCode::HermitianPartNotPositive, "hermitian part is not positive");
    const double r = K / cref[i];
    const double l = std::abs(L / K);
    if (!std::isfinite(r) || !std::isfinite(l)) {
      fail(i);
      continue;
    }
    b.M1 = std::min(b.M1, r);
    b.M2 = std::max(b.M2, r);
    b.M3 = std::max(b.M3, l);
  }
  const double c = std::sqrt(1.0 + b.M3 * b.M3) * b.M2;
  for (std::size_t i = 0; i < mult.values.size(); ++i)
    if (std::abs(mult.values[i]) > c * cref[i] * (1.0 + 1e-12)) fail(i);
  return b;
}

TimeZeroNorm time_zero_norm(const FourierMultiplier& mult, std::span<const cplx> h, double m_ref) {
  const auto& g = *mult.grid;
  const SpacetimeGrid spatial = g.spatial();
  if (h.size() != spatial.size()) throw Error(ErrorCode::InvalidArgument, "h does not live on the spatial grid");
  const auto bounds = estimate_bounds(mult, m_ref);
  const auto hk = dft(spatial, h);
  const int n0 = g.axis(0).sites;
  const double period = g.axis(0).extent();
  TimeZeroNorm out;
  double norm = 0.0;
  for (std::size_t s = 0; s < spatial.size(); ++s) {
    double absum = 0.0;
    for (int t = 0; t < n0; ++t) absum += std::abs(mult.values[static_cast<std::size_t>(t) * spatial.size() + s]);
    const double w = std::norm(hk[s]);
    out.lhs += w * absum / period;
    const auto kbar = spatial.momentum(s);
    double k2 = 0.0;
    for (double q : kbar) k2 += q * q;
    norm += w / (2.0 * std::sqrt(k2 + m_ref * m_ref));
  }
  out.rhs = std::sqrt(1.0 + bounds.M3 * bounds.M3) * bounds.M2 * norm;
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  return out;
}

}  // namespace rplab

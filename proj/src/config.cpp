#include <cmath>
#include <set>

#include "detail/config.hpp"
#include "rplab/error.hpp"

namespace rplab::detail {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ConfigError, path + ": " + what);
}

void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) fail(path + "." + k, "unknown field");
}

const json& need(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) fail(path + "." + key, "missing");
  return j.at(key);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) fail(path, "must be positive");
  return v;
}

double number_or(const json& j, const std::string& path, const char* key, double fallback) {
  return j.contains(key) ? number(j.at(key), path + "." + key) : fallback;
}

std::int64_t integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::size_t index(const json& j, const std::string& path) {
  const auto v = integer(j, path);
  if (v < 0) fail(path, "must be non-negative");
  return static_cast<std::size_t>(v);
}

std::vector<double> reals(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<CheckItem> parse_checks(const json& j, const std::string& path, double tol) {
  if (!j.is_array()) fail(path, "expected an array");
  std::vector<CheckItem> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const auto& c = j[i];
    if (c.is_string()) {
      out.push_back({c.get<std::string>(), tol});
    } else {
      allow_keys(c, p, {"id", "tol"});
      const auto& id = need(c, p, "id");
      if (!id.is_string()) fail(p + ".id", "expected a string");
      out.push_back({id.get<std::string>(), c.contains("tol") ? positive(c.at("tol"), p + ".tol") : tol});
    }
  }
  return out;
}

/// K = (k^2 + m^2)^{-1}, L = c k0 [k1] K^2
ExplicitFunction perturbed(double mass, double c, bool with_k1) {
  return {[mass, c, with_k1](std::span<const double> k) {
            double k2 = mass * mass;
            for (double q : k) k2 += q * q;
            const double K = 1.0 / k2;
            const double odd = with_k1 ? k[0] * (k.size() > 1 ? k[1] : 0.0) : k[0];
            return cplx(K, c * odd * K * K);
          },
          with_k1 ? "Perturbed(k0k1)" : "Perturbed(k0)"};
}

}  // namespace

std::vector<AxisSpec> parse_axes(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of axes");
  std::vector<AxisSpec> axes;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const auto& a = j[i];
    allow_keys(a, p, {"kind", "sites", "spacing", "length"});
    const auto& kind = need(a, p, "kind");
    const auto sites = integer(need(a, p, "sites"), p + ".sites");
    if (sites <= 0 || sites > (1 << 20)) fail(p + ".sites", "out of range");
    if (kind == "line") {
      if (a.contains("length")) fail(p + ".length", "not allowed on a line axis");
      axes.push_back(AxisSpec::line(static_cast<int>(sites), positive(need(a, p, "spacing"), p + ".spacing")));
    } else if (kind == "circle") {
      if (a.contains("spacing")) fail(p + ".spacing", "not allowed on a circle axis");
      axes.push_back(AxisSpec::circle(static_cast<int>(sites), positive(need(a, p, "length"), p + ".length")));
    } else {
      fail(p + ".kind", "expected \"line\" or \"circle\"");
    }
  }
  return axes;
}

MultiplierSpec parse_multiplier(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const auto& type = need(j, path, "type");
  if (!type.is_string()) fail(path + ".type", "expected a string");
  const auto t = type.get<std::string>();
  auto mass = [&] { return positive(need(j, path, "mass"), path + ".mass"); };
  if (t == "FreeField") {
    allow_keys(j, path, {"type", "mass"});
    return FreeField{mass()};
  }
  if (t == "LatticeFreeField") {
    allow_keys(j, path, {"type", "mass"});
    return LatticeFreeField{mass()};
  }
  if (t == "PowerCovariance") {
    allow_keys(j, path, {"type", "mass", "power"});
    return PowerCovariance{mass(), positive(need(j, path, "power"), path + ".power")};
  }
  if (t == "DriftFreeField") {
    allow_keys(j, path, {"type", "mass", "drift"});
    return DriftFreeField{mass(), number(need(j, path, "drift"), path + ".drift")};
  }
  if (t == "Constant") {
    allow_keys(j, path, {"type", "re", "im"});
    return Constant{cplx(number_or(j, path, "re", 1.0), number_or(j, path, "im", 0.0))};
  }
  if (t == "ExplicitTable") {
    allow_keys(j, path, {"type", "K", "L"});
    auto K = reals(need(j, path, "K"), path + ".K");
    auto L = j.contains("L") ? reals(j.at("L"), path + ".L") : std::vector<double>(K.size(), 0.0);
    if (L.size() != K.size()) fail(path + ".L", "length differs from K");
    return ExplicitTable{std::move(K), std::move(L)};
  }
  if (t == "Perturbed") {
    allow_keys(j, path, {"type", "mass", "c", "form"});
    const auto form = j.value("form", std::string("k0"));
    if (form != "k0" && form != "k0k1") fail(path + ".form", "expected \"k0\" or \"k0k1\"");
    return perturbed(mass(), number(need(j, path, "c"), path + ".c"), form == "k0k1");
  }
  fail(path + ".type", "unknown multiplier type '" + t + "'");
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  try {
    cfg.echo = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed JSON: ") + e.what());
  }
  const auto& j = cfg.echo;
  const std::string root = "config";
  allow_keys(j, root,
             {"grid", "multiplier", "seed", "tol", "checks", "charged", "schwinger", "quantize", "compactify", "yngvason"});
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (!s.is_number_unsigned()) fail("config.seed", "expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (j.contains("tol")) cfg.tol = positive(j.at("tol"), "config.tol");
  if (j.contains("grid")) {
    allow_keys(j.at("grid"), "config.grid", {"axes"});
    cfg.axes = parse_axes(need(j.at("grid"), "config.grid", "axes"), "config.grid.axes");
  }
  if (j.contains("multiplier")) cfg.multiplier = parse_multiplier(j.at("multiplier"), "config.multiplier");
  if (j.contains("checks")) cfg.checks = parse_checks(j.at("checks"), "config.checks", cfg.tol);

  const std::size_t dim = cfg.axes ? cfg.axes->size() : 0;
  auto axis_ref = [&](const json& v, const std::string& p) {
    const auto a = index(v, p);
    if (cfg.axes && a >= dim) fail(p, "axis " + std::to_string(a) + " does not exist");
    return a;
  };

  if (j.contains("charged")) {
    const auto& c = j.at("charged");
    allow_keys(c, "config.charged", {"plus", "minus", "checks"});
    cfg.charged = ChargedSection{parse_multiplier(need(c, "config.charged", "plus"), "config.charged.plus"),
                                 parse_multiplier(need(c, "config.charged", "minus"), "config.charged.minus"),
                                 {}};
    if (c.contains("checks")) cfg.charged->checks = parse_checks(c.at("checks"), "config.charged.checks", cfg.tol);
  }
  if (j.contains("schwinger")) {
    const auto& s = j.at("schwinger");
    allow_keys(s, "config.schwinger", {"tuples"});
    SchwingerSection sec;
    const auto& t = need(s, "config.schwinger", "tuples");
    if (!t.is_array()) fail("config.schwinger.tuples", "expected an array of site lists");
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::string p = "config.schwinger.tuples[" + std::to_string(i) + "]";
      if (!t[i].is_array()) fail(p, "expected an array of site indices");
      std::vector<std::size_t> pts;
      for (std::size_t k = 0; k < t[i].size(); ++k) pts.push_back(index(t[i][k], p + "[" + std::to_string(k) + "]"));
      sec.tuples.push_back(std::move(pts));
    }
    cfg.schwinger = std::move(sec);
  }
  if (j.contains("quantize")) {
    const auto& q = j.at("quantize");
    allow_keys(q, "config.quantize", {"slabs", "rank_tol", "mass"});
    QuantizeSection sec;
    if (q.contains("slabs")) sec.slabs = index(q.at("slabs"), "config.quantize.slabs");
    if (q.contains("rank_tol")) sec.rank_tol = positive(q.at("rank_tol"), "config.quantize.rank_tol");
    if (q.contains("mass")) sec.mass = positive(q.at("mass"), "config.quantize.mass");
    cfg.quantize = sec;
  }
  if (j.contains("compactify")) {
    const auto& c = j.at("compactify");
    const std::string p = "config.compactify";
    allow_keys(c, p, {"axis", "period", "tol", "check_axes"});
    CompactifySection sec;
    sec.axis = axis_ref(need(c, p, "axis"), p + ".axis");
    sec.period = positive(need(c, p, "period"), p + ".period");
    if (c.contains("tol")) sec.tol = positive(c.at("tol"), p + ".tol");
    if (c.contains("check_axes")) {
      const auto& a = c.at("check_axes");
      if (!a.is_array()) fail(p + ".check_axes", "expected an array");
      for (std::size_t i = 0; i < a.size(); ++i)
        sec.check_axes.push_back(axis_ref(a[i], p + ".check_axes[" + std::to_string(i) + "]"));
    } else {
      sec.check_axes.push_back(sec.axis);
    }
    cfg.compactify = sec;
  }
  if (j.contains("yngvason")) {
    const auto& y = j.at("yngvason");
    allow_keys(y, "config.yngvason", {"sweep"});
    YngvasonSection sec;
    if (y.contains("sweep")) {
      const auto& s = y.at("sweep");
      if (!s.is_array()) fail("config.yngvason.sweep", "expected an array of site counts");
      for (std::size_t i = 0; i < s.size(); ++i) {
        const std::string p = "config.yngvason.sweep[" + std::to_string(i) + "]";
        const auto n = integer(s[i], p);
        if (n < 2 || n > (1 << 20)) fail(p, "out of range");
        sec.sweep.push_back(static_cast<int>(n));
      }
    }
    cfg.yngvason = sec;
  }
  return cfg;
}

}  // namespace rplab::detail

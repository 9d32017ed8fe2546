#include "rplab/runner.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>

#include "detail/config.hpp"
#include "rplab/charged.hpp"
#include "rplab/compactify.hpp"
#include "rplab/error.hpp"
#include "rplab/gaussian.hpp"
#include "rplab/measures.hpp"
#include "rplab/quantize.hpp"
#include "rplab/rp_check.hpp"

namespace rplab {

namespace {

using detail::json;
using detail::RunConfig;

constexpr const char* tasks[] = {"check-rp", "charged-check", "schwinger", "quantize", "compactify", "yngvason", "all"};
constexpr double schwinger_tol = 1e-12;
constexpr double energy_tol = 1e-8;
constexpr int gaussian_fields = 5;
constexpr double gaussian_scale = 0.4;
constexpr int m_matrix_draws = 50;

std::string num(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

/// JSON has no inf/nan; those become strings.
json real_json(double v) { return std::isfinite(v) ? json(v) : json(num(v)); }

std::string file_stem(const std::string& id) {
  std::string s;
  for (char c : id) s += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  while (!s.empty() && s.back() == '_') s.pop_back();
  return s;
}

struct Context {
  Context(const RunConfig& c, const RunOptions& o) : cfg(c), opts(o) {}

  const RunConfig& cfg;
  const RunOptions& opts;
  json results = json::array();
  json timings = json::array();
  std::vector<std::pair<std::string, std::string>> csv;  // name, content
  GridPtr grid;
  std::optional<FourierMultiplier> mult;
  std::optional<CovarianceOperator> D;

  const GridPtr& need_grid() {
    if (!cfg.axes) throw Error(ErrorCode::ConfigError, "config.grid: missing");
    if (!grid) grid = build_grid(*cfg.axes);
    return grid;
  }
  const FourierMultiplier& need_multiplier() {
    if (!cfg.multiplier) throw Error(ErrorCode::ConfigError, "config.multiplier: missing");
    if (!mult) mult = sample(*cfg.multiplier, need_grid());
    return *mult;
  }
  const CovarianceOperator& need_kernel() {
    if (!D) D = kernel(need_multiplier());
    return *D;
  }

  void record(json entry, double seconds) {
    timings.push_back({{"id", entry.value("id", std::string())}, {"task", entry.value("task", std::string())},
                       {"seconds", seconds}});
    results.push_back(std::move(entry));
  }

  template <class F>
  void item(const std::string& task, const std::string& id, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    json entry;
    try {
      entry = body();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
      entry = {{"verdict", "Error"}, {"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}};
    }
    json head = {{"task", task}, {"id", id}};
    head.update(entry);
    record(std::move(head), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
};

std::string witness_csv(const SpacetimeGrid& g, const std::vector<cplx>& f) {
  std::string s = "site";
  for (std::size_t j = 0; j < g.dim(); ++j) s += ",x" + std::to_string(j);
  s += ",re,im\n";
  for (std::size_t site = 0; site < f.size(); ++site) {
    if (f[site] == cplx{}) continue;
    s += std::to_string(site);
    for (std::size_t j = 0; j < g.dim(); ++j) s += "," + num(g.coordinate(site, j));
    s += "," + num(f[site].real()) + "," + num(f[site].imag()) + "\n";
  }
  return s;
}

json report_json(Context& ctx, const RPReport& r, const SpacetimeGrid& g, const std::string& witness_name) {
  json j = {{"verdict", std::string(to_string(r.verdict))},
            {"condition", r.condition.id()},
            {"dimension", r.dimension},
            {"herm_defect", r.herm_defect},
            {"min_eig", r.min_eig},
            {"norm", r.norm},
            {"tol", r.tol},
            {"covariance_defect", r.covariance_defect}};
  if (!r.note.empty()) j["note"] = r.note;
  if (r.witness) {
    j["witness"] = {{"value", complex_json(r.witness->value)}, {"file", witness_name}};
    ctx.csv.emplace_back(witness_name, witness_csv(g, r.witness->field));
  }
  return j;
}

std::vector<std::vector<cplx>> positive_fields(const SpacetimeGrid& g, std::size_t axis, int count,
                                               std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::vector<std::vector<cplx>> fs(count, std::vector<cplx>(g.size()));
  for (auto& f : fs)
    for (auto s : g.halfspace_sites(axis, +1)) f[s] = gaussian_scale * cplx(gauss(rng), gauss(rng));
  return fs;
}

std::optional<std::size_t> special_axis(const std::string& id, const char* name) {
  const std::regex re(std::string(name) + R"(\((\d+)\))");
  std::smatch m;
  if (std::regex_match(id, m, re)) return static_cast<std::size_t>(std::stoul(m[1]));
  return std::nullopt;
}

void run_checks(Context& ctx) {
  for (const auto& c : ctx.cfg.checks) {
    ctx.item("check-rp", c.id, [&]() -> json {
      const auto& D = ctx.need_kernel();
      const auto& g = *D.grid();
      if (auto axis = special_axis(c.id, "Equivalence")) {
        const auto e = check_equivalence(D, *axis, c.tol);
        const auto stem = file_stem(c.id);
        return {{"verdict", std::string(to_string(e.verdict))},
                {"agree", e.agree},
                {"identity_defect", e.identity_defect},
                {"reflected_first", report_json(ctx, e.reflected_first, g, "witness_" + stem + "_first.csv")},
                {"reflected_last", report_json(ctx, e.reflected_last, g, "witness_" + stem + "_last.csv")}};
      }
      if (auto axis = special_axis(c.id, "GaussianIdentity")) {
        if (*axis >= g.dim()) throw Error(ErrorCode::InvalidArgument, "no axis " + std::to_string(*axis));
        std::mt19937_64 rng(ctx.cfg.seed);
        std::normal_distribution<double> gauss;
        const auto fs = positive_fields(g, *axis, gaussian_fields, rng);
        std::vector<cplx> cs(gaussian_fields);
        for (auto& v : cs) v = {gauss(rng), gauss(rng)};
        const auto r = verify_gaussian_identity(D, *axis, fs, cs);
        const bool ok = r.defect <= c.tol;
        return {{"verdict", ok ? "Pass" : "Fail"},
                {"lhs", complex_json(r.lhs)},
                {"rhs", complex_json(r.rhs)},
                {"defect", r.defect},
                {"covariance_defect", r.covariance_defect},
                {"tol", c.tol},
                {"seed", ctx.cfg.seed}};
      }
      if (auto axis = special_axis(c.id, "MMatrix")) {
        const auto r = m_matrix_positivity(D, *axis, m_matrix_draws, ctx.cfg.seed, c.tol);
        return {{"verdict", r.positive ? "Pass" : "Fail"},
                {"min_eig", r.min_eig},
                {"draws", r.draws},
                {"seed", r.seed},
                {"tol", c.tol}};
      }
      const auto cond = RPCondition::parse(c.id);
      return report_json(ctx, check(cond, D, c.tol), g, "witness_" + file_stem(c.id) + ".csv");
    });
  }
}

void run_charged(Context& ctx) {
  const auto& sec = *ctx.cfg.charged;
  std::optional<ChargedCovariance> C;
  for (const auto& c : sec.checks) {
    ctx.item("charged-check", c.id, [&]() -> json {
      const auto cond = ChargedCondition::parse(c.id);
      if (!C) C = build_charged(sec.plus, sec.minus, ctx.need_grid());
      const auto r = check_charged(cond, *C, c.tol);
      const auto& g = *ctx.need_grid();
      const auto stem = "witness_" + file_stem(c.id);
      json j = {{"verdict", std::string(to_string(r.verdict))},
                {"plus_block", report_json(ctx, r.transposed_block, g, stem + "_plus.csv")},
                {"minus_block", report_json(ctx, r.direct_block, g, stem + "_minus.csv")},
                {"reflection_covariance_defect",
                 charged_reflection_covariance_defect(C->sigma_plus, C->sigma_minus, cond.axis)}};
      if (!r.witness_block.empty()) j["witness_block"] = r.witness_block;
      return j;
    });
  }
}

void run_schwinger(Context& ctx) {
  const auto& sec = *ctx.cfg.schwinger;
  for (std::size_t t = 0; t < sec.tuples.size(); ++t) {
    const auto& pts = sec.tuples[t];
    ctx.item("schwinger", "S" + std::to_string(pts.size()) + "#" + std::to_string(t), [&]() -> json {
      const auto& D = ctx.need_kernel();
      for (auto p : pts)
        if (p >= D.grid()->size()) throw Error(ErrorCode::InvalidArgument, "site " + std::to_string(p) + " out of range");
      const cplx v = schwinger(D, pts);
      json j = {{"points", pts}, {"value", complex_json(v)}};
      if (pts.size() <= 12) {
        const cplx o = pairing_oracle(D, pts);
        const double scale = std::max(std::abs(o), 1e-300);
        const double rel = v == o ? 0.0 : std::abs(v - o) / scale;
        j["oracle"] = complex_json(o);
        j["rel_diff"] = rel;
        j["verdict"] = rel <= schwinger_tol ? "Pass" : "Fail";
      } else {
        j["verdict"] = "NotApplicable";
        j["note"] = "pairing oracle limited to 12 points";
      }
      return j;
    });
  }
}

void run_quantize(Context& ctx) {
  const auto& sec = *ctx.cfg.quantize;
  ctx.item("quantize", "Quantize", [&]() -> json {
    const auto& m = ctx.need_multiplier();
    QuantizeOptions o{sec.slabs, sec.rank_tol, sec.mass ? sec.mass : reference_mass(*ctx.cfg.multiplier)};
    const auto& g = *m.grid;
    const std::size_t blocks = g.dim() == 1 ? 1 : g.size() / static_cast<std::size_t>(g.extent(0));
    std::string s;
    for (std::size_t j = 1; j < g.dim(); ++j) s += "kbar" + std::to_string(j) + ",";
    s += "quotient_dim,min_h,dispersion_ref,rel_error\n";
    bool ok = true;
    double worst_norm = 0.0, worst_semigroup = 0.0, min_h = HUGE_VAL, max_rel = 0.0, worst_anti = 0.0;
    json errors = json::array();
    for (std::size_t b = 0; b < blocks; ++b) {
      try {
        const auto q = quantize_block(m, b, o);
        for (double k : q.kbar) s += num(k) + ",";
        s += std::to_string(q.quotient_dim) + "," + num(q.min_h) + "," +
             (q.dispersion_ref ? num(*q.dispersion_ref) : "") + "," + (q.rel_error ? num(*q.rel_error) : "") + "\n";
        worst_norm = std::max(worst_norm, q.R1_norm);
        worst_semigroup = std::max(worst_semigroup, q.semigroup_defect);
        worst_anti = std::max(worst_anti, q.h.anti_hermitian_defect);
        min_h = std::min(min_h, q.min_h);
        if (q.rel_error) max_rel = std::max(max_rel, *q.rel_error);
        ok = ok && q.R1_norm <= 1 + ctx.cfg.tol && q.min_h >= -energy_tol && q.gram_min_eig >= -ctx.cfg.tol;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NotACovariance) throw;
        ok = false;
        errors.push_back({{"block", b}, {"code", std::string(to_string(e.code()))}, {"message", e.what()}});
      }
    }
    ctx.csv.emplace_back("quantize.csv", s);
    json j = {{"verdict", ok ? "Pass" : "Fail"},
              {"blocks", blocks},
              {"max_R1_norm", worst_norm},
              {"max_semigroup_defect", worst_semigroup},
              {"min_h", real_json(min_h)},
              {"max_anti_hermitian_defect", worst_anti},
              {"rank_tol", sec.rank_tol},
              {"file", "quantize.csv"}};
    if (o.mass) j["max_dispersion_rel_error"] = max_rel;
    if (!errors.empty()) j["errors"] = errors;
    return j;
  });
}

void run_compactify(Context& ctx) {
  const auto& sec = *ctx.cfg.compactify;
  for (auto j : sec.check_axes) {
    const std::string id = "Compactify(" + std::to_string(sec.axis) + ")DoublyRP(" + std::to_string(j) + ")";
    ctx.item("compactify", id, [&]() -> json {
      const auto& D = ctx.need_kernel();
      const auto p = periodize(D, sec.axis, sec.period, sec.tol);
      const auto r = verify_compactification_rp(D, sec.axis, sec.period, j, ctx.cfg.tol, sec.tol);
      const auto stem = "witness_" + file_stem(id);
      return {{"verdict", std::string(to_string(r.verdict))},
              {"periodization",
               {{"axis", p.axis},
                {"period", p.period},
                {"images_used", p.images_used},
                {"truncation_residual", p.truncation_residual},
                {"decay_rate", real_json(p.decay_rate)},
                {"tol", sec.tol}}},
              {"before", report_json(ctx, r.before, *D.grid(), stem + "_before.csv")},
              {"after", report_json(ctx, r.after, *p.D_c.grid(), stem + "_after.csv")},
              {"covariance_defect_before", r.covariance_defect_before},
              {"covariance_defect_after", r.covariance_defect_after}};
    });
  }
}

void run_yngvason(Context& ctx) {
  const auto& sec = *ctx.cfg.yngvason;
  ctx.item("yngvason", "Yngvason", [&]() -> json {
    const auto& m = ctx.need_multiplier();
    auto rep = yngvason(m);
    const auto dec = decompose(m);
    std::optional<RefinementSweep> sweep;
    if (!sec.sweep.empty()) {
      std::vector<YngvasonReport> reps;
      for (int n : sec.sweep) {
        auto axes = *ctx.cfg.axes;
        for (auto& a : axes) a.sites = n;  // lines keep their spacing, circles their length
        reps.push_back(yngvason(sample(*ctx.cfg.multiplier, build_grid(std::move(axes)))));
      }
      sweep = refinement_sweep(reps);
      rep.divergence_flag = sweep->divergence_flag;
    }
    const auto& g = *m.grid;
    std::string s;
    for (std::size_t j = 0; j < g.dim(); ++j) s += "k" + std::to_string(j) + ",";
    s += "lambda,z_partial\n";
    for (std::size_t r = 0; r < rep.order.size(); ++r) {
      for (double k : g.momentum(rep.order[r])) s += num(k) + ",";
      s += num(rep.lambda[rep.order[r]]) + "," + num(rep.z_partial[r]) + "\n";
    }
    ctx.csv.emplace_back("yngvason.csv", s);
    const bool ok = rep.log_z >= -1e-12 && dec.identity_defect <= 1e-12;
    json j = {{"verdict", ok ? "Pass" : "Fail"},
              {"modes", rep.lambda.size()},
              {"hs_norm_sq", rep.hs_norm_sq},
              {"log_z", rep.log_z},
              {"z_final", real_json(rep.z_final)},
              {"det_sqrt", complex_json(rep.det_sqrt)},
              {"spectrum_even", rep.spectrum_even},
              {"divergence_flag", rep.divergence_flag},
              {"decomposition_defect", dec.identity_defect},
              {"file", "yngvason.csv"}};
    if (sweep) {
      json lz = json::array();
      for (double v : sweep->log_z) lz.push_back(v);
      j["sweep"] = {{"modes", sweep->modes}, {"hs_norm_sq", sweep->hs_norm_sq}, {"log_z", lz},
                    {"slope", sweep->slope}};
    }
    return j;
  });
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace

bool is_task(const std::string& task) {
  for (const char* t : tasks)
    if (task == t) return true;
  return false;
}

RunOutcome run(const std::string& config_json, const RunOptions& opts) {
  if (!is_task(opts.task)) throw Error(ErrorCode::ConfigError, "unknown task '" + opts.task + "'");
  const auto cfg = detail::parse_config(config_json);
  const auto t0 = std::chrono::steady_clock::now();
  Context ctx{cfg, opts};
  const bool all = opts.task == "all";
  auto section = [&](const char* task, bool present, void (*fn)(Context&)) {
    if (opts.task == task && !present && std::string(task) != "check-rp")
      throw Error(ErrorCode::ConfigError, std::string("config: task '") + task + "' needs a '" +
                                              (std::string(task) == "charged-check" ? "charged" : task) + "' section");
    if ((all || opts.task == task) && present) fn(ctx);
  };
  section("check-rp", !cfg.checks.empty(), run_checks);
  section("charged-check", cfg.charged.has_value(), run_charged);
  section("schwinger", cfg.schwinger.has_value(), run_schwinger);
  section("quantize", cfg.quantize.has_value(), run_quantize);
  section("compactify", cfg.compactify.has_value(), run_compactify);
  section("yngvason", cfg.yngvason.has_value(), run_yngvason);

  std::size_t passed = 0;
  for (const auto& r : ctx.results)
    if (r.at("verdict") == "Pass") ++passed;
  const bool all_pass = passed == ctx.results.size();

  json report = {{"rplab_version", version_string},
                 {"task", opts.task},
                 {"seed", cfg.seed},
                 {"config", cfg.echo},
                 {"results", ctx.results},
                 {"summary", {{"total", ctx.results.size()}, {"passed", passed}, {"all_pass", all_pass}}}};
  json timings = {{"task", opts.task},
                  {"total_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
                  {"items", ctx.timings}};

  RunOutcome out;
  out.report = report.dump(2) + "\n";
  out.timings = timings.dump(2) + "\n";
  out.exit_code = all_pass ? 0 : 1;
  if (!opts.out_dir.empty()) {
    const std::filesystem::path dir(opts.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
    if (opts.write_json) {
      write_file(dir / "report.json", out.report);
      write_file(dir / "timings.json", out.timings);
      out.files.push_back((dir / "report.json").string());
      out.files.push_back((dir / "timings.json").string());
    }
    if (opts.write_csv)
      for (const auto& [name, content] : ctx.csv) {
        write_file(dir / name, content);
        out.files.push_back((dir / name).string());
      }
  }
  return out;
}

}  // namespace rplab

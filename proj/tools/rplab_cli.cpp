#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rplab/rplab.h"

using nlohmann::json;

namespace {

constexpr int exit_usage = 2;
constexpr int exit_runtime = 3;

std::vector<std::size_t> parse_points(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t pos = 0;
    const auto v = std::stoull(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reflection positivity checks for Gaussian lattice covariances"};
  app.set_version_flag("--version", rplab_version());
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = "rplab-out";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool print_json = false, write_csv = true;
  app.add_option("--config", config_path, "Run config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", seed, "Seed for randomized test-function draws");
  app.add_option("--tol", tol, "Default tolerance")->check(CLI::PositiveNumber);
  app.add_flag("--json", print_json, "Print the JSON report on stdout");
  app.add_flag("--csv,!--no-csv", write_csv, "Write CSV artifacts (witnesses, spectra)");

  std::vector<std::string> checks, charged_checks, points;
  std::optional<std::size_t> axis, slabs;
  std::optional<double> period, image_tol, rank_tol;
  std::vector<int> sweep;

  auto* check_rp = app.add_subcommand("check-rp", "Reflection positivity conditions on one covariance");
  check_rp->add_option("--check", checks, "Condition id, e.g. TimeRP or SpatialRP(1) (repeatable)");
  auto* charged = app.add_subcommand("charged-check", "Conditions on the charged block covariance");
  charged->add_option("--check", charged_checks, "Charged condition id (repeatable)");
  auto* schwinger = app.add_subcommand("schwinger", "Schwinger functions against the pairing oracle");
  schwinger->add_option("--points", points, "Comma-separated site indices (repeatable)");
  auto* quantize = app.add_subcommand("quantize", "OS quantization per spatial momentum");
  quantize->add_option("--slabs", slabs, "Positive-time slabs");
  quantize->add_option("--rank-tol", rank_tol, "Relative rank cut of the OS form")->check(CLI::PositiveNumber);
  auto* compactify = app.add_subcommand("compactify", "Periodize one axis and recheck DoublyRP");
  compactify->add_option("--axis", axis, "Axis to compactify");
  compactify->add_option("--period", period, "Period length")->check(CLI::PositiveNumber);
  compactify->add_option("--image-tol", image_tol, "Image-sum truncation tolerance")->check(CLI::PositiveNumber);
  auto* yngvason = app.add_subcommand("yngvason", "Yngvason diagnostics and measure decomposition");
  yngvason->add_option("--sweep", sweep, "Site counts for a refinement sweep (repeatable)");
  app.add_subcommand("all", "Every configured section");

  CLI11_PARSE(app, argc, argv);
  const std::string task = app.get_subcommands().front()->get_name();

  json cfg = json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      cfg = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      std::cerr << "rplab: " << config_path << ": " << e.what() << "\n";
      return exit_usage;
    }
    if (!cfg.is_object()) {
      std::cerr << "rplab: " << config_path << ": top level must be an object\n";
      return exit_usage;
    }
  }
  if (seed) cfg["seed"] = *seed;
  if (tol) cfg["tol"] = *tol;
  if (!checks.empty()) cfg["checks"] = checks;
  if (!charged_checks.empty()) {
    if (!cfg.contains("charged")) {
      std::cerr << "rplab: --check needs a 'charged' section in the config\n";
      return exit_usage;
    }
    cfg["charged"]["checks"] = charged_checks;
  }
  if (!points.empty()) {
    json tuples = json::array();
    try {
      for (const auto& p : points) tuples.push_back(parse_points(p));
    } catch (const std::exception&) {
      std::cerr << "rplab: --points expects comma-separated site indices\n";
      return exit_usage;
    }
    cfg["schwinger"] = {{"tuples", tuples}};
  }
  if (task == "quantize" && !cfg.contains("quantize")) cfg["quantize"] = json::object();
  if (slabs) cfg["quantize"]["slabs"] = *slabs;
  if (rank_tol) cfg["quantize"]["rank_tol"] = *rank_tol;
  if (axis) cfg["compactify"]["axis"] = *axis;
  if (period) cfg["compactify"]["period"] = *period;
  if (image_tol) cfg["compactify"]["tol"] = *image_tol;
  if (task == "yngvason" && !cfg.contains("yngvason")) cfg["yngvason"] = json::object();
  if (!sweep.empty()) cfg["yngvason"]["sweep"] = sweep;

  char* report = nullptr;
  int code = 0;
  const auto status =
      rplab_run(cfg.dump().c_str(), task.c_str(), out_dir.c_str(), 1, write_csv ? 1 : 0, &report, &code);
  if (status != RPLAB_OK) {
    std::cerr << "rplab: " << rplab_last_error() << "\n";
    return status == RPLAB_CONFIG_ERROR || status == RPLAB_INVALID_ARGUMENT ? exit_usage : exit_runtime;
  }
  const std::string text = report;
  rplab_string_free(report);
  if (print_json) {
    std::cout << text;
  } else {
    const auto r = json::parse(text);
    for (const auto& e : r.at("results")) {
      std::string verdict = e.at("verdict").get<std::string>();
      for (auto& c : verdict) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      std::cout << verdict << "  " << e.at("task").get<std::string>() << "  " << e.at("id").get<std::string>();
      if (e.contains("witness_block")) std::cout << "  (witness on " << e.at("witness_block").get<std::string>() << " block)";
      if (e.contains("error")) std::cout << "  " << e.at("error").at("message").get<std::string>();
      std::cout << "\n";
    }
    const auto& s = r.at("summary");
    std::cout << s.at("passed").get<std::size_t>() << "/" << s.at("total").get<std::size_t>() << " passed; report in "
              << out_dir << "/report.json\n";
  }
  return code;
}

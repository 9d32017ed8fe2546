#pragma once

#include <string>
#include <vector>

namespace rplab {

inline constexpr const char* version_string = "0.1.0";

/// Tasks: check-rp, charged-check, schwinger, quantize, compactify, yngvason, all.
struct RunOptions {
  std::string task = "all";
  std::string out_dir;  // empty: nothing is written
  bool write_json = true;
  bool write_csv = true;
};

struct RunOutcome {
  std::string report;   // JSON, deterministic for a given config and build
  std::string timings;  // JSON wall times, kept out of the report
  int exit_code = 0;    // 0 iff every verdict is Pass
  std::vector<std::string> files;
};

/// Parses the JSON config, runs the task and writes artifacts under out_dir.
/// Config problems throw ConfigError; failures of individual checks are embedded in the report.
RunOutcome run(const std::string& config_json, const RunOptions& options);

bool is_task(const std::string& task);

}  // namespace rplab

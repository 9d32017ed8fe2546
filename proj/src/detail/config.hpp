#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rplab/multiplier.hpp"

namespace rplab::detail {

using nlohmann::json;

struct CheckItem {
  std::string id;
  double tol = 1e-10;
};

struct ChargedSection {
  MultiplierSpec plus;
  MultiplierSpec minus;
  std::vector<CheckItem> checks;
};

struct SchwingerSection {
  std::vector<std::vector<std::size_t>> tuples;
};

struct QuantizeSection {
  std::size_t slabs = 0;
  double rank_tol = 1e-10;
  std::optional<double> mass;
};

struct CompactifySection {
  std::size_t axis = 0;
  double period = 0.0;
  double tol = 1e-12;
  std::vector<std::size_t> check_axes;
};

struct YngvasonSection {
  std::vector<int> sweep;
};

struct RunConfig {
  json echo;
  std::optional<std::vector<AxisSpec>> axes;
  std::optional<MultiplierSpec> multiplier;
  std::uint64_t seed = 1;
  double tol = 1e-10;
  std::vector<CheckItem> checks;
  std::optional<ChargedSection> charged;
  std::optional<SchwingerSection> schwinger;
  std::optional<QuantizeSection> quantize;
  std::optional<CompactifySection> compactify;
  std::optional<YngvasonSection> yngvason;
};

/// Parses and validates; errors are ConfigError with the offending field path.
RunConfig parse_config(const std::string& text);

MultiplierSpec parse_multiplier(const json& j, const std::string& path);
std::vector<AxisSpec> parse_axes(const json& j, const std::string& path);

}  // namespace rplab::detail

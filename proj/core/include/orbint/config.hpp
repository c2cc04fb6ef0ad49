#pragma once

#include <cstdint>
#include <string>

namespace orbint {

/// One experiment request. Fields left at their zero defaults inherit the
/// scenario's registered defaults when the scenario runs.
struct ScenarioConfig {
  std::string scenario;
  std::string levels;       // schedule expression, "kind:lo..hi"
  long sample_size = 0;     // 0 = scenario default
  std::uint64_t seed = 1;
  double tol = 0.0;         // 0 = scenario default
  double window = 8.0;      // truncation half-width
  std::string out_dir = ".";
  bool emit_plot_script = false;

  bool operator==(const ScenarioConfig& o) const;
};

/// Parses the line-oriented key = value format ('#' comments, strings
/// quoted, ranges written "a..b" inside strings). Unknown keys raise
/// ConfigError.
ScenarioConfig parse_config_text(const std::string& text);

/// Reads and parses a config file; ConfigError when unreadable.
ScenarioConfig load_config(const std::string& path);

/// Canonical text form; parse_config_text(emit_config(c)) == c.
std::string emit_config(const ScenarioConfig& config);

}  // namespace orbint

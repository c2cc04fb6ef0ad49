#pragma once

#include <complex>
#include <string>
#include <vector>

#include "orbint/config.hpp"

namespace orbint {

/// Registry entry: name, one-line description, and the defaults a config
/// inherits for fields left at zero.
struct ScenarioInfo {
  std::string name;
  std::string description;
  ScenarioConfig defaults;
};

/// All registered scenarios, alphabetical by name.
const std::vector<ScenarioInfo>& scenario_registry();

/// One emitted CSV record. Column semantics are fixed globally
/// (scenario,point_index,level,value_re,value_im,reference_re,reference_im,
/// abs_error); what indexes a "point" or a "level" is documented per
/// scenario.
struct ScenarioRow {
  long point_index = 0;
  long level = 0;
  std::complex<double> value{0.0, 0.0};
  std::complex<double> reference{0.0, 0.0};
  double abs_error = 0.0;
};

struct ScenarioReport {
  ScenarioConfig config;  // resolved: defaults filled in
  bool pass = false;
  double wall_ms = 0.0;
  std::vector<std::string> lines;  // human-readable verdicts
  std::vector<ScenarioRow> rows;
  std::string csv_path;
  std::string json_path;
  std::string plot_path;  // empty unless a plot script was requested
};

/// Executes the named scenario: resolves defaults, runs the pipeline,
/// writes <name>.csv and <name>.json under config.out_dir (plus
/// <name>.plot.gp when requested), and returns the report. ConfigError for
/// unregistered names or bad schedules (nothing is written then);
/// NumericalFailure when a non-finite value reaches the output.
ScenarioReport run_scenario(const ScenarioConfig& config);

/// The exact CSV text for a row set (header included, LF endings, %.17g).
std::string scenario_csv_text(const std::string& name,
                              const std::vector<ScenarioRow>& rows);

}  // namespace orbint

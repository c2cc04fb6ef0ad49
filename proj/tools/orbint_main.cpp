// Command line front end: run a scenario from a config file or list the
// registry.  Exit codes: 0 pass, 1 scenario assertion failed, 2 bad config
// or usage, 3 numerical failure.
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "orbint/config.hpp"
#include "orbint/errors.hpp"
#include "orbint/scenario.hpp"

namespace {

int cmd_list(bool as_json, const std::string& filter) {
  const auto& registry = orbint::scenario_registry();
  if (as_json) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& info : registry) {
      if (!filter.empty() && info.name.find(filter) == std::string::npos)
        continue;
      out.push_back({{"name", info.name},
                     {"description", info.description},
                     {"default_levels", info.defaults.levels},
                     {"default_sample_size", info.defaults.sample_size},
                     {"default_tol", info.defaults.tol}});
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  for (const auto& info : registry) {
    if (!filter.empty() && info.name.find(filter) == std::string::npos)
      continue;
    std::printf("%-28s %s\n", info.name.c_str(), info.description.c_str());
  }
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            long long seed, bool seed_given, bool emit_plot) {
  orbint::ScenarioConfig config = orbint::load_config(config_path);
  if (!out_dir.empty()) config.out_dir = out_dir;
  if (seed_given) config.seed = static_cast<std::uint64_t>(seed);
  if (emit_plot) config.emit_plot_script = true;

  orbint::ScenarioReport report = orbint::run_scenario(config);
  std::printf("scenario %s: %s (%.1f ms, %zu rows)\n",
              report.config.scenario.c_str(),
              report.pass ? "PASS" : "FAIL", report.wall_ms,
              report.rows.size());
  for (const auto& line : report.lines)
    std::printf("  %s\n", line.c_str());
  std::printf("  csv:  %s\n", report.csv_path.c_str());
  std::printf("  json: %s\n", report.json_path.c_str());
  if (!report.plot_path.empty())
    std::printf("  plot: %s\n", report.plot_path.c_str());
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orbital-average laboratory"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a scenario from a config file");
  std::string config_path;
  std::string out_dir;
  long long seed = 0;
  bool emit_plot = false;
  run->add_option("config-file", config_path, "key=value scenario config")
      ->required();
  auto* out_opt = run->add_option("--out", out_dir, "output directory");
  auto* seed_opt = run->add_option("--seed", seed, "override the RNG seed");
  run->add_flag("--emit-plot-script", emit_plot,
                "also write a gnuplot script next to the CSV");
  (void)out_opt;

  auto* list = app.add_subcommand("list", "list available scenarios");
  bool as_json = false;
  std::string filter;
  list->add_flag("--json", as_json, "emit the registry as JSON");
  list->add_option("--filter", filter, "only names containing this substring");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) return cmd_list(as_json, filter);
    return cmd_run(config_path, out_dir, seed, seed_opt->count() > 0,
                   emit_plot);
  } catch (const orbint::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const orbint::NumericalFailure& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const orbint::OrbintError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

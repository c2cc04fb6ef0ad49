#include "orbint/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "orbint/errors.hpp"

namespace orbint {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string unquote(const std::string& v, int line_no) {
  if (v.size() < 2 || v.front() != '"' || v.back() != '"')
    throw ConfigError("line " + std::to_string(line_no) +
                      ": string values must be double-quoted, got " + v);
  return v.substr(1, v.size() - 2);
}

long parse_long(const std::string& v, int line_no) {
  try {
    std::size_t used = 0;
    long out = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line_no) +
                      ": expected an integer, got " + v);
  }
}

std::uint64_t parse_u64(const std::string& v, int line_no) {
  try {
    std::size_t used = 0;
    unsigned long long out = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<std::uint64_t>(out);
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line_no) +
                      ": expected a nonnegative integer, got " + v);
  }
}

double parse_double(const std::string& v, int line_no) {
  try {
    std::size_t used = 0;
    double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line_no) +
                      ": expected a number, got " + v);
  }
}

bool parse_bool(const std::string& v, int line_no) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("line " + std::to_string(line_no) +
                    ": expected true or false, got " + v);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return scenario == o.scenario && levels == o.levels &&
         sample_size == o.sample_size && seed == o.seed && tol == o.tol &&
         window == o.window && out_dir == o.out_dir &&
         emit_plot_script == o.emit_plot_script;
}

ScenarioConfig parse_config_text(const std::string& text) {
  ScenarioConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool saw_scenario = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value, got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key == "scenario") {
      config.scenario = unquote(value, line_no);
      saw_scenario = true;
    } else if (key == "levels") {
      config.levels = unquote(value, line_no);
    } else if (key == "sample_size") {
      config.sample_size = parse_long(value, line_no);
      if (config.sample_size < 0)
        throw ConfigError("line " + std::to_string(line_no) +
                          ": sample_size must be nonnegative");
    } else if (key == "seed") {
      config.seed = parse_u64(value, line_no);
    } else if (key == "tol") {
      config.tol = parse_double(value, line_no);
      if (config.tol < 0.0)
        throw ConfigError("line " + std::to_string(line_no) +
                          ": tol must be nonnegative");
    } else if (key == "window") {
      config.window = parse_double(value, line_no);
      if (config.window <= 0.0)
        throw ConfigError("line " + std::to_string(line_no) +
                          ": window must be positive");
    } else if (key == "out_dir") {
      config.out_dir = unquote(value, line_no);
    } else if (key == "emit_plot_script") {
      config.emit_plot_script = parse_bool(value, line_no);
    } else {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
  }
  if (!saw_scenario) throw ConfigError("config is missing the scenario key");
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string emit_config(const ScenarioConfig& config) {
  std::ostringstream out;
  out << "scenario = \"" << config.scenario << "\"\n";
  out << "levels = \"" << config.levels << "\"\n";
  out << "sample_size = " << config.sample_size << "\n";
  out << "seed = " << config.seed << "\n";
  out << "tol = " << format_double(config.tol) << "\n";
  out << "window = " << format_double(config.window) << "\n";
  out << "out_dir = \"" << config.out_dir << "\"\n";
  out << "emit_plot_script = " << (config.emit_plot_script ? "true" : "false")
      << "\n";
  return out.str();
}

}  // namespace orbint

// Command-line front end.  Every config key is also a flag; flags override the
// --config file, which may be a previous run's metadata.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ngame/ngame.h"

using nlohmann::json;

namespace {

struct Key {
  std::string key, type;
  std::vector<std::string> choices;
};

std::vector<Key> load_schema() {
  char* text = nullptr;
  if (ngame_config_schema(&text) != NGAME_OK) {
    std::cerr << "error: " << ngame_last_error() << '\n';
    std::exit(1);
  }
  std::vector<Key> keys;
  for (const auto& k : json::parse(text))
    keys.push_back({k["key"], k["type"], k["choices"].get<std::vector<std::string>>()});
  ngame_string_free(text);
  return keys;
}

// Flag text to the JSON value the config expects.
json typed(const Key& k, const std::string& value) {
  try {
    if (k.type == "int" || k.type == "uint") {
      std::size_t used = 0;
      const long long v = std::stoll(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      if (k.type == "uint" && v < 0) throw std::invalid_argument(value);
      return k.type == "uint" ? json(static_cast<unsigned long long>(v)) : json(v);
    }
    if (k.type == "number") {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return v;
    }
    if (k.type == "numbers") {
      json arr = json::array();
      std::stringstream ss(value);
      std::string part;
      while (std::getline(ss, part, ','))
        if (!part.empty()) arr.push_back(typed({k.key, "number", {}}, part));
      return arr;
    }
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--" + k.key, "expected " + k.type + ", got '" + value + "'");
  }
  return value;
}

struct Flags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::map<std::string, bool> bools;
};

void add_config_flags(CLI::App& app, const std::vector<Key>& keys, Flags& flags) {
  for (const auto& k : keys) {
    if (k.key == "command") continue;
    if (k.type == "bool") {
      flags.options[k.key] = app.add_flag("--" + k.key + ",!--no-" + k.key, flags.bools[k.key], "config key " + k.key);
      continue;
    }
    std::string help = "config key (" + k.type + ")";
    if (!k.choices.empty()) {
      help += ":";
      for (const auto& c : k.choices) help += " " + (c.empty() ? std::string("''") : c);
    }
    if (k.type == "numbers") help += ", comma separated";
    flags.options[k.key] = app.add_option("--" + k.key, flags.values[k.key], help);
  }
}

json overrides(const std::vector<Key>& keys, const Flags& flags) {
  json o = json::object();
  for (const auto& k : keys) {
    auto it = flags.options.find(k.key);
    if (it == flags.options.end() || it->second->count() == 0) continue;
    o[k.key] = k.type == "bool" ? json(flags.bools.at(k.key)) : typed(k, flags.values.at(k.key));
  }
  return o;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int report_error(int code) {
  std::cerr << "error: " << ngame_last_error() << '\n';
  return ngame_exit_status(code);
}

int execute(const std::string& command, const std::string& config_path, json o) {
  o["command"] = command;
  const std::string base = config_path.empty() ? "{}" : read_file(config_path);
  ngame_config* config = nullptr;
  int rc = ngame_config_parse(base.c_str(), o.dump().c_str(), &config);
  if (rc != NGAME_OK) return report_error(rc);
  ngame_result* result = nullptr;
  rc = ngame_run(config, &result);
  ngame_config_free(config);
  if (rc != NGAME_OK) return report_error(rc);
  for (std::size_t i = 0; i < ngame_result_warning_count(result); ++i)
    std::cerr << "warning: " << ngame_result_warning(result, i) << '\n';
  for (std::size_t i = 0; i < ngame_result_output_count(result); ++i)
    std::cout << "wrote " << ngame_result_output(result, i) << '\n';
  const int status = ngame_result_status(result);
  if (status != 0) std::cerr << "some steady states did not converge; partial results written\n";
  ngame_result_free(result);
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Naming game with committed minorities: mean-field, recursion, agent-based runs and sweeps"};
  app.set_version_flag("--version", ngame_version());
  app.require_subcommand(1);
  const auto keys = load_schema();

  struct Command {
    CLI::App* app;
    Flags flags;
    std::string config;
  };
  std::map<std::string, Command> commands;
  auto add_command = [&](CLI::App& parent, const std::string& name, const std::string& description) -> Command& {
    Command& c = commands[name];
    c.app = parent.add_subcommand(name, description);
    c.app->add_option("--config", c.config, "JSON config or metadata file from an earlier run");
    add_config_flags(*c.app, keys, c.flags);
    return c;
  };
  add_command(app, "meanfield", "integrate the mean-field equations (full or symmetry-reduced)");
  add_command(app, "recursive", "listener-only recursion");
  add_command(app, "abm", "agent-based ensemble on a network");
  Command& sweep = add_command(app, "sweep", "critical points, curves, tricritical point, S0 bounds, heatmaps");
  std::string sweep_kind;
  sweep.app->add_option("kind", sweep_kind, "critical | curve | tricritical | bound | abm | heatmap");

  CLI::App* scenario = app.add_subcommand("scenario", "scenario utilities");
  scenario->require_subcommand(1);
  add_command(*scenario, "make", "write the committed/initial allocation as JSON");

  CLI::App* render = app.add_subcommand("render", "render a result CSV as SVG");
  std::string csv_path, svg_path;
  render->add_option("csv", csv_path, "input CSV")->required();
  render->add_option("-o,--out", svg_path, "output SVG (default: input with .svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (render->parsed()) {
      if (svg_path.empty()) {
        svg_path = csv_path;
        const auto dot = svg_path.rfind('.');
        if (dot != std::string::npos && svg_path.find('/', dot) == std::string::npos) svg_path.resize(dot);
        svg_path += ".svg";
      }
      char* warnings = nullptr;
      const int rc = ngame_render(csv_path.c_str(), svg_path.c_str(), &warnings);
      if (rc != NGAME_OK) return report_error(rc);
      for (const auto& w : json::parse(warnings)) std::cerr << "warning: " << w.get<std::string>() << '\n';
      ngame_string_free(warnings);
      std::cout << "wrote " << svg_path << '\n';
      return 0;
    }
    for (auto& [name, c] : commands) {
      if (!c.app->parsed()) continue;
      json o = overrides(keys, c.flags);
      if (name == "sweep" && !sweep_kind.empty()) o["sweep"] = sweep_kind;
      return execute(name == "make" ? "scenario" : name, c.config, std::move(o));
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ngame/error.hpp"
#include "ngame/scenarios.hpp"

namespace ngame {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kArtifactVersion = "1.0.0";

/// Flat run configuration.  Every key is also a CLI flag of the same name.
struct RunConfig {
  int schema_version = kSchemaVersion;
  std::string command = "meanfield";  // meanfield | recursive | abm | sweep | scenario

  // Scenario.
  std::string scenario = "custom";  // custom | s0 | s1 | s2 | network_sym
  std::optional<int> m;
  std::vector<double> P;
  std::vector<double> x0;
  std::optional<double> P_A, P_tilde, p0;
  double sigma = 0.02;
  std::uint64_t scenario_seed = 1;

  // Dynamics.
  std::string variant = "original";  // original | listener_only
  std::string backend = "full";      // full | reduced | recursive
  double t_end = 1000.0;
  double sample_dt = 1.0;
  std::int64_t steps = 1000;  // recursion steps
  bool steady = false;        // report the steady state only
  double eps = 1e-10;
  double t_max = 1e5;
  double rtol = 1e-9;
  double atol = 1e-12;
  double recursive_eps = 1e-12;
  std::int64_t recursive_max_steps = 1'000'000;

  // Agent-based runs.
  std::string network = "er";  // complete | er | sw | sf
  int n = 1000;
  double avg_degree = 8.0;
  double beta = 0.1;
  std::uint64_t network_seed = 0;
  bool resample_network = false;
  int sweeps = 1000;
  int realizations = 50;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string realization_csv;  // optional per-realization trajectories

  // Sweeps.
  std::string sweep = "critical";  // critical | curve | tricritical | bound | abm | heatmap
  std::string parameter;           // curve / abm parameter
  std::vector<double> values;
  double lo = 0.0;
  double hi = 0.5;
  double tol = 5e-4;
  double delta_jump = 0.1;
  double pb_lo = 0.10;
  double pb_hi = 0.20;
  double pb_tol = 1e-4;
  double grid_lo = 0.0;
  double grid_hi = 0.1;
  double grid_step = 2.5e-3;
  std::vector<double> rows;  // heatmap: m values
  std::vector<double> cols;  // heatmap: average degrees, 0 = complete graph
  int trials = 10;
  int max_draws = 60;

  // Output.
  std::string out;       // CSV (scenario: JSON); default <command>.csv
  std::string metadata;  // default <out>.meta.json

  bool operator==(const RunConfig&) const = default;
};

struct ConfigIssue {
  std::string path;  // JSON pointer, e.g. /P/1
  std::string message;
};

/// Aggregated validation failure.  The code is InfeasibleScenario when every
/// issue is a scenario infeasibility, SchemaMismatch for a schema version
/// mismatch, and Config otherwise.
class ConfigError : public Error {
 public:
  ConfigError(ErrorCode code, std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Parses and validates JSON config text; throws ConfigError listing every
/// problem found.
RunConfig parse_config(const std::string& text);
/// Canonical JSON (every key, defaults filled in).
std::string config_to_json(const RunConfig& config, int indent = 2);

struct ConfigKey {
  std::string key;
  std::string type;  // int | uint | number | bool | string | numbers
  std::vector<std::string> choices;
};
/// Known keys, in canonical order.
const std::vector<ConfigKey>& config_keys();

/// Scenario described by the config, with P_A optionally overridden.
ScenarioConfig build_scenario(const RunConfig& config, std::optional<double> P_A = std::nullopt);

}  // namespace ngame

#include "ngame/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

#include "json.hpp"
#include "ngame/opinion.hpp"

namespace ngame {

using nlohmann::json;

namespace {

using Issues = std::vector<ConfigIssue>;

std::string code_message(ErrorCode code, const std::vector<ConfigIssue>& issues) {
  std::string text = std::string(to_string(code)) + ":";
  for (const auto& i : issues) text += "\n  " + (i.path.empty() ? std::string("/") : i.path) + ": " + i.message;
  return text;
}

bool read(const json& j, int& out, const std::string& path, Issues& issues) {
  if (!j.is_number_integer()) return issues.push_back({path, "expected an integer"}), false;
  const auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    return issues.push_back({path, "integer out of range"}), false;
  out = static_cast<int>(v);
  return true;
}

bool read(const json& j, std::int64_t& out, const std::string& path, Issues& issues) {
  if (!j.is_number_integer()) return issues.push_back({path, "expected an integer"}), false;
  out = j.get<std::int64_t>();
  return true;
}

bool read(const json& j, std::uint64_t& out, const std::string& path, Issues& issues) {
  if (!j.is_number_unsigned()) return issues.push_back({path, "expected a non-negative integer"}), false;
  out = j.get<std::uint64_t>();
  return true;
}

bool read(const json& j, double& out, const std::string& path, Issues& issues) {
  if (!j.is_number()) return issues.push_back({path, "expected a number"}), false;
  out = j.get<double>();
  if (!std::isfinite(out)) return issues.push_back({path, "expected a finite number"}), false;
  return true;
}

bool read(const json& j, bool& out, const std::string& path, Issues& issues) {
  if (!j.is_boolean()) return issues.push_back({path, "expected true or false"}), false;
  out = j.get<bool>();
  return true;
}

bool read(const json& j, std::string& out, const std::string& path, Issues& issues) {
  if (!j.is_string()) return issues.push_back({path, "expected a string"}), false;
  out = j.get<std::string>();
  return true;
}

bool read(const json& j, std::vector<double>& out, const std::string& path, Issues& issues) {
  if (!j.is_array()) return issues.push_back({path, "expected an array of numbers"}), false;
  std::vector<double> v;
  bool ok = true;
  for (std::size_t k = 0; k < j.size(); ++k) {
    double d = 0.0;
    ok = read(j[k], d, path + "/" + std::to_string(k), issues) && ok;
    v.push_back(d);
  }
  if (ok) out = std::move(v);
  return ok;
}

template <class T>
bool read(const json& j, std::optional<T>& out, const std::string& path, Issues& issues) {
  T v{};
  if (!read(j, v, path, issues)) return false;
  out = v;
  return true;
}

template <class T>
void write(json& j, const char* key, const T& v) {
  j[key] = v;
}

template <class T>
void write(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
const char* type_name() {
  if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::int64_t>) return "int";
  else if constexpr (std::is_same_v<T, std::uint64_t>) return "uint";
  else if constexpr (std::is_same_v<T, double>) return "number";
  else if constexpr (std::is_same_v<T, bool>) return "bool";
  else if constexpr (std::is_same_v<T, std::string>) return "string";
  else if constexpr (std::is_same_v<T, std::vector<double>>) return "numbers";
  else return type_name<typename T::value_type>();
}

struct Field {
  ConfigKey info;
  std::function<void(const json&, RunConfig&, Issues&)> read;
  std::function<void(const RunConfig&, json&)> write;
};

template <class T>
Field field(const char* key, T RunConfig::*member, std::vector<std::string> choices = {}) {
  Field f;
  f.info = {key, type_name<T>(), choices};
  f.read = [key, member, choices](const json& j, RunConfig& c, Issues& issues) {
    const std::string path = std::string("/") + key;
    T value{};
    if (!ngame::read(j, value, path, issues)) return;
    if constexpr (std::is_same_v<T, std::string>) {
      if (!choices.empty() && std::find(choices.begin(), choices.end(), value) == choices.end()) {
        std::string list;
        for (const auto& ch : choices) list += (list.empty() ? "" : ", ") + ch;
        issues.push_back({path, "unknown value '" + value + "' (expected one of: " + list + ")"});
        return;
      }
    }
    c.*member = std::move(value);
  };
  f.write = [key, member](const RunConfig& c, json& j) { ngame::write(j, key, c.*member); };
  return f;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      field("schema_version", &RunConfig::schema_version),
      field("command", &RunConfig::command, {"meanfield", "recursive", "abm", "sweep", "scenario"}),
      field("scenario", &RunConfig::scenario, {"custom", "s0", "s1", "s2", "network_sym"}),
      field("m", &RunConfig::m),
      field("P", &RunConfig::P),
      field("x0", &RunConfig::x0),
      field("P_A", &RunConfig::P_A),
      field("P_tilde", &RunConfig::P_tilde),
      field("p0", &RunConfig::p0),
      field("sigma", &RunConfig::sigma),
      field("scenario_seed", &RunConfig::scenario_seed),
      field("variant", &RunConfig::variant, {"original", "listener_only"}),
      field("backend", &RunConfig::backend, {"full", "reduced", "recursive"}),
      field("t_end", &RunConfig::t_end),
      field("sample_dt", &RunConfig::sample_dt),
      field("steps", &RunConfig::steps),
      field("steady", &RunConfig::steady),
      field("eps", &RunConfig::eps),
      field("t_max", &RunConfig::t_max),
      field("rtol", &RunConfig::rtol),
      field("atol", &RunConfig::atol),
      field("recursive_eps", &RunConfig::recursive_eps),
      field("recursive_max_steps", &RunConfig::recursive_max_steps),
      field("network", &RunConfig::network, {"complete", "er", "sw", "sf"}),
      field("n", &RunConfig::n),
      field("avg_degree", &RunConfig::avg_degree),
      field("beta", &RunConfig::beta),
      field("network_seed", &RunConfig::network_seed),
      field("resample_network", &RunConfig::resample_network),
      field("sweeps", &RunConfig::sweeps),
      field("realizations", &RunConfig::realizations),
      field("seed", &RunConfig::seed),
      field("threads", &RunConfig::threads),
      field("realization_csv", &RunConfig::realization_csv),
      field("sweep", &RunConfig::sweep, {"critical", "curve", "tricritical", "bound", "abm", "heatmap"}),
      field("parameter", &RunConfig::parameter, {"", "P_B", "P_C", "p0", "P_tilde", "m", "avg_degree"}),
      field("values", &RunConfig::values),
      field("lo", &RunConfig::lo),
      field("hi", &RunConfig::hi),
      field("tol", &RunConfig::tol),
      field("delta_jump", &RunConfig::delta_jump),
      field("pb_lo", &RunConfig::pb_lo),
      field("pb_hi", &RunConfig::pb_hi),
      field("pb_tol", &RunConfig::pb_tol),
      field("grid_lo", &RunConfig::grid_lo),
      field("grid_hi", &RunConfig::grid_hi),
      field("grid_step", &RunConfig::grid_step),
      field("rows", &RunConfig::rows),
      field("cols", &RunConfig::cols),
      field("trials", &RunConfig::trials),
      field("max_draws", &RunConfig::max_draws),
      field("out", &RunConfig::out),
      field("metadata", &RunConfig::metadata),
  };
  return table;
}

void check_ranges(const RunConfig& c, Issues& issues) {
  auto need = [&](bool ok, const char* path, const char* message) {
    if (!ok) issues.push_back({path, message});
  };
  if (c.m) need(*c.m >= 1 && *c.m <= kMaxOpinions, "/m", "m must be in 1..31");
  for (std::size_t k = 0; k < c.P.size(); ++k)
    if (c.P[k] < 0) issues.push_back({"/P/" + std::to_string(k), "committed fraction must be non-negative"});
  for (std::size_t k = 0; k < c.x0.size(); ++k)
    if (c.x0[k] < 0) issues.push_back({"/x0/" + std::to_string(k), "density must be non-negative"});
  need(c.sigma > 0, "/sigma", "sigma must be positive");
  need(c.t_end >= 0, "/t_end", "t_end must be non-negative");
  need(c.sample_dt >= 0, "/sample_dt", "sample_dt must be non-negative");
  need(c.steps >= 0, "/steps", "steps must be non-negative");
  need(c.eps > 0, "/eps", "eps must be positive");
  need(c.t_max > 0, "/t_max", "t_max must be positive");
  need(c.rtol > 0, "/rtol", "rtol must be positive");
  need(c.atol > 0, "/atol", "atol must be positive");
  need(c.recursive_eps > 0, "/recursive_eps", "recursive_eps must be positive");
  need(c.recursive_max_steps > 0, "/recursive_max_steps", "recursive_max_steps must be positive");
  need(c.n >= 2, "/n", "n must be at least 2");
  need(c.avg_degree > 0, "/avg_degree", "avg_degree must be positive");
  need(c.beta >= 0 && c.beta <= 1, "/beta", "beta must be in [0, 1]");
  need(c.sweeps >= 0, "/sweeps", "sweeps must be non-negative");
  need(c.realizations >= 1, "/realizations", "realizations must be at least 1");
  need(c.threads >= 0, "/threads", "threads must be non-negative");
  need(c.lo < c.hi, "/hi", "bracket needs lo < hi");
  need(c.tol > 0, "/tol", "tol must be positive");
  need(c.delta_jump > 0, "/delta_jump", "delta_jump must be positive");
  need(c.pb_lo < c.pb_hi, "/pb_hi", "P_B bracket needs pb_lo < pb_hi");
  need(c.pb_tol > 0, "/pb_tol", "pb_tol must be positive");
  need(c.grid_step > 0, "/grid_step", "grid_step must be positive");
  need(c.grid_lo <= c.grid_hi, "/grid_hi", "grid needs grid_lo <= grid_hi");
  need(c.trials >= 1, "/trials", "trials must be at least 1");
  need(c.max_draws >= c.trials, "/max_draws", "max_draws must be at least trials");
  if (c.command == "sweep" && (c.sweep == "curve" || (c.sweep == "abm" && !c.parameter.empty()))) {
    need(!c.parameter.empty(), "/parameter", "curve sweeps need a parameter");
    need(!c.values.empty(), "/values", "curve sweeps need values");
  }
  if (c.command == "recursive" && c.variant != "listener_only")
    issues.push_back({"/variant", "the recursion implements the listener-only rule; set variant to listener_only"});
  if (c.command != "recursive" && c.backend == "recursive" && c.variant != "listener_only")
    issues.push_back({"/backend", "the recursive backend needs variant listener_only"});
  if (c.command == "meanfield" && c.backend == "recursive")
    issues.push_back({"/backend", "use the recursive command for the recursion"});
  if (c.command == "abm" && c.values.size() > 1 && !c.realization_csv.empty())
    issues.push_back({"/realization_csv", "per-realization output needs a single P_A value"});
  if (c.command == "sweep" && (c.sweep == "bound")) {
    need(c.m.has_value(), "/m", "bound sweeps need m");
    need(c.p0.has_value(), "/p0", "bound sweeps need p0");
  }
  if (c.command == "sweep" && c.sweep == "heatmap") {
    need(!c.rows.empty(), "/rows", "heatmap needs rows (m values)");
    need(!c.cols.empty(), "/cols", "heatmap needs cols (average degrees, 0 for complete)");
  }
}

// Scenarios that are fully determined by the config are built once here so
// infeasible allocations are reported before any work starts.
void check_scenarios(const RunConfig& c) {
  if (c.command == "meanfield" || c.command == "recursive" || c.command == "scenario" ||
      (c.command == "abm" && c.values.empty())) {
    build_scenario(c);
  } else if (c.command == "abm") {
    for (double v : c.values) build_scenario(c, v);
  }
}

}  // namespace

ConfigError::ConfigError(ErrorCode code, std::vector<ConfigIssue> issues)
    : Error(code, code_message(code, issues)), issues_(std::move(issues)) {}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const auto& f : fields()) k.push_back(f.info);
    return k;
  }();
  return keys;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(ErrorCode::Config, {{"", std::string("malformed JSON: ") + e.what()}});
  }
  if (!j.is_object()) throw ConfigError(ErrorCode::Config, {{"", "config must be a JSON object"}});
  // A run's metadata file carries the resolved config; accept it directly.
  if (j.contains("artifact_version") && j.contains("config") && j["config"].is_object()) j = j["config"];

  Issues issues;
  RunConfig c;
  std::set<std::string> known;
  for (const auto& f : fields()) {
    known.insert(f.info.key);
    if (auto it = j.find(f.info.key); it != j.end() && !it->is_null()) f.read(*it, c, issues);
  }
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) issues.push_back({"/" + key, "unknown key"});

  if (c.schema_version != kSchemaVersion) {
    issues.push_back({"/schema_version", "unsupported schema version " + std::to_string(c.schema_version) +
                                             " (this build reads " + std::to_string(kSchemaVersion) + ")"});
    throw ConfigError(ErrorCode::SchemaMismatch, issues);
  }
  check_ranges(c, issues);
  if (!issues.empty()) throw ConfigError(ErrorCode::Config, issues);

  {
    try {
      check_scenarios(c);
    } catch (const Error& e) {
      const ErrorCode code =
          e.code() == ErrorCode::InfeasibleScenario ? ErrorCode::InfeasibleScenario : ErrorCode::Config;
      throw ConfigError(code, {{"/scenario", std::string(to_string(e.code())) + ": " + e.what()}});
    }
  }
  return c;
}

std::string config_to_json(const RunConfig& config, int indent) {
  json j = json::object();
  for (const auto& f : fields()) f.write(config, j);
  // Keep the canonical key order rather than nlohmann's sorted map.
  std::string out = "{";
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent), ' ') : "";
  bool first = true;
  for (const auto& f : fields()) {
    auto it = j.find(f.info.key);
    if (it == j.end()) continue;
    out += (first ? "" : ",") + pad + json(f.info.key).dump() + (indent > 0 ? ": " : ":") + it->dump();
    first = false;
  }
  out += indent > 0 ? "\n}" : "}";
  return out;
}

ScenarioConfig build_scenario(const RunConfig& c, std::optional<double> P_A) {
  const std::optional<double> pa = P_A ? P_A : c.P_A;
  auto require_value = [](const std::optional<double>& v, const char* name) {
    if (!v) fail(ErrorCode::Config, std::string("scenario needs ") + name);
    return *v;
  };
  auto require_m = [&] {
    if (!c.m) fail(ErrorCode::Config, "scenario needs m");
    return *c.m;
  };
  if (c.scenario == "custom") {
    std::vector<double> P = c.P;
    const int m = c.m.value_or(static_cast<int>(P.size()));
    if (P.empty()) fail(ErrorCode::Config, "custom scenario needs P");
    if (static_cast<int>(P.size()) != m) fail(ErrorCode::InfeasibleScenario, "P must have length m");
    if (pa) P[0] = *pa;
    std::vector<double> x0 = c.x0;
    const double committed = std::accumulate(P.begin(), P.end(), 0.0);
    if (x0.empty()) {
      // Every uncommitted agent starts on B (or on A when m = 1).
      x0.assign(m, 0.0);
      x0[m > 1 ? 1 : 0] = 1.0 - committed;
    } else if (pa) {
      // P_A override: the uncommitted mass change is taken from B.
      x0[m > 1 ? 1 : 0] += c.P[0] - *pa;
    }
    if (static_cast<int>(x0.size()) != m) fail(ErrorCode::InfeasibleScenario, "x0 must have length m");
    if (committed >= 1.0) fail(ErrorCode::InfeasibleScenario, "committed fractions sum to 1 or more");
    return make_custom(std::move(P), std::move(x0));
  }
  if (c.scenario == "s1") return make_s1(require_m(), require_value(pa, "P_A"), require_value(c.P_tilde, "P_tilde"));
  if (c.scenario == "s2") return make_s2(require_m(), require_value(pa, "P_A"), require_value(c.P_tilde, "P_tilde"));
  if (c.scenario == "s0")
    return make_s0(require_m(), require_value(pa, "P_A"), require_value(c.P_tilde, "P_tilde"), c.sigma,
                   c.scenario_seed);
  if (c.scenario == "network_sym")
    return make_network_sym(require_m(), require_value(pa, "P_A"), require_value(c.p0, "p0"));
  fail(ErrorCode::Config, "unknown scenario '" + c.scenario + "'");
}

}  // namespace ngame

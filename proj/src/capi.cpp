#include "ngame/ngame.h"

#include <cstring>
#include <memory>

#include "json.hpp"
#include "ngame/config.hpp"
#include "ngame/io.hpp"
#include "ngame/meanfield.hpp"
#include "ngame/run.hpp"

struct ngame_config {
  ngame::RunConfig config;
};

struct ngame_result {
  ngame::RunResult result;
};

struct ngame_system {
  std::unique_ptr<ngame::FullSystem> system;
};

namespace {

thread_local std::string last_error;

int fail_with(int code, const std::string& message) {
  last_error = message;
  return code;
}

template <class F>
int guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return NGAME_OK;
  } catch (const ngame::Error& e) {
    return fail_with(static_cast<int>(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail_with(NGAME_CONFIG, std::string("config: ") + e.what());
  } catch (const std::bad_alloc&) {
    return fail_with(NGAME_RESOURCE_LIMIT, "out of memory");
  } catch (const std::exception& e) {
    return fail_with(NGAME_INTERNAL, e.what());
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* ngame_version(void) { return ngame::kArtifactVersion; }

const char* ngame_last_error(void) { return last_error.c_str(); }

int ngame_exit_status(int code) {
  if (code == NGAME_OK) return 0;
  if (code == NGAME_INTERNAL) return ngame::kStatusFailure;
  return ngame::status_for(static_cast<ngame::ErrorCode>(code));
}

void ngame_string_free(char* s) { std::free(s); }

int ngame_config_schema(char** json_out) {
  if (!json_out) return fail_with(NGAME_CONTRACT_VIOLATION, "null output pointer");
  return guarded([&] {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& k : ngame::config_keys()) j.push_back({{"key", k.key}, {"type", k.type}, {"choices", k.choices}});
    *json_out = copy_string(j.dump());
  });
}

int ngame_config_parse(const char* base, const char* overrides, ngame_config** out) {
  if (!out) return fail_with(NGAME_CONTRACT_VIOLATION, "null output pointer");
  *out = nullptr;
  return guarded([&] {
    std::string text = base ? base : "{}";
    if (overrides && *overrides) {
      nlohmann::json b, o;
      try {
        b = nlohmann::json::parse(text);
        o = nlohmann::json::parse(overrides);
      } catch (const nlohmann::json::parse_error& e) {
        throw ngame::ConfigError(ngame::ErrorCode::Config, {{"", std::string("malformed JSON: ") + e.what()}});
      }
      if (!b.is_object() || !o.is_object())
        throw ngame::ConfigError(ngame::ErrorCode::Config, {{"", "config must be a JSON object"}});
      if (b.contains("artifact_version") && b.contains("config") && b["config"].is_object()) b = b["config"];
      for (auto& [k, v] : o.items()) b[k] = v;
      text = b.dump();
    }
    auto handle = std::make_unique<ngame_config>();
    handle->config = ngame::parse_config(text);
    *out = handle.release();
  });
}

int ngame_config_to_json(const ngame_config* config, char** json_out) {
  if (!config || !json_out) return fail_with(NGAME_CONTRACT_VIOLATION, "null argument");
  return guarded([&] { *json_out = copy_string(ngame::config_to_json(config->config)); });
}

void ngame_config_free(ngame_config* config) { delete config; }

int ngame_run(const ngame_config* config, ngame_result** out) {
  if (!config || !out) return fail_with(NGAME_CONTRACT_VIOLATION, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<ngame_result>();
    handle->result = ngame::run(config->config);
    *out = handle.release();
  });
}

int ngame_result_status(const ngame_result* result) { return result ? result->result.status : -1; }

size_t ngame_result_warning_count(const ngame_result* result) { return result ? result->result.warnings.size() : 0; }

const char* ngame_result_warning(const ngame_result* result, size_t index) {
  if (!result || index >= result->result.warnings.size()) return nullptr;
  return result->result.warnings[index].c_str();
}

size_t ngame_result_output_count(const ngame_result* result) { return result ? result->result.outputs.size() : 0; }

const char* ngame_result_output(const ngame_result* result, size_t index) {
  if (!result || index >= result->result.outputs.size()) return nullptr;
  return result->result.outputs[index].c_str();
}

const char* ngame_result_metadata(const ngame_result* result) {
  return result ? result->result.metadata.c_str() : nullptr;
}

void ngame_result_free(ngame_result* result) { delete result; }

int ngame_render(const char* csv_path, const char* svg_path, char** warnings_json) {
  if (!csv_path || !svg_path) return fail_with(NGAME_CONTRACT_VIOLATION, "null path");
  return guarded([&] {
    const auto warnings = ngame::render_plot(csv_path, svg_path);
    if (warnings_json) *warnings_json = copy_string(nlohmann::json(warnings).dump());
  });
}

int ngame_meanfield_create(int m, const double* committed, ngame_variant variant, ngame_system** out) {
  if (!committed || !out) return fail_with(NGAME_CONTRACT_VIOLATION, "null argument");
  *out = nullptr;
  return guarded([&] {
    if (m < 1) ngame::fail(ngame::ErrorCode::ContractViolation, "m must be at least 1");
    auto handle = std::make_unique<ngame_system>();
    handle->system = ngame::build_system(
        m, std::vector<double>(committed, committed + m),
        variant == NGAME_LISTENER_ONLY ? ngame::RuleVariant::ListenerOnly : ngame::RuleVariant::Original);
    *out = handle.release();
  });
}

size_t ngame_meanfield_dimension(const ngame_system* system) { return system ? system->system->dimension() : 0; }

int ngame_meanfield_rhs(const ngame_system* system, const double* x, double* dxdt) {
  if (!system || !x || !dxdt) return fail_with(NGAME_CONTRACT_VIOLATION, "null argument");
  return guarded([&] {
    const auto n = system->system->dimension();
    system->system->rhs({x, n}, {dxdt, n});
  });
}

int ngame_meanfield_steady(const ngame_system* system, const double* x0, double eps, double t_max, double* n_out,
                           int* converged) {
  if (!system || !x0 || !n_out) return fail_with(NGAME_CONTRACT_VIOLATION, "null argument");
  return guarded([&] {
    const auto& sys = *system->system;
    const auto m = static_cast<std::size_t>(sys.opinions());
    const auto init = sys.pure_state(std::vector<double>(x0, x0 + m));
    ngame::SteadyStateOptions options;
    options.eps = eps;
    options.t_max = t_max;
    const auto ss = ngame::steady_state(sys, init, options);
    const auto n = sys.support(ss.x);
    std::copy(n.begin(), n.end(), n_out);
    if (converged) *converged = ss.converged ? 1 : 0;
  });
}

void ngame_meanfield_free(ngame_system* system) { delete system; }

}  // extern "C"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "ngame/ngame.h"

namespace fs = std::filesystem;

TEST_CASE("version and schema") {
  CHECK(std::string(ngame_version()) == "1.0.0");
  char* schema = nullptr;
  REQUIRE(ngame_config_schema(&schema) == NGAME_OK);
  const auto j = nlohmann::json::parse(schema);
  ngame_string_free(schema);
  bool found = false;
  for (const auto& k : j)
    if (k["key"] == "variant") {
      found = true;
      CHECK(k["choices"].size() == 2);
    }
  CHECK(found);
}

TEST_CASE("parse errors come back as codes") {
  ngame_config* c = nullptr;
  CHECK(ngame_config_parse(R"({"P": [0.8, 0.4]})", nullptr, &c) == NGAME_INFEASIBLE_SCENARIO);
  CHECK(c == nullptr);
  CHECK(std::string(ngame_last_error()).find("infeasible-scenario") != std::string::npos);
  CHECK(ngame_exit_status(NGAME_INFEASIBLE_SCENARIO) == 3);
  CHECK(ngame_config_parse(R"({"bad": 1})", nullptr, &c) == NGAME_CONFIG);
  CHECK(ngame_exit_status(NGAME_CONFIG) == 2);
  CHECK(ngame_config_parse("{", nullptr, &c) == NGAME_CONFIG);
  CHECK(ngame_config_parse(R"({"schema_version": 2})", nullptr, &c) == NGAME_SCHEMA_MISMATCH);
  CHECK(ngame_exit_status(NGAME_SCHEMA_MISMATCH) == 2);
  CHECK(ngame_config_parse("{}", "[1]", &c) == NGAME_CONFIG);
  CHECK(ngame_config_parse("{}", nullptr, nullptr) == NGAME_CONTRACT_VIOLATION);
}

TEST_CASE("overrides replace base keys") {
  ngame_config* c = nullptr;
  REQUIRE(ngame_config_parse(R"({"P": [0.8, 0.4]})", R"({"P": [0.1, 0.0], "t_end": 5})", &c) == NGAME_OK);
  char* text = nullptr;
  REQUIRE(ngame_config_to_json(c, &text) == NGAME_OK);
  const auto j = nlohmann::json::parse(text);
  ngame_string_free(text);
  CHECK(j["P"][0] == 0.1);
  CHECK(j["t_end"] == 5.0);
  ngame_config_free(c);
}

TEST_CASE("run through the C interface") {
  const fs::path out = fs::temp_directory_path() / ("ngame_capi_" + std::to_string(::getpid()) + ".csv");
  const nlohmann::json o = {{"P", {0.12, 0.0}}, {"t_end", 10.0}, {"out", out.string()}};
  ngame_config* c = nullptr;
  REQUIRE(ngame_config_parse("{}", o.dump().c_str(), &c) == NGAME_OK);
  ngame_result* r = nullptr;
  REQUIRE(ngame_run(c, &r) == NGAME_OK);
  CHECK(ngame_result_status(r) == 0);
  CHECK(ngame_result_output_count(r) == 1);
  CHECK(std::string(ngame_result_output(r, 0)) == out.string());
  CHECK(ngame_result_output(r, 5) == nullptr);
  CHECK(nlohmann::json::parse(ngame_result_metadata(r))["command"] == "meanfield");
  ngame_result_free(r);
  ngame_config_free(c);

  const fs::path svg = out.string() + ".svg";
  char* warnings = nullptr;
  REQUIRE(ngame_render(out.c_str(), svg.c_str(), &warnings) == NGAME_OK);
  CHECK(std::string(warnings) == "[]");
  ngame_string_free(warnings);
  CHECK(fs::exists(svg));
  CHECK(ngame_render("/nonexistent.csv", svg.c_str(), nullptr) == NGAME_IO);
}

TEST_CASE("mean-field handle") {
  const double P[2] = {0.11, 0.0};
  ngame_system* s = nullptr;
  REQUIRE(ngame_meanfield_create(2, P, NGAME_ORIGINAL, &s) == NGAME_OK);
  CHECK(ngame_meanfield_dimension(s) == 3);
  const double x[3] = {0.2, 0.5, 0.19};
  double dx[3];
  REQUIRE(ngame_meanfield_rhs(s, x, dx) == NGAME_OK);
  CHECK(std::abs(dx[0] + dx[1] + dx[2]) < 1e-15);
  // Two-opinion equations by hand: dA = -xA xB + xAB^2 + xAB xA + 1.5 PA xAB.
  CHECK(dx[0] == doctest::Approx(-0.1 + 0.19 * 0.19 + 0.19 * 0.2 + 1.5 * 0.11 * 0.19).epsilon(1e-12));
  const double x0[2] = {0.0, 0.89};
  double n[2];
  int converged = 0;
  REQUIRE(ngame_meanfield_steady(s, x0, 1e-10, 1e5, n, &converged) == NGAME_OK);
  CHECK(converged == 1);
  CHECK(n[0] > 0.95);
  ngame_meanfield_free(s);

  const double bad[2] = {0.6, 0.6};
  CHECK(ngame_meanfield_create(2, bad, NGAME_ORIGINAL, &s) == NGAME_INFEASIBLE_SCENARIO);
  const std::vector<double> many(25, 0.01);
  CHECK(ngame_meanfield_create(25, many.data(), NGAME_ORIGINAL, &s) == NGAME_RESOURCE_LIMIT);
}

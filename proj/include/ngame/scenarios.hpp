#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ngame {

enum class ScenarioKind { Custom, S0, S1, S2, NetworkSym };

const char* to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& text);

/// Committed fractions and initial pure-state allocation of the uncommitted
/// agents.  Opinion 0 is A; for the complete-graph scenarios opinion 1 is B,
/// which initially holds every uncommitted agent.
struct ScenarioConfig {
  int m = 0;
  std::vector<double> P;
  std::vector<double> x0;
  ScenarioKind label = ScenarioKind::Custom;

  // Generator parameters, kept for metadata.
  double P_A = 0.0;
  double P_tilde = 0.0;
  double p0 = 0.0;
  std::optional<double> p1, p2, sigma;
  std::optional<int> n1;
  std::optional<std::uint64_t> seed;

  double committed_total() const;
  /// Throws InfeasibleScenario on a violated invariant.
  void validate() const;
};

ScenarioConfig make_custom(std::vector<double> P, std::vector<double> x0);
ScenarioConfig make_s1(int m, double P_A, double P_tilde);
ScenarioConfig make_s2(int m, double P_A, double P_tilde);
ScenarioConfig make_s0(int m, double P_A, double P_tilde, double sigma, std::uint64_t seed);
ScenarioConfig make_network_sym(int m, double P_A, double p0);

/// Standard deviation of the committed fractions of opinions 2..m-1.
double minority_sd(const ScenarioConfig& s);

/// Agent counts for a population of n agents.
struct AgentCounts {
  std::vector<int> committed;    // per opinion
  std::vector<int> uncommitted;  // per opinion, initially pure supporters
};

/// Largest-remainder apportionment of the scenario's fractions to n agents.
/// Committed entries precede uncommitted ones; ties go to the lower index.
AgentCounts apportion(const ScenarioConfig& s, int n);

}  // namespace ngame

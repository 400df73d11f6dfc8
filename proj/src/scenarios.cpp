#include "ngame/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ngame/error.hpp"

namespace ngame {

const char* to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Custom: return "custom";
    case ScenarioKind::S0: return "s0";
    case ScenarioKind::S1: return "s1";
    case ScenarioKind::S2: return "s2";
    case ScenarioKind::NetworkSym: return "network_sym";
  }
  return "custom";
}

ScenarioKind parse_scenario_kind(const std::string& text) {
  for (auto k : {ScenarioKind::Custom, ScenarioKind::S0, ScenarioKind::S1, ScenarioKind::S2, ScenarioKind::NetworkSym})
    if (text == to_string(k)) return k;
  fail(ErrorCode::Config, "unknown scenario kind '" + text + "'");
}

double ScenarioConfig::committed_total() const { return std::accumulate(P.begin(), P.end(), 0.0); }

void ScenarioConfig::validate() const {
  if (m < 1) fail(ErrorCode::InfeasibleScenario, "scenario needs at least one opinion");
  if (P.size() != static_cast<std::size_t>(m) || x0.size() != static_cast<std::size_t>(m))
    fail(ErrorCode::InfeasibleScenario, "P and x0 must both have length m");
  for (std::size_t k = 0; k < P.size(); ++k)
    if (!(P[k] >= 0.0) || !(x0[k] >= 0.0)) fail(ErrorCode::InfeasibleScenario, "fractions must be non-negative");
  if (committed_total() >= 1.0) fail(ErrorCode::InfeasibleScenario, "committed fractions sum to 1 or more");
  const double total = committed_total() + std::accumulate(x0.begin(), x0.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) fail(ErrorCode::InfeasibleScenario, "P and x0 must sum to 1");
}

ScenarioConfig make_custom(std::vector<double> P, std::vector<double> x0) {
  ScenarioConfig s;
  s.m = static_cast<int>(P.size());
  s.P = std::move(P);
  s.x0 = std::move(x0);
  s.P_A = s.P.empty() ? 0.0 : s.P[0];
  s.validate();
  return s;
}

namespace {

ScenarioConfig minority_base(int m, double P_A, double P_tilde, ScenarioKind kind) {
  if (m < 3) fail(ErrorCode::InfeasibleScenario, "scenario needs m >= 3 (A, B and at least one minority opinion)");
  if (P_A < 0 || P_tilde < 0) fail(ErrorCode::InfeasibleScenario, "committed fractions must be non-negative");
  if (P_A + P_tilde >= 1.0) fail(ErrorCode::InfeasibleScenario, "P_A + P_tilde must be below 1");
  ScenarioConfig s;
  s.m = m;
  s.label = kind;
  s.P_A = P_A;
  s.P_tilde = P_tilde;
  s.p0 = P_tilde / (m - 2);
  s.P.assign(m, 0.0);
  s.P[0] = P_A;
  s.x0.assign(m, 0.0);
  s.x0[1] = 1.0 - P_A - P_tilde;
  return s;
}

}  // namespace

ScenarioConfig make_s1(int m, double P_A, double P_tilde) {
  ScenarioConfig s = minority_base(m, P_A, P_tilde, ScenarioKind::S1);
  for (int o = 2; o < m; ++o) s.P[o] = s.p0;
  return s;
}

ScenarioConfig make_s2(int m, double P_A, double P_tilde) {
  ScenarioConfig s = minority_base(m, P_A, P_tilde, ScenarioKind::S2);
  const double p1 = P_A - 1e-3;
  if (p1 <= 0.0) fail(ErrorCode::InfeasibleScenario, "S2 needs P_A > 1e-3 so that p1 = P_A - 1e-3 is positive");
  const int n1 = static_cast<int>(std::floor(P_tilde / p1));
  if (m - n1 - 3 < 0) {
    fail(ErrorCode::InfeasibleScenario, "S2 constraint m - n1 - 3 >= 0 violated (m=" + std::to_string(m) +
                                            ", n1=" + std::to_string(n1) + ")");
  }
  const double p2 = P_tilde - n1 * p1;
  for (int k = 0; k < n1; ++k) s.P[2 + k] = p1;
  s.P[2 + n1] = p2;
  s.p1 = p1;
  s.p2 = p2;
  s.n1 = n1;
  return s;
}

ScenarioConfig make_s0(int m, double P_A, double P_tilde, double sigma, std::uint64_t seed) {
  ScenarioConfig s = minority_base(m, P_A, P_tilde, ScenarioKind::S0);
  if (!(sigma > 0.0)) fail(ErrorCode::InfeasibleScenario, "S0 needs sigma > 0");
  s.sigma = sigma;
  s.seed = seed;
  const int k = m - 2;
  if (P_tilde == 0.0) return s;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(s.p0, sigma);
  std::vector<double> draw(k);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (double& v : draw) {
      do v = gauss(rng);
      while (v < 0.0 || v > P_tilde);
    }
    const double sum = std::accumulate(draw.begin(), draw.end(), 0.0);
    if (sum <= 0.0) continue;
    double partial = 0.0;
    for (int i = 0; i + 1 < k; ++i) {
      draw[i] *= P_tilde / sum;
      partial += draw[i];
    }
    draw[k - 1] = std::max(0.0, P_tilde - partial);
    if (*std::max_element(draw.begin(), draw.end()) < P_A) {
      std::copy(draw.begin(), draw.end(), s.P.begin() + 2);
      return s;
    }
  }
  fail(ErrorCode::InfeasibleScenario, "S0: no draw with every minority fraction below P_A after 1000 resamples");
}

ScenarioConfig make_network_sym(int m, double P_A, double p0) {
  if (m < 2) fail(ErrorCode::InfeasibleScenario, "network scenario needs m >= 2");
  if (P_A < 0 || p0 < 0) fail(ErrorCode::InfeasibleScenario, "committed fractions must be non-negative");
  const double P_tilde = (m - 1) * p0;
  if (P_A + P_tilde > 1.0 + 1e-12) fail(ErrorCode::InfeasibleScenario, "P_A + (m-1) p0 exceeds 1");
  ScenarioConfig s;
  s.m = m;
  s.label = ScenarioKind::NetworkSym;
  s.P_A = P_A;
  s.p0 = p0;
  s.P_tilde = P_tilde;
  s.P.assign(m, p0);
  s.P[0] = P_A;
  const double each = std::max(0.0, 1.0 - P_A - P_tilde) / (m - 1);
  s.x0.assign(m, each);
  s.x0[0] = 0.0;
  return s;
}

double minority_sd(const ScenarioConfig& s) {
  if (s.m < 3) return 0.0;
  const auto first = s.P.begin() + 2;
  const double k = s.m - 2;
  const double mean = std::accumulate(first, s.P.end(), 0.0) / k;
  double var = 0.0;
  for (auto it = first; it != s.P.end(); ++it) var += (*it - mean) * (*it - mean);
  return std::sqrt(var / k);
}

AgentCounts apportion(const ScenarioConfig& s, int n) {
  if (n < 1) fail(ErrorCode::InfeasibleScenario, "population must be positive");
  std::vector<double> f(s.P);
  f.insert(f.end(), s.x0.begin(), s.x0.end());
  std::vector<int> count(f.size());
  std::vector<double> rem(f.size());
  int assigned = 0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    double q = f[k] * n;
    if (std::abs(q - std::round(q)) < 1e-9) q = std::round(q);
    count[k] = static_cast<int>(std::floor(q));
    rem[k] = q - count[k];
    assigned += count[k];
  }
  std::vector<std::size_t> order(f.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < n && k < order.size(); ++k, ++assigned) ++count[order[k]];

  AgentCounts out;
  out.committed.assign(count.begin(), count.begin() + s.m);
  out.uncommitted.assign(count.begin() + s.m, count.end());
  return out;
}

}  // namespace ngame

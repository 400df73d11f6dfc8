#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ngame/network.hpp"
#include "ngame/opinion.hpp"
#include "ngame/rng.hpp"
#include "ngame/scenarios.hpp"

namespace ngame {

struct Population {
  std::vector<OpinionSet> states;
  std::vector<std::int8_t> committed;  // committed opinion, or -1

  bool is_committed(int agent) const { return committed[agent] >= 0; }
};

/// Places committed agents uniformly at random, then fills the remaining nodes
/// with pure supporters according to the apportioned scenario counts.
Population place_agents(const ScenarioConfig& scenario, int n, Xoshiro256& rng);

struct RealizationOptions {
  RuleVariant variant = RuleVariant::Original;
  int sweeps = 1000;  // T: interactions per agent on average
  bool record_series = true;
  /// Re-checks every committed agent after each interaction (slow; tests).
  bool audit_committed = false;
};

struct Realization {
  std::vector<std::vector<double>> series;  // n_i at sweeps 0..T
  std::vector<double> final_n;
  Population final_population;
  std::uint64_t isolated_redraws = 0;
  std::uint64_t committed_violations = 0;
};

/// N * T elementary steps: a uniformly random speaker (isolated nodes are
/// redrawn) talks to a uniformly random neighbour.
Realization run_realization(const Network& network, const ScenarioConfig& scenario, const RealizationOptions& options,
                            Xoshiro256 rng);

/// Fraction of agents (committed included) whose state is exactly {i}.
std::vector<double> support_fractions(const Population& population, int m);

struct NetworkSpec {
  NetworkKind kind = NetworkKind::ER;
  int n = 1000;
  NetworkParams params;
  std::uint64_t seed = 0;
  /// Draw a fresh graph (seed + realization index) for every realization
  /// instead of reusing one graph.
  bool resample = false;
};

struct EnsembleOptions {
  RealizationOptions realization;
  int realizations = 50;  // L
  std::uint64_t seed = 1;
  int threads = 0;  // 0: NGAME_THREADS or hardware concurrency
  bool keep_series = false;
};

struct EnsembleStats {
  std::vector<double> mean_n;  // <n_i>
  std::vector<double> R;       // fraction of realizations dominated by i
  int L = 0;
  std::vector<std::vector<double>> finals;
  std::vector<int> dominant;
  int ties = 0;
  std::uint64_t isolated_redraws = 0;
  std::uint64_t committed_violations = 0;
  std::vector<std::vector<std::vector<double>>> series;  // per realization, when kept
};

/// Dominant opinion of a final state: argmax n_i, ties to the lowest index.
int dominant_opinion(const std::vector<double>& n, bool* tie = nullptr);

EnsembleStats ensemble(const NetworkSpec& network, const ScenarioConfig& scenario, const EnsembleOptions& options);

/// Worker count from NGAME_THREADS, else hardware concurrency.
int default_threads();

/// Runs body(0..count-1) on up to `threads` workers.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

}  // namespace ngame

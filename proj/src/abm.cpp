#include "ngame/abm.hpp"

#include <atomic>
#include <bit>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "ngame/error.hpp"

namespace ngame {

Population place_agents(const ScenarioConfig& scenario, int n, Xoshiro256& rng) {
  scenario.validate();
  const AgentCounts counts = apportion(scenario, n);
  std::vector<int> order(n);
  for (int v = 0; v < n; ++v) order[v] = v;
  for (int v = n - 1; v > 0; --v) std::swap(order[v], order[rng.below(static_cast<std::uint32_t>(v + 1))]);

  Population pop{std::vector<OpinionSet>(n), std::vector<std::int8_t>(n, -1)};
  int next = 0;
  for (int o = 0; o < scenario.m; ++o) {
    for (int k = 0; k < counts.committed[o]; ++k, ++next) {
      pop.states[order[next]] = OpinionSet::single(o);
      pop.committed[order[next]] = static_cast<std::int8_t>(o);
    }
  }
  for (int o = 0; o < scenario.m; ++o)
    for (int k = 0; k < counts.uncommitted[o]; ++k, ++next) pop.states[order[next]] = OpinionSet::single(o);
  require(next == n, "apportioned counts do not cover the population");
  return pop;
}

std::vector<double> support_fractions(const Population& population, int m) {
  std::vector<double> n(m, 0.0);
  for (OpinionSet s : population.states)
    if (s.is_single()) n[std::countr_zero(s.mask())] += 1.0;
  for (double& v : n) v /= static_cast<double>(population.states.size());
  return n;
}

namespace {

OpinionId pick_member(OpinionSet s, Xoshiro256& rng) {
  auto mask = s.mask();
  if (std::has_single_bit(mask)) return std::countr_zero(mask);
  for (auto k = rng.below(static_cast<std::uint32_t>(std::popcount(mask))); k > 0; --k) mask &= mask - 1;
  return std::countr_zero(mask);
}

}  // namespace

Realization run_realization(const Network& network, const ScenarioConfig& scenario, const RealizationOptions& options,
                            Xoshiro256 rng) {
  const int n = network.size();
  const int m = scenario.m;
  if (m > kMaxOpinions) fail(ErrorCode::ResourceLimit, "too many opinions for the agent encoding");
  Population pop = place_agents(scenario, n, rng);

  bool any_speaker = false;
  for (int v = 0; v < n && !any_speaker; ++v) any_speaker = network.degree(v) > 0;
  if (!any_speaker) fail(ErrorCode::InfeasibleScenario, "network has no edges");

  std::vector<long long> pure(m, 0);
  for (OpinionSet s : pop.states)
    if (s.is_single()) ++pure[std::countr_zero(s.mask())];
  auto snapshot = [&] {
    std::vector<double> out(m);
    for (int o = 0; o < m; ++o) out[o] = static_cast<double>(pure[o]) / n;
    return out;
  };
  auto retire = [&](OpinionSet s, int d) {
    if (s.is_single()) pure[std::countr_zero(s.mask())] += d;
  };

  Realization out;
  if (options.record_series) out.series.push_back(snapshot());
  const bool complete = network.implicit_complete();
  for (int sweep = 0; sweep < options.sweeps; ++sweep) {
    for (int step = 0; step < n; ++step) {
      int speaker = static_cast<int>(rng.below(static_cast<std::uint32_t>(n)));
      while (network.degree(speaker) == 0) {
        ++out.isolated_redraws;
        speaker = static_cast<int>(rng.below(static_cast<std::uint32_t>(n)));
      }
      int listener;
      if (complete) {
        listener = static_cast<int>(rng.below(static_cast<std::uint32_t>(n - 1)));
        if (listener >= speaker) ++listener;
      } else {
        const auto nb = network.neighbors(speaker);
        listener = nb[rng.below(static_cast<std::uint32_t>(nb.size()))];
      }

      const OpinionSet sp = pop.states[speaker];
      const OpinionSet li = pop.states[listener];
      const OpinionId word = pick_member(sp, rng);
      const InteractionOutcome r = apply_interaction(sp, li, word, options.variant, pop.is_committed(speaker),
                                                     pop.is_committed(listener));
      if (r.new_speaker != sp) {
        retire(sp, -1);
        retire(r.new_speaker, +1);
        pop.states[speaker] = r.new_speaker;
      }
      if (r.new_listener != li) {
        retire(li, -1);
        retire(r.new_listener, +1);
        pop.states[listener] = r.new_listener;
      }
      if (options.audit_committed) {
        for (int a : {speaker, listener})
          if (pop.is_committed(a) && pop.states[a] != OpinionSet::single(pop.committed[a])) ++out.committed_violations;
      }
    }
    if (options.record_series) out.series.push_back(snapshot());
  }
  out.final_n = snapshot();
  out.final_population = std::move(pop);
  return out;
}

int dominant_opinion(const std::vector<double>& n, bool* tie) {
  int best = 0;
  bool tied = false;
  for (int o = 1; o < static_cast<int>(n.size()); ++o) {
    if (n[o] > n[best]) {
      best = o;
      tied = false;
    } else if (n[o] == n[best]) {
      tied = true;
    }
  }
  if (tie) *tie = tied;
  return best;
}

int default_threads() {
  if (const char* env = std::getenv("NGAME_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) threads = default_threads();
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

EnsembleStats ensemble(const NetworkSpec& spec, const ScenarioConfig& scenario, const EnsembleOptions& options) {
  if (options.realizations < 1) fail(ErrorCode::ContractViolation, "ensemble needs at least one realization");
  const int L = options.realizations;
  const int m = scenario.m;

  std::vector<Xoshiro256> streams;
  Xoshiro256 master(options.seed);
  for (int r = 0; r < L; ++r) {
    streams.push_back(master);
    master.jump();
  }
  const Network shared = spec.resample ? Network{} : gen_network(spec.kind, spec.n, spec.params, spec.seed);

  std::vector<Realization> runs(L);
  RealizationOptions ropt = options.realization;
  ropt.record_series = options.keep_series;
  parallel_for(L, options.threads, [&](int r) {
    if (spec.resample) {
      const Network g = gen_network(spec.kind, spec.n, spec.params, spec.seed + static_cast<std::uint64_t>(r));
      runs[r] = run_realization(g, scenario, ropt, streams[r]);
    } else {
      runs[r] = run_realization(shared, scenario, ropt, streams[r]);
    }
  });

  EnsembleStats st;
  st.L = L;
  st.mean_n.assign(m, 0.0);
  st.R.assign(m, 0.0);
  for (auto& run : runs) {
    bool tie = false;
    const int d = dominant_opinion(run.final_n, &tie);
    st.dominant.push_back(d);
    st.ties += tie ? 1 : 0;
    st.R[d] += 1.0 / L;
    for (int o = 0; o < m; ++o) st.mean_n[o] += run.final_n[o] / L;
    st.isolated_redraws += run.isolated_redraws;
    st.committed_violations += run.committed_violations;
    st.finals.push_back(run.final_n);
    if (options.keep_series) st.series.push_back(std::move(run.series));
  }
  return st;
}

}  // namespace ngame

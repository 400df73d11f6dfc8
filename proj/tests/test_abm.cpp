#include "doctest.h"
#include "ngame/abm.hpp"
#include "ngame/meanfield.hpp"

using namespace ngame;

TEST_CASE("placement honours the apportioned counts") {
  const auto s = make_network_sym(5, 0.03, 0.01);
  Xoshiro256 rng(4);
  const auto pop = place_agents(s, 1000, rng);
  std::vector<int> committed(5, 0), pure(5, 0);
  for (int a = 0; a < 1000; ++a) {
    if (pop.is_committed(a)) {
      ++committed[pop.committed[a]];
      CHECK(pop.states[a] == OpinionSet::single(pop.committed[a]));
    } else {
      REQUIRE(pop.states[a].is_single());
      ++pure[std::countr_zero(pop.states[a].mask())];
    }
  }
  CHECK(committed == std::vector<int>{30, 10, 10, 10, 10});
  CHECK(pure == std::vector<int>{0, 233, 233, 232, 232});
}

TEST_CASE("committed agents never change and runs are reproducible") {
  const auto s = make_network_sym(4, 0.05, 0.02);
  const auto g = gen_network(NetworkKind::ER, 400, {.avg_degree = 4.0}, 7);
  RealizationOptions opt{.variant = RuleVariant::Original, .sweeps = 50, .audit_committed = true};
  const auto a = run_realization(g, s, opt, Xoshiro256(99));
  const auto b = run_realization(g, s, opt, Xoshiro256(99));
  CHECK(a.committed_violations == 0u);
  CHECK(a.series.size() == 51u);
  CHECK(a.series == b.series);
  CHECK(a.final_n == support_fractions(a.final_population, 4));
  for (int v = 0; v < 400; ++v) {
    CHECK_FALSE(a.final_population.states[v].empty());
    if (a.final_population.is_committed(v))
      CHECK(a.final_population.states[v] == OpinionSet::single(a.final_population.committed[v]));
  }
}

TEST_CASE("isolated speakers are redrawn") {
  // Sparse ER leaves some nodes without neighbours.
  const auto g = gen_network(NetworkKind::ER, 200, {.avg_degree = 1.0}, 1);
  int isolated = 0;
  for (int v = 0; v < 200; ++v) isolated += g.degree(v) == 0;
  REQUIRE(isolated > 0);
  const auto r = run_realization(g, make_network_sym(2, 0.1, 0.0), {.sweeps = 5}, Xoshiro256(3));
  CHECK(r.isolated_redraws > 0u);
}

TEST_CASE("ensemble statistics") {
  const auto s = make_network_sym(3, 0.1, 0.01);
  NetworkSpec net{.kind = NetworkKind::ER, .n = 200, .params = {.avg_degree = 6.0}, .seed = 2};
  EnsembleOptions opt{.realization = {.sweeps = 30}, .realizations = 6, .seed = 5, .threads = 1};
  const auto st = ensemble(net, s, opt);
  double rsum = 0.0;
  for (double r : st.R) {
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
    rsum += r;
  }
  CHECK(rsum == doctest::Approx(1.0));

  opt.threads = 3;
  const auto threaded = ensemble(net, s, opt);
  CHECK(threaded.finals == st.finals);

  opt.realizations = 1;
  const auto single = ensemble(net, s, opt);
  CHECK(single.mean_n == single.finals[0]);
}

TEST_CASE("dominance tie-break") {
  bool tie = false;
  CHECK(dominant_opinion({0.3, 0.3, 0.1}, &tie) == 0);
  CHECK(tie);
  CHECK(dominant_opinion({0.1, 0.5, 0.2}, &tie) == 1);
  CHECK_FALSE(tie);
}

TEST_CASE("complete graph agrees with the mean-field steady state") {
  const int n = 10000;
  for (double PA : {0.06, 0.12}) {
    const auto s = make_network_sym(2, PA, 0.0);
    const auto r = run_realization(Network::complete(n), s, {.sweeps = 1000, .record_series = false}, Xoshiro256(8));
    FullSystem sys(2, s.P, RuleVariant::Original);
    const auto ss = steady_state(sys, sys.pure_state(s.x0));
    CHECK(std::abs(r.final_n[0] - observables(sys, ss.x)[0]) < 0.05);
  }
}

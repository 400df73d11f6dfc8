#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "ngame/meanfield.hpp"
#include "ngame/recursive.hpp"

using namespace ngame;

namespace {

struct Random {
  std::mt19937_64 gen;
  std::uniform_real_distribution<double> u{0.0, 1.0};
  explicit Random(std::uint64_t seed) : gen(seed) {}
  double operator()() { return u(gen); }
};

// Committed fractions and pure-state densities summing to one.
void random_allocation(int m, Random& rnd, std::vector<double>& P, std::vector<double>& x0) {
  P.assign(m, 0.0);
  x0.assign(m, 0.0);
  double sum = 0.0;
  for (int o = 0; o < m; ++o) {
    sum += P[o] = 0.1 * rnd();
    sum += x0[o] = rnd();
  }
  for (int o = 0; o < m; ++o) P[o] /= sum, x0[o] /= sum;
}

// Ordered tuples of distinct heard opinions, enumerated explicitly.
std::vector<double> brute_force_mixed(std::span<const double> origin, const std::vector<std::vector<double>>& q) {
  const int m = static_cast<int>(origin.size());
  const int n = static_cast<int>(q.size());
  std::vector<double> out(m, 0.0);
  std::vector<int> seq;
  std::function<void(int, std::uint32_t, double)> rec = [&](int j, std::uint32_t used, double w) {
    if (static_cast<int>(seq.size()) == n) {
      for (int i = 0; i < m; ++i)
        if (used >> i & 1u) out[i] += origin[j] * w;
      return;
    }
    for (int o = 0; o < m; ++o) {
      if (used >> o & 1u) continue;
      seq.push_back(o);
      rec(j, used | (1u << o), w * q[seq.size() - 1][o]);
      seq.pop_back();
    }
  };
  for (int j = 0; j < m; ++j) rec(j, 1u << j, 1.0);
  return out;
}

}  // namespace

TEST_CASE("ordered-tuple sum matches brute force enumeration") {
  Random rnd(5);
  for (int m = 2; m <= 5; ++m) {
    OpinionGroups singletons;
    for (int o = 0; o < m; ++o) singletons.push_back({o});
    for (int n = 1; n < m; ++n) {
      std::vector<double> origin(m);
      for (auto& v : origin) v = rnd();
      std::vector<std::vector<double>> q(n, std::vector<double>(m));
      for (auto& row : q)
        for (auto& v : row) v = rnd();
      std::vector<std::span<const double>> qs(q.begin(), q.end());
      const auto dp = mixed_length_densities(singletons, origin, qs);
      const auto ref = brute_force_mixed(origin, q);
      for (int i = 0; i < m; ++i) CHECK(dp[i] == doctest::Approx(ref[i]).epsilon(1e-13));
    }
  }
}

TEST_CASE("grouped evaluation matches the ungrouped one") {
  const int m = 6;
  const std::vector<double> origin{0.1, 0.2, 0.05, 0.05, 0.05, 0.3};
  std::vector<std::vector<double>> q{{0.3, 0.1, 0.2, 0.2, 0.2, 0.05}, {0.1, 0.4, 0.1, 0.1, 0.1, 0.2},
                                     {0.2, 0.2, 0.15, 0.15, 0.15, 0.1}};
  std::vector<std::span<const double>> qs(q.begin(), q.end());
  OpinionGroups grouped{{0}, {1}, {2, 3, 4}, {5}};
  OpinionGroups singletons;
  for (int o = 0; o < m; ++o) singletons.push_back({o});
  const auto a = mixed_length_densities(grouped, origin, qs);
  const auto b = mixed_length_densities(singletons, origin, qs);
  for (int i = 0; i < m; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
}

TEST_CASE("transmission probabilities") {
  SUBCASE("monoculture") {
    RecursiveEngine e({0.2, 0.0}, {0.8, 0.0});
    CHECK(e.transmission()[0] == doctest::Approx(1.0));
  }
  SUBCASE("two-opinion hand value on the full state") {
    FullDiscreteState s{{0.3, 0.3, 0.2}, {0.1, 0.1}};
    const auto Q = full_transmission(s);
    CHECK(Q[0] == doctest::Approx(0.5));
    CHECK(Q[1] == doctest::Approx(0.5));
  }
  SUBCASE("probabilities sum to one") {
    Random rnd(9);
    std::vector<double> P, x0;
    random_allocation(4, rnd, P, x0);
    RecursiveEngine e(P, x0);
    for (int t = 0; t < 100; ++t) {
      const auto Q = transmission_probabilities(e);
      double sum = 0.0;
      for (double q : Q) sum += q;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
      e.step();
    }
  }
}

TEST_CASE("oracle step reproduces the two-opinion mixed update") {
  FullDiscreteState s{{0.3, 0.4, 0.1}, {0.15, 0.05}};
  const auto Q = full_transmission(s);
  const auto next = oracle_step(s);
  CHECK(next.x[2] == doctest::Approx(0.3 * Q[1] + 0.4 * Q[0]).epsilon(1e-15));
  double total = 0.0;
  for (double v : next.x) total += v;
  CHECK(total == doctest::Approx(0.8).epsilon(1e-15));

  FullDiscreteState consensus{{0.0, 0.9, 0.0}, {0.0, 0.1}};
  CHECK(oracle_step(consensus).x == consensus.x);
}

TEST_CASE("recursion matches the full-state oracle") {
  Random rnd(17);
  for (int m = 2; m <= 5; ++m) {
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<double> P, x0;
      random_allocation(m, rnd, P, x0);
      RecursiveEngine e(P, x0);
      auto full = full_discrete_from_pure(P, x0);
      double drift = 0.0, mass = 0.0;
      for (int t = 0; t < 1000; ++t) {
        e.step();
        full = oracle_step(full);
        for (int i = 0; i < m; ++i) {
          drift = std::max(drift, std::abs(e.single()[i] - full.x[OpinionSet::single(i).index()]));
          for (int n = 1; n < m; ++n) {
            double agg = 0.0;
            for (std::size_t k = 0; k < full.x.size(); ++k) {
              const auto s = OpinionSet::from_index(k);
              if (s.size() == n + 1 && s.contains(i)) agg += full.x[k];
            }
            drift = std::max(drift, std::abs(e.mixed(i, n) - agg));
          }
        }
        mass = std::max(mass, std::abs(e.total_mass() - 1.0));
      }
      CHECK(drift < 1e-12);
      CHECK(mass < 1e-10);
    }
  }
}

TEST_CASE("fixed points") {
  RecursiveEngine mono({0.0, 0.0, 0.0}, {0.0, 1.0, 0.0});
  const auto ss = steady_state_recursive(mono);
  CHECK(ss.converged);
  CHECK(ss.state.time() == 0);
  mono.step();
  CHECK(mono.single()[1] == 1.0);
}

TEST_CASE("steady state agrees with oracle iteration") {
  Random rnd(23);
  std::vector<double> P, x0;
  random_allocation(4, rnd, P, x0);
  const auto ss = steady_state_recursive(RecursiveEngine(P, x0));
  REQUIRE(ss.converged);
  auto full = full_discrete_from_pure(P, x0);
  for (std::int64_t t = 0; t < ss.state.time(); ++t) full = oracle_step(full);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(ss.state.single()[i] - full.x[OpinionSet::single(i).index()]) < 1e-10);
}

TEST_CASE("storage grows quadratically") {
  for (int m : {4, 8, 16, 24}) {
    std::vector<double> P(m, 0.01), x0(m, 0.0);
    x0[1] = 1.0 - 0.01 * m;
    RecursiveEngine e(P, x0);
    CHECK(e.stored_values() <= static_cast<std::size_t>(4 * m * m + 8 * m));
  }
}

TEST_CASE("six-opinion recursion reaches the listener-only ODE steady state") {
  const std::vector<double> P{0.1, 0.0, 0.025, 0.025, 0.025, 0.025}, x0{0.0, 0.8, 0.0, 0.0, 0.0, 0.0};
  const auto rec = steady_state_recursive(RecursiveEngine(P, x0));
  REQUIRE(rec.converged);
  FullSystem sys(6, P, RuleVariant::ListenerOnly);
  const auto ode = steady_state(sys, sys.pure_state(x0));
  REQUIRE(ode.converged);
  const auto n = observables(sys, ode.x);
  for (int i = 0; i < 6; ++i) CHECK(std::abs(rec.state.single()[i] + P[i] - n[i]) < 1e-3);
}

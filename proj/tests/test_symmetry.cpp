#include <cmath>
#include <random>

#include "doctest.h"
#include "ngame/error.hpp"
#include "ngame/scenarios.hpp"
#include "ngame/symmetry.hpp"

using namespace ngame;

namespace {

OpinionClassPartition s1_partition(int m, double P_A, double P_tilde) {
  const auto s = make_s1(m, P_A, P_tilde);
  return OpinionClassPartition::from_allocation(s.P, s.x0);
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

}  // namespace

TEST_CASE("S1 orbit dimension is 4m-5") {
  for (int m = 3; m <= 30; ++m) {
    ReducedSystem sys(s1_partition(m, 0.1, 0.12), RuleVariant::Original);
    CHECK(sys.dimension() == static_cast<std::size_t>(4 * m - 5));
  }
}

TEST_CASE("singleton classes give the identity reduction") {
  const std::vector<double> P{0.1, 0.0, 0.03, 0.02}, x0{0.0, 0.85, 0.0, 0.0};
  OpinionClassPartition part;
  for (int o = 0; o < 4; ++o) part.classes.push_back({1, P[o], x0[o], {o}});
  part.validate();
  ReducedSystem red(part, RuleVariant::Original);
  FullSystem full(4, P, RuleVariant::Original);
  CHECK(red.dimension() == 15u);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(15);
  double sum = 0.0;
  for (auto& v : x) sum += v = u(gen);
  for (auto& v : x) v *= 0.85 / sum;
  const auto y = project(red, DensityVector{x, P});
  std::vector<double> dx(15), dy(15);
  full.rhs(x, dx);
  red.rhs(y, dy);
  const auto lifted = lift(red, dy);
  CHECK(max_diff(lifted.x, dx) < 1e-14);
}

TEST_CASE("lift and project round trips") {
  const auto part = s1_partition(5, 0.08, 0.09);
  ReducedSystem red(part, RuleVariant::Original);

  SUBCASE("pure all-B initial condition is a single orbit") {
    const auto y = red.initial_state();
    int nonzero = 0;
    for (double v : y) nonzero += v != 0.0;
    CHECK(nonzero == 1);
  }
  SUBCASE("project after lift is the identity") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> y(red.dimension());
    double sum = 0.0;
    for (auto& v : y) sum += v = u(gen);
    for (auto& v : y) v *= red.uncommitted_mass() / sum;
    const auto back = project(red, lift(red, y));
    CHECK(max_diff(back, y) < 1e-15);
  }
  SUBCASE("lift after project is the identity on symmetric states") {
    const auto full = lift(red, red.initial_state());
    const auto again = lift(red, project(red, full));
    CHECK(max_diff(again.x, full.x) < 1e-15);
  }
  SUBCASE("asymmetric states are rejected") {
    auto full = lift(red, red.initial_state());
    full.x[OpinionSet::single(2).index()] += 0.01;
    full.x[OpinionSet::single(1).index()] -= 0.01;
    CHECK_THROWS_AS(project(red, full), Error);
  }
}

TEST_CASE("reduced S1 trajectories match the full system") {
  const IntegrateOptions opt{.rtol = 1e-10, .atol = 1e-13, .sample_dt = 5.0};
  for (int m = 4; m <= 7; ++m) {
    const auto s = make_s1(m, 0.07, 0.1);
    ReducedSystem red(OpinionClassPartition::from_allocation(s.P, s.x0), RuleVariant::Original);
    FullSystem full(m, s.P, RuleVariant::Original);
    const auto a = integrate(red, red.initial_state(), 100.0, opt);
    const auto b = integrate(full, full.pure_state(s.x0), 100.0, opt);
    REQUIRE(a.times.size() == b.times.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < a.times.size(); ++k)
      worst = std::max(worst, max_diff(project(red, DensityVector{b.states[k], s.P}, 1e-8), a.states[k]));
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("S2 partition lifts to the full six-opinion trajectory") {
  const auto s = make_s2(6, 0.1, 0.25);
  ReducedSystem red(OpinionClassPartition::from_allocation(s.P, s.x0), RuleVariant::Original);
  FullSystem full(6, s.P, RuleVariant::Original);
  const IntegrateOptions opt{.rtol = 1e-12, .atol = 1e-14, .sample_dt = 10.0};
  const auto a = integrate(red, red.initial_state(), 50.0, opt);
  const auto b = integrate(full, full.pure_state(s.x0), 50.0, opt);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.times.size(); ++k) worst = std::max(worst, max_diff(lift(red, a.states[k]).x, b.states[k]));
  CHECK(worst < 1e-10);
}

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "ngame/error.hpp"
#include "ngame/scenarios.hpp"

using namespace ngame;

namespace {
double sum_from(const std::vector<double>& v, std::size_t first) {
  return std::accumulate(v.begin() + static_cast<long>(first), v.end(), 0.0);
}
}  // namespace

TEST_CASE("S1 splits the minority mass evenly") {
  const auto s = make_s1(5, 0.1, 0.09);
  CHECK(s.P[0] == 0.1);
  CHECK(s.P[1] == 0.0);
  for (int o = 2; o < 5; ++o) CHECK(s.P[o] == doctest::Approx(0.03));
  CHECK(s.x0[1] == doctest::Approx(0.81));
  CHECK_THROWS_AS(make_s1(2, 0.1, 0.1), Error);
  CHECK_THROWS_AS(make_s1(4, 0.6, 0.5), Error);
}

TEST_CASE("S2 polarized allocation") {
  const auto s = make_s2(6, 0.1, 0.25);
  REQUIRE(s.n1);
  CHECK(*s.n1 == 2);
  CHECK(*s.p1 == doctest::Approx(0.099));
  CHECK(*s.p2 == doctest::Approx(0.052));
  CHECK(*s.p2 < *s.p1);
  CHECK(*s.n1 * *s.p1 + *s.p2 == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(sum_from(s.P, 2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(*s.p1 == doctest::Approx(s.P_A - 1e-3).epsilon(1e-15));
  // m - n1 - 3 < 0.
  try {
    make_s2(4, 0.1, 0.25);
    FAIL("expected infeasible scenario");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasibleScenario);
  }
}

TEST_CASE("S0 random allocation") {
  const auto s = make_s0(6, 0.1, 0.12, 0.02, 42);
  CHECK(sum_from(s.P, 2) == 0.12);
  for (int o = 2; o < 6; ++o) {
    CHECK(s.P[o] >= 0.0);
    CHECK(s.P[o] < 0.1);
  }
  const auto again = make_s0(6, 0.1, 0.12, 0.02, 42);
  CHECK(again.P == s.P);
  CHECK(make_s0(6, 0.1, 0.12, 0.02, 43).P != s.P);

  const auto flat = make_s0(6, 0.1, 0.12, 1e-12, 5);
  const auto sym = make_s1(6, 0.1, 0.12);
  for (int o = 2; o < 6; ++o) CHECK(flat.P[o] == doctest::Approx(sym.P[o]).epsilon(1e-9));
  CHECK_THROWS_AS(make_s0(6, 0.1, 0.12, 0.0, 1), Error);
}

TEST_CASE("network scenario and apportionment") {
  const auto s = make_network_sym(5, 0.03, 0.01);
  const auto c = apportion(s, 1000);
  CHECK(c.committed == std::vector<int>{30, 10, 10, 10, 10});
  CHECK(c.uncommitted == std::vector<int>{0, 233, 233, 232, 232});
  CHECK(make_network_sym(2, 0.1, 0.05).m == 2);
  CHECK_THROWS_AS(make_network_sym(5, 0.7, 0.1), Error);
}

// Acceptance run: one PASS/FAIL line per criterion.  Optional arguments pick
// criteria by id (c1 ... c13).  Exit status is 0 only when every selected
// criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ngame/abm.hpp"
#include "ngame/meanfield.hpp"
#include "ngame/network.hpp"
#include "ngame/recursive.hpp"
#include "ngame/scenarios.hpp"
#include "ngame/sweep.hpp"
#include "ngame/symmetry.hpp"

using namespace ngame;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string pc_str(const std::optional<double>& v) { return v ? fmt("%.4f", *v) : std::string("none"); }

ScenarioFamily two_opinion(double pb) {
  return [pb](double pa) { return make_custom({pa, pb}, {0.0, 1.0 - pa - pb}); };
}

ScenarioFamily three_opinion(double pc) {
  return [pc](double pa) { return make_custom({pa, 0.0, pc}, {0.0, 1.0 - pa - pc, 0.0}); };
}

CriticalOptions full_backend() {
  CriticalOptions o;
  o.steady.backend = Backend::Full;
  return o;
}

// c1 -----------------------------------------------------------------------
Outcome two_opinion_tipping_point() {
  const auto r = find_critical_meanfield(two_opinion(0.0), full_backend());
  const bool ok = r.critical && std::abs(*r.critical - 0.098) <= 0.002 && r.nonconverged == 0;
  return {ok, "P_A^(c)=" + pc_str(r.critical) + " (" + to_string(r.classification) + "), target 0.098 +- 0.002"};
}

// c2 -----------------------------------------------------------------------
Outcome tricritical_point() {
  CriticalOptions o = full_backend();
  const auto t = find_tricritical(0.10, 0.20, 1e-4, o);
  const bool ok = std::abs(t.P_B - 0.162) <= 0.005 && std::abs(t.P_A - 0.162) <= 0.005;
  return {ok, "boundary at (P_A, P_B)=(" + fmt("%.4f", t.P_A) + ", " + fmt("%.4f", t.P_B) +
                  "), target (0.162, 0.162) +- 0.005"};
}

// c3 -----------------------------------------------------------------------
Outcome critical_line() {
  bool ok = true;
  std::string detail;
  for (double pb : {0.18, 0.20, 0.25}) {
    CriticalOptions o = full_backend();
    o.hi = 0.999 - pb;
    const auto r = find_critical_meanfield(two_opinion(pb), o);
    const bool point = r.critical && std::abs(*r.critical - pb) <= o.tol &&
                       r.classification == Classification::Continuous;
    ok = ok && point;
    detail += fmt("P_B=%.2f", pb) + ":" + pc_str(r.critical) + "/" + to_string(r.classification) + " ";
  }
  return {ok, detail + "(|P_A^(c)-P_B| <= 5e-4, continuous)"};
}

// c4 -----------------------------------------------------------------------
Outcome three_opinion_curve() {
  const CriticalOptions o = full_backend();
  auto pc_at = [&](double pc) { return find_critical_meanfield(three_opinion(pc), o); };
  // Coarse scan, then golden-section refinement around the smallest value.
  std::vector<double> grid;
  for (double v = 0.0; v <= 0.2 + 1e-12; v += 0.005) grid.push_back(v);
  double best_v = 0.0, best = 1.0;
  for (double v : grid) {
    const auto r = pc_at(v);
    if (r.critical && *r.critical < best) best = *r.critical, best_v = v;
  }
  double a = std::max(0.0, best_v - 0.005), b = best_v + 0.005;
  const double g = (std::sqrt(5.0) - 1) / 2;
  auto value = [&](double v) { return pc_at(v).critical.value_or(1.0); };
  double c = b - g * (b - a), d = a + g * (b - a), fc = value(c), fd = value(d);
  while (b - a > 2e-4) {
    if (fc < fd) b = d, d = c, fd = fc, c = b - g * (b - a), fc = value(c);
    else a = c, c = d, fc = fd, d = a + g * (b - a), fd = value(d);
  }
  const double argmin = 0.5 * (a + b);

  bool below_ok = true;
  for (double v : {0.0, 0.02, 0.04, 0.055})
    below_ok = below_ok && pc_at(v).classification == Classification::Discontinuous;
  bool above_ok = true;
  for (double v : {0.2, 0.25, 0.3}) above_ok = above_ok && pc_at(v).classification == Classification::Continuous;
  const bool ok = std::abs(argmin - 0.077) <= 0.01 && below_ok && above_ok;
  return {ok, "minimum at P_C=" + fmt("%.4f", argmin) + " (P_A^(c)=" + fmt("%.4f", value(argmin)) +
                  "), target 0.077 +- 0.01; discontinuous for P_C<0.06: " + (below_ok ? "yes" : "no") +
                  "; continuous for P_C in {0.2,0.25,0.3}: " + (above_ok ? "yes" : "no")};
}

// c5 -----------------------------------------------------------------------
Outcome generated_two_opinion_system() {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    double v[5];
    double sum = 0.0;
    for (double& e : v) sum += e = u(gen);
    for (double& e : v) e /= sum;
    const double xA = v[0], xB = v[1], xAB = v[2], PA = v[3], PB = v[4];
    FullSystem sys(2, {PA, PB}, RuleVariant::Original);
    const double x[3] = {xA, xB, xAB};
    double f[3];
    sys.rhs(x, f);
    // Hand-written two-opinion mean-field equations.
    const double dA = -xA * xB + xAB * xAB + xAB * xA + 1.5 * PA * xAB - PB * xA;
    const double dB = -xA * xB + xAB * xAB + xAB * xB + 1.5 * PB * xAB - PA * xB;
    worst = std::max({worst, std::abs(f[0] - dA), std::abs(f[1] - dB), std::abs(f[2] + dA + dB)});
  }
  return {worst <= 1e-12, "max deviation over 1000 random states " + fmt("%.2e", worst) + " (<= 1e-12)"};
}

// c6 -----------------------------------------------------------------------
Outcome symmetry_reduction() {
  const IntegrateOptions opts{1e-9, 1e-12, 5.0};
  const double allowed = 10 * (opts.rtol + opts.atol);
  bool ok = true;
  std::string dims;
  double worst = 0.0;
  for (int m = 4; m <= 8; ++m) {
    const auto s = make_s1(m, 0.08, 0.12);
    const auto part = OpinionClassPartition::from_allocation(s.P, s.x0);
    const auto reduced = reduce_system(part, RuleVariant::Original);
    ok = ok && reduced->dimension() == static_cast<std::size_t>(4 * m - 5);
    dims += std::to_string(reduced->dimension()) + (m < 8 ? "," : "");
    FullSystem full(m, s.P, RuleVariant::Original);
    const auto tr = integrate(*reduced, reduced->initial_state(), 200.0, opts);
    const auto tf = integrate(full, full.pure_state(s.x0), 200.0, opts);
    if (tr.times.size() != tf.times.size()) return {false, "sample times differ at m=" + std::to_string(m)};
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const auto lifted = lift(*reduced, tr.states[i]);
      for (std::size_t k = 0; k < lifted.x.size(); ++k)
        worst = std::max(worst, std::abs(lifted.x[k] - tf.states[i][k]));
    }
  }
  ok = ok && worst <= allowed;
  return {ok, "dimensions " + dims + " for m=4..8 (4m-5), max lifted deviation " + fmt("%.2e", worst) + " (<= " +
                  fmt("%.0e", allowed) + ")"};
}

// c7 -----------------------------------------------------------------------
// Listener-only synchronous map over all opinion states, written independently
// of the library: every uncommitted agent listens once per step.
std::vector<double> reference_step(const std::vector<double>& x, const std::vector<double>& P, int m) {
  std::vector<double> Q(P);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const auto mask = static_cast<unsigned>(k + 1);
    const int size = std::popcount(mask);
    for (int o = 0; o < m; ++o)
      if (mask >> o & 1u) Q[o] += x[k] / size;
  }
  double total = 0.0;
  for (double q : Q) total += q;
  for (double& q : Q) q /= total;
  std::vector<double> next(x.size(), 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const auto mask = static_cast<unsigned>(k + 1);
    for (int o = 0; o < m; ++o) {
      const unsigned bit = 1u << o;
      const unsigned to = (mask & bit) ? bit : (mask | bit);
      next[to - 1] += x[k] * Q[o];
    }
  }
  return next;
}

Outcome recursive_engine() {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double drift = 0.0;
  for (int m = 2; m <= 5; ++m) {
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<double> P(m), x0(m);
      double sum = 0.0;
      for (int o = 0; o < m; ++o) sum += (P[o] = 0.1 * u(gen)) + (x0[o] = u(gen));
      for (int o = 0; o < m; ++o) P[o] /= sum, x0[o] /= sum;
      RecursiveEngine e(P, x0);
      std::vector<double> x((1u << m) - 1, 0.0);
      for (int o = 0; o < m; ++o) x[(1u << o) - 1] = x0[o];
      for (int t = 0; t < 1000; ++t) {
        e.step();
        x = reference_step(x, P, m);
        for (int o = 0; o < m; ++o) drift = std::max(drift, std::abs(e.single()[o] - x[(1u << o) - 1]));
      }
    }
  }
  const bool part_a = drift <= 1e-12;

  const std::vector<double> P{0.1, 0.0, 0.025, 0.025, 0.025, 0.025}, x0{0.0, 0.8, 0.0, 0.0, 0.0, 0.0};
  const auto rec = steady_state_recursive(RecursiveEngine(P, x0));
  FullSystem sys(6, P, RuleVariant::ListenerOnly);
  const auto ode = steady_state(sys, sys.pure_state(x0));
  const auto n = observables(sys, ode.x);
  double gap = 0.0;
  for (int o = 0; o < 6; ++o) gap = std::max(gap, std::abs(rec.state.single()[o] + P[o] - n[o]));
  const bool part_b = rec.converged && ode.converged && gap <= 1e-3;
  return {part_a && part_b, "(a) max drift vs full-state map over 1000 steps, m=2..5: " + fmt("%.2e", drift) +
                                " (<= 1e-12); (b) six-opinion steady state gap vs listener-only ODE: " +
                                fmt("%.2e", gap) + " (<= 1e-3)"};
}

// c8 -----------------------------------------------------------------------
Outcome divide_and_conquer() {
  bool ok = true;
  std::string detail;
  double worst_gap = 0.0;
  for (double pt : {0.10, 0.12, 0.14, 0.16}) {
    std::vector<double> ode, rec;
    for (int m = 3; m <= 10; ++m) {
      CriticalOptions o;
      o.steady.variant = RuleVariant::ListenerOnly;
      o.steady.backend = Backend::Reduced;
      auto family = [m, pt](double pa) { return make_s1(m, pa, pt); };
      const auto a = find_critical_meanfield(family, o);
      o.steady.backend = Backend::Recursive;
      const auto b = find_critical_meanfield(family, o);
      if (!a.critical || !b.critical) return {false, fmt("no transition at P_tilde=%.2f", pt) + " m=" + std::to_string(m)};
      ode.push_back(*a.critical);
      rec.push_back(*b.critical);
      worst_gap = std::max(worst_gap, std::abs(*a.critical - *b.critical));
    }
    const auto argmin = static_cast<std::size_t>(std::min_element(ode.begin(), ode.end()) - ode.begin());
    const double tol = 5e-4;
    bool shape = argmin > 0 && argmin + 1 < ode.size() && ode.front() - ode[argmin] > tol &&
                 ode.back() - ode[argmin] > tol;
    for (std::size_t i = 0; i + 1 < ode.size(); ++i) {
      if (i < argmin) shape = shape && ode[i + 1] <= ode[i] + tol;
      else shape = shape && ode[i + 1] >= ode[i] - tol;
    }
    ok = ok && shape;
    detail += fmt("P_tilde=%.2f", pt) + ": min at m=" + std::to_string(3 + argmin) + (shape ? "" : " (not unimodal)") +
              "; ";
  }
  ok = ok && worst_gap <= 0.002;
  return {ok, detail + "max recursive/ODE gap " + fmt("%.1e", worst_gap) + " (<= 0.002)"};
}

// c9 -----------------------------------------------------------------------
Outcome s0_bounds() {
  bool ok = true;
  std::string detail;
  for (int m : {4, 5, 6}) {
    for (double p0 : {0.02, 0.04, 0.06}) {
      BoundOptions b;
      b.critical.lo = 1e-4;
      b.trials = 10;
      b.max_draws = 60;
      const auto rep = bound_check_s0(m, p0, b);
      const bool cell = rep.qualifying >= 10 && rep.violations == 0;
      ok = ok && cell;
      detail += "m=" + std::to_string(m) + fmt(",p0=%.2f:", p0) + std::to_string(rep.qualifying) + "/" +
                std::to_string(rep.violations) + (cell ? "" : "!") + " ";
    }
  }
  return {ok, detail + "(qualifying samples/violations; need >= 10 and 0)"};
}

// c10-c12 ------------------------------------------------------------------
EnsembleOptions abm_options() {
  EnsembleOptions o;
  o.realization.sweeps = 1000;
  o.realizations = 50;
  o.seed = 1;
  return o;
}

Outcome er_ensemble_flip() {
  NetworkSpec spec;
  spec.kind = NetworkKind::ER;
  spec.n = 1000;
  spec.params.avg_degree = 8;
  const auto lo = ensemble(spec, make_network_sym(5, 0.02, 0.01), abm_options());
  const auto hi = ensemble(spec, make_network_sym(5, 0.04, 0.01), abm_options());
  const bool ok = lo.R[0] < 0.5 && hi.R[0] > 0.5;
  return {ok, "R_A(0.02)=" + fmt("%.2f", lo.R[0]) + " (< 0.5), R_A(0.04)=" + fmt("%.2f", hi.R[0]) + " (> 0.5)"};
}

struct NetworkCase {
  NetworkKind kind;
  double degree;
};

std::map<std::string, std::optional<double>> network_cache;

std::optional<double> abm_critical(const NetworkCase& c) {
  const std::string key = std::string(to_string(c.kind)) + fmt("%g", c.degree);
  if (auto it = network_cache.find(key); it != network_cache.end()) return it->second;
  AbmGridOptions o;
  o.network.kind = c.kind;
  o.network.n = 1000;
  o.network.params.avg_degree = c.degree;
  o.network.params.beta = 0.1;
  o.ensemble = abm_options();
  o.stop_at_crossing = true;
  // P_tilde = 0.06 over m-1 = 4 opinions.
  const auto r = find_critical_abm([](double pa) { return make_network_sym(5, pa, 0.015); },
                                   make_grid(0.0025, 0.15, 0.0025), o);
  return network_cache[key] = r.critical;
}

Outcome network_ordering() {
  const auto sw = abm_critical({NetworkKind::SW, 8}), er = abm_critical({NetworkKind::ER, 8}),
             sf = abm_critical({NetworkKind::SF, 8});
  const bool ok = sw && er && sf && *sw > *er && *er >= *sf;
  return {ok, "P_A^(c): SW=" + pc_str(sw) + " ER=" + pc_str(er) + " SF=" + pc_str(sf) + " (need SW > ER >= SF)"};
}

Outcome degree_effect() {
  std::vector<std::optional<double>> pcs;
  std::string detail;
  for (double k : {6.0, 8.0, 12.0, 20.0}) {
    pcs.push_back(abm_critical({NetworkKind::ER, k}));
    detail += fmt("<k>=%g:", k) + pc_str(pcs.back()) + " ";
  }
  pcs.push_back(abm_critical({NetworkKind::Complete, 999}));
  detail += "complete:" + pc_str(pcs.back());
  bool ok = true;
  for (std::size_t i = 0; i + 1 < pcs.size(); ++i) ok = ok && pcs[i] && pcs[i + 1] && *pcs[i + 1] >= *pcs[i];
  return {ok, detail + " (non-decreasing)"};
}

// c13 ----------------------------------------------------------------------
Outcome property_suite() {
  std::vector<std::string> failures;
  // Conservation along every accepted step.
  double mass_err = 0.0;
  auto check_traj = [&](const MeanFieldSystem& sys, const std::vector<double>& init) {
    const auto tr = integrate(sys, init, 300.0, {1e-9, 1e-12, 0.0});
    double P = 0.0;
    for (double p : sys.committed()) P += p;
    for (const auto& x : tr.states) {
      double s = P;
      for (double v : x) s += v;
      mass_err = std::max(mass_err, std::abs(s - 1.0));
    }
  };
  for (int m = 2; m <= 5; ++m)
    for (auto variant : {RuleVariant::Original, RuleVariant::ListenerOnly}) {
      const auto s = m > 2 ? make_s1(m, 0.09, 0.06) : make_custom({0.09, 0.0}, {0.0, 0.91});
      FullSystem sys(m, s.P, variant);
      check_traj(sys, sys.pure_state(s.x0));
    }
  for (const auto& s : {make_s1(9, 0.07, 0.14), make_s2(8, 0.08, 0.2)}) {
    const auto sys = reduce_system(OpinionClassPartition::from_allocation(s.P, s.x0), RuleVariant::Original);
    check_traj(*sys, sys->initial_state());
  }
  if (mass_err > 1e-10) failures.push_back("mass drift " + fmt("%.1e", mass_err));

  // Transmission probabilities sum to one at every recursion step.
  double q_err = 0.0;
  for (int m = 2; m <= 8; ++m) {
    const auto s = m > 2 ? make_s0(m, 0.2, 0.1, 0.02, 5 + m) : make_custom({0.08, 0.02}, {0.0, 0.9});
    RecursiveEngine e(s.P, s.x0);
    for (int t = 0; t < 1000; ++t) {
      e.step();
      double sum = 0.0;
      for (double q : e.transmission()) sum += q;
      q_err = std::max(q_err, std::abs(sum - 1.0));
    }
  }
  if (q_err > 1e-12) failures.push_back("sum Q off by " + fmt("%.1e", q_err));

  // Committed agents never change, audited after every interaction.
  std::uint64_t violations = 0;
  for (auto kind : {NetworkKind::Complete, NetworkKind::ER, NetworkKind::SW, NetworkKind::SF}) {
    const Network g = gen_network(kind, 300, {6.0, 0.1}, 4);
    for (auto variant : {RuleVariant::Original, RuleVariant::ListenerOnly}) {
      RealizationOptions o;
      o.variant = variant;
      o.sweeps = 50;
      o.audit_committed = true;
      o.record_series = false;
      violations += run_realization(g, make_network_sym(4, 0.1, 0.05), o, Xoshiro256(11)).committed_violations;
    }
  }
  if (violations) failures.push_back(std::to_string(violations) + " committed-agent changes");

  // Determinism under fixed seeds, independent of the worker count.
  NetworkSpec spec;
  spec.n = 300;
  spec.params.avg_degree = 6;
  spec.seed = 2;
  EnsembleOptions eo;
  eo.realization.sweeps = 40;
  eo.realizations = 6;
  eo.seed = 99;
  eo.keep_series = true;
  eo.threads = 1;
  const auto a = ensemble(spec, make_network_sym(4, 0.08, 0.02), eo);
  eo.threads = 3;
  const auto b = ensemble(spec, make_network_sym(4, 0.08, 0.02), eo);
  spec.resample = true;
  const auto c1 = ensemble(spec, make_network_sym(4, 0.08, 0.02), eo);
  const auto c2 = ensemble(spec, make_network_sym(4, 0.08, 0.02), eo);
  const bool same = a.series == b.series && a.finals == b.finals && c1.series == c2.series &&
                    make_s0(6, 0.1, 0.2, 0.02, 3).P == make_s0(6, 0.1, 0.2, 0.02, 3).P &&
                    gen_network(NetworkKind::SF, 500, {8, 0.1}, 3).neighbor_list(7) ==
                        gen_network(NetworkKind::SF, 500, {8, 0.1}, 3).neighbor_list(7);
  if (!same) failures.push_back("stochastic runs not reproducible");

  std::string detail = "mass drift " + fmt("%.1e", mass_err) + ", |sum Q - 1| " + fmt("%.1e", q_err) +
                       ", committed changes " + std::to_string(violations) + ", determinism " +
                       (same ? "ok" : "broken");
  return {failures.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::tuple<std::string, std::string, std::function<Outcome()>>> criteria = {
      {"c1", "two-opinion tipping point", two_opinion_tipping_point},
      {"c2", "tricritical point", tricritical_point},
      {"c3", "critical line P_A^(c) = P_B", critical_line},
      {"c4", "three-opinion curve", three_opinion_curve},
      {"c5", "generated two-opinion system", generated_two_opinion_system},
      {"c6", "symmetry reduction", symmetry_reduction},
      {"c7", "recursive engine", recursive_engine},
      {"c8", "divide and conquer", divide_and_conquer},
      {"c9", "S0 between S2 and S1", s0_bounds},
      {"c10", "ER ensemble flips between P_A=0.02 and 0.04", er_ensemble_flip},
      {"c11", "network ordering SW > ER >= SF", network_ordering},
      {"c12", "critical point grows with degree", degree_effect},
      {"c13", "property suite", property_suite},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [id, name, check] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("%s %-4s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id.c_str(), name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

#include "ngame/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ngame/error.hpp"
#include "ngame/recursive.hpp"
#include "ngame/symmetry.hpp"

namespace ngame {

const char* to_string(Classification c) {
  switch (c) {
    case Classification::Continuous: return "continuous";
    case Classification::Discontinuous: return "discontinuous";
    case Classification::NoTransition: return "none";
  }
  return "?";
}

const char* to_string(Backend b) {
  switch (b) {
    case Backend::Full: return "full";
    case Backend::Reduced: return "reduced";
    case Backend::Recursive: return "recursive";
  }
  return "?";
}

Backend parse_backend(const std::string& text) {
  if (text == "full") return Backend::Full;
  if (text == "reduced") return Backend::Reduced;
  if (text == "recursive") return Backend::Recursive;
  fail(ErrorCode::Config, "unknown backend '" + text + "' (expected full, reduced or recursive)");
}

SteadyPoint steady_point(const ScenarioConfig& scenario, const SteadyOptions& options) {
  scenario.validate();
  SteadyPoint p;
  p.P_A = scenario.P[0];
  switch (options.backend) {
    case Backend::Full: {
      FullSystem sys(scenario.m, scenario.P, options.variant);
      const auto ss = steady_state(sys, sys.pure_state(scenario.x0), options.ode);
      p.n = observables(sys, ss.x);
      p.converged = ss.converged;
      p.elapsed = ss.t;
      break;
    }
    case Backend::Reduced: {
      ReducedSystem sys(OpinionClassPartition::from_allocation(scenario.P, scenario.x0), options.variant);
      const auto ss = steady_state(sys, sys.initial_state(), options.ode);
      p.n = observables(sys, ss.x);
      p.converged = ss.converged;
      p.elapsed = ss.t;
      break;
    }
    case Backend::Recursive: {
      if (options.variant != RuleVariant::ListenerOnly)
        fail(ErrorCode::ContractViolation, "the recursive backend only implements the listener-only rule");
      const auto ss = steady_state_recursive(RecursiveEngine(scenario.P, scenario.x0), options.recursive_eps,
                                             options.recursive_max_steps);
      p.n = ss.state.single();
      for (int o = 0; o < scenario.m; ++o) p.n[o] += scenario.P[o];
      p.converged = ss.converged;
      p.elapsed = static_cast<double>(ss.state.time());
      break;
    }
  }
  return p;
}

bool a_dominant(const std::vector<double>& n) {
  for (std::size_t o = 1; o < n.size(); ++o)
    if (!(n[0] > n[o])) return false;
  return true;
}

SweepResult find_critical_meanfield(const ScenarioFamily& family, const CriticalOptions& options) {
  require(options.lo < options.hi, "bracket must satisfy lo < hi");
  require(options.tol > 0, "tolerance must be positive");
  SweepResult r;
  auto eval = [&](double pa) {
    SteadyPoint p = steady_point(family(pa), options.steady);
    if (!p.converged) {
      ++r.nonconverged;
      std::ostringstream os;
      os << "steady state not converged at P_A=" << pa << "; using the final state";
      r.warnings.push_back(os.str());
    }
    r.points.push_back(p);
    return p;
  };
  auto finish = [&] {
    std::sort(r.points.begin(), r.points.end(), [](const auto& a, const auto& b) { return a.P_A < b.P_A; });
    return r;
  };

  double lo = options.lo, hi = options.hi;
  SteadyPoint below = eval(lo);
  if (a_dominant(below.n)) {
    r.warnings.push_back("A already dominant at the low end of the bracket");
    return finish();
  }
  SteadyPoint above = eval(hi);
  if (!a_dominant(above.n)) {
    r.warnings.push_back("A not dominant at the high end of the bracket");
    return finish();
  }
  while (hi - lo > options.tol) {
    const double mid = 0.5 * (lo + hi);
    SteadyPoint p = eval(mid);
    if (a_dominant(p.n)) {
      hi = mid;
      above = std::move(p);
    } else {
      lo = mid;
      below = std::move(p);
    }
  }
  r.critical = 0.5 * (lo + hi);
  r.jump = above.n[0] - below.n[0];
  r.classification = std::abs(r.jump) > options.delta_jump ? Classification::Discontinuous : Classification::Continuous;
  r.below = below.n;
  r.above = above.n;
  return finish();
}

std::vector<double> make_grid(double lo, double hi, double step) {
  require(step > 0 && hi >= lo, "grid needs step > 0 and hi >= lo");
  std::vector<double> g;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= count; ++k) g.push_back(lo + static_cast<double>(k) * step);
  return g;
}

AbmSweepResult find_critical_abm(const ScenarioFamily& family, const std::vector<double>& grid,
                                 const AbmGridOptions& options) {
  require(std::is_sorted(grid.begin(), grid.end()), "grid must be sorted ascending");
  AbmSweepResult r;
  for (double pa : grid) {
    AbmPoint pt{pa, ensemble(options.network, family(pa), options.ensemble)};
    const bool crossed = !r.critical && pt.stats.R[0] > 0.5;
    if (crossed) r.critical = pa;
    r.points.push_back(std::move(pt));
    if (crossed && options.stop_at_crossing) break;
  }
  if (r.critical) {
    // Jump in <n_A> across the first crossing.
    const auto it = std::find_if(r.points.begin(), r.points.end(), [&](const AbmPoint& p) { return p.P_A == *r.critical; });
    const double after = it->stats.mean_n[0];
    const double before = it == r.points.begin() ? after : std::prev(it)->stats.mean_n[0];
    r.classification = after - before > 0.1 ? Classification::Discontinuous : Classification::Continuous;
  }
  return r;
}

std::vector<CurvePoint> curve_pc_vs(const std::vector<double>& values,
                                    const std::function<std::pair<ScenarioFamily, CriticalOptions>(double)>& setup,
                                    int threads) {
  std::vector<CurvePoint> out(values.size());
  parallel_for(static_cast<int>(values.size()), threads, [&](int k) {
    out[k].value = values[k];
    try {
      const auto [family, opt] = setup(values[k]);
      out[k].result = find_critical_meanfield(family, opt);
    } catch (const Error& e) {
      out[k].error = std::string(to_string(e.code())) + ": " + e.what();
    }
  });
  return out;
}

BoundReport bound_check_s0(int m, double p0, const BoundOptions& options) {
  BoundReport rep;
  rep.m = m;
  rep.p0 = p0;
  const double P_tilde = (m - 2) * p0;
  const double slack = options.critical.tol;

  CriticalOptions c1 = options.critical;
  const auto r1 = find_critical_meanfield([&](double pa) { return make_s1(m, pa, P_tilde); }, c1);
  if (!r1.critical) fail(ErrorCode::InfeasibleScenario, "no S1 transition inside the bracket");
  rep.pc1 = *r1.critical;

  CriticalOptions c2 = options.critical;
  c2.lo = std::max(c2.lo, p0 + 1e-3 + 1e-9);
  const auto r2 = find_critical_meanfield([&](double pa) { return make_s2(m, pa, P_tilde); }, c2);
  rep.pc2 = r2.critical;
  if (!rep.pc2) rep.notes.push_back("S2 has no transition above its feasibility limit P_A > p0 + 1e-3");

  for (int k = 0; k < options.max_draws && rep.qualifying < options.trials; ++k) {
    // The allocation is drawn once and held fixed; A being the largest
    // committed opinion is enforced at its tipping point instead.
    const ScenarioConfig sample =
        make_s0(m, options.critical.hi, P_tilde, options.sigma, options.seed + static_cast<std::uint64_t>(k));
    BoundSample bs;
    bs.P = sample.P;
    bs.sd = minority_sd(sample);
    bs.max_P = *std::max_element(sample.P.begin() + 2, sample.P.end());
    auto family = [&](double pa) {
      ScenarioConfig s = sample;
      s.P[0] = pa;
      s.P_A = pa;
      s.x0[1] = 1.0 - pa - P_tilde;
      return s;
    };
    const auto r0 = find_critical_meanfield(family, options.critical);
    if (r0.critical) {
      bs.pc0 = *r0.critical;
      bs.classification = r0.classification;
      bs.decreasing_branch = r0.classification == Classification::Discontinuous && r0.below &&
                             dominant_opinion(*r0.below) == 1 && bs.pc0 > bs.max_P;
      bs.within_bounds = (!rep.pc2 || *rep.pc2 - slack <= bs.pc0) && bs.pc0 <= rep.pc1 + slack;
    }
    if (bs.decreasing_branch) {
      ++rep.qualifying;
      if (!bs.within_bounds) ++rep.violations;
    }
    rep.samples.push_back(std::move(bs));
  }
  return rep;
}

TricriticalResult find_tricritical(double lo, double hi, double tol, const CriticalOptions& options) {
  auto classify = [&](double pb) {
    CriticalOptions opt = options;
    opt.hi = std::min(opt.hi, 0.999 - pb);
    const auto r = find_critical_meanfield(
        [pb](double pa) { return make_custom({pa, pb}, {0.0, 1.0 - pa - pb}); }, opt);
    return r;
  };
  TricriticalResult out;
  auto lo_r = classify(lo);
  auto hi_r = classify(hi);
  out.scan.emplace_back(lo, lo_r);
  out.scan.emplace_back(hi, hi_r);
  if (lo_r.classification != Classification::Discontinuous || hi_r.classification != Classification::Continuous)
    fail(ErrorCode::InfeasibleScenario, "P_B bracket does not straddle the change of transition type");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    auto r = classify(mid);
    out.scan.emplace_back(mid, r);
    if (r.classification == Classification::Discontinuous) {
      lo = mid;
      lo_r = std::move(r);
    } else {
      hi = mid;
      hi_r = std::move(r);
    }
  }
  out.P_B = 0.5 * (lo + hi);
  out.P_A = 0.5 * (*lo_r.critical + *hi_r.critical);
  std::sort(out.scan.begin(), out.scan.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::vector<HeatmapCell> heatmap(const std::vector<double>& rows, const std::vector<double>& cols,
                                 const std::function<std::optional<double>(double, double)>& cell) {
  std::vector<HeatmapCell> out;
  for (double r : rows)
    for (double c : cols) out.push_back({r, c, cell(r, c)});
  return out;
}

}  // namespace ngame

#include "ngame/run.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"
#include "ngame/abm.hpp"
#include "ngame/io.hpp"
#include "ngame/meanfield.hpp"
#include "ngame/recursive.hpp"
#include "ngame/sweep.hpp"
#include "ngame/symmetry.hpp"

namespace ngame {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) { return format_number(v); }

json scenario_json(const ScenarioConfig& s) {
  json j = {{"label", to_string(s.label)}, {"m", s.m}, {"P", s.P}, {"x0", s.x0},
            {"P_A", s.P_A}, {"P_tilde", s.P_tilde}, {"p0", s.p0}};
  if (s.p1) j["p1"] = *s.p1;
  if (s.p2) j["p2"] = *s.p2;
  if (s.n1) j["n1"] = *s.n1;
  if (s.sigma) j["sigma"] = *s.sigma;
  if (s.seed) j["seed"] = *s.seed;
  return j;
}

SteadyOptions steady_options(const RunConfig& c) {
  SteadyOptions o;
  o.backend = parse_backend(c.backend);
  o.variant = parse_variant(c.variant);
  o.ode = {c.eps, c.t_max, c.rtol, c.atol};
  o.recursive_eps = c.recursive_eps;
  o.recursive_max_steps = c.recursive_max_steps;
  return o;
}

CriticalOptions critical_options(const RunConfig& c) {
  CriticalOptions o;
  o.steady = steady_options(c);
  o.lo = c.lo;
  o.hi = c.hi;
  o.tol = c.tol;
  o.delta_jump = c.delta_jump;
  return o;
}

NetworkSpec network_spec(const RunConfig& c) {
  NetworkSpec s;
  s.kind = parse_network_kind(c.network);
  s.n = c.n;
  s.params.avg_degree = c.avg_degree;
  s.params.beta = c.beta;
  s.seed = c.network_seed;
  s.resample = c.resample_network;
  return s;
}

EnsembleOptions ensemble_options(const RunConfig& c) {
  EnsembleOptions o;
  o.realization.variant = parse_variant(c.variant);
  o.realization.sweeps = c.sweeps;
  o.realizations = c.realizations;
  o.seed = c.seed;
  o.threads = c.threads;
  o.keep_series = !c.realization_csv.empty();
  return o;
}

int worker_count(const RunConfig& c) { return c.threads > 0 ? c.threads : default_threads(); }

/// Copy of the config with one sweep parameter set.
RunConfig with_parameter(RunConfig c, const std::string& name, double value) {
  if (name == "m") {
    c.m = static_cast<int>(std::lround(value));
  } else if (name == "avg_degree") {
    if (value == 0.0) c.network = "complete";
    else c.avg_degree = value;
  } else if (name == "P_tilde") {
    c.P_tilde = value;
  } else if (name == "p0") {
    if (c.scenario == "network_sym" || c.scenario == "custom") c.p0 = value;
    if (c.scenario != "network_sym") {
      if (!c.m) fail(ErrorCode::Config, "p0 sweeps need m");
      c.P_tilde = value * (*c.m - 2);
    }
  } else if (name == "P_B" || name == "P_C") {
    const std::size_t slot = name == "P_B" ? 1 : 2;
    if (c.scenario != "custom") fail(ErrorCode::Config, name + " sweeps need the custom scenario");
    if (c.P.size() <= slot) fail(ErrorCode::Config, name + " sweeps need m > " + std::to_string(slot));
    const double old = c.P[slot];
    c.P[slot] = value;
    // The committed mass moved into the slot comes out of the B supporters.
    if (!c.x0.empty()) c.x0[c.x0.size() > 1 ? 1 : 0] -= value - old;
  } else {
    fail(ErrorCode::Config, "unknown sweep parameter '" + name + "'");
  }
  return c;
}

ScenarioFamily family_for(const RunConfig& c) {
  return [c](double pa) { return build_scenario(c, pa); };
}

/// Bracket capped so the committed total stays below one.
CriticalOptions capped(const RunConfig& c, CriticalOptions o) {
  const ScenarioConfig s = build_scenario(c, o.lo);
  const double others = s.committed_total() - s.P[0];
  o.hi = std::min(o.hi, 0.999 - others);
  return o;
}

struct Context {
  explicit Context(const RunConfig& c) : config(c) {}
  const RunConfig& config;
  json meta = json::object();
  RunResult result;
  std::string out;

  void warn(const std::string& w) { result.warnings.push_back(w); }
  void absorb(const std::vector<std::string>& ws) {
    for (const auto& w : ws) warn(w);
  }
};

void trajectory_rows(CsvWriter& csv, const MeanFieldSystem& system, double t, const std::vector<double>& x) {
  for (std::size_t k = 0; k < x.size(); ++k) csv.row({num(t), system.state_label(k), num(x[k])});
  const auto n = system.support(x);
  for (int o = 0; o < system.opinions(); ++o) csv.row({num(t), "n_" + opinion_name(o), num(n[o])});
}

void run_meanfield(Context& ctx) {
  const RunConfig& c = ctx.config;
  const ScenarioConfig s = build_scenario(c);
  ctx.meta["scenario"] = scenario_json(s);
  const RuleVariant variant = parse_variant(c.variant);
  std::unique_ptr<MeanFieldSystem> system;
  std::vector<double> init;
  if (c.backend == "reduced") {
    auto reduced = reduce_system(OpinionClassPartition::from_allocation(s.P, s.x0), variant);
    init = reduced->initial_state();
    ctx.meta["reduced_dimension"] = reduced->dimension();
    system = std::move(reduced);
  } else {
    system = build_system(s.m, s.P, variant);
    init = system->pure_state(s.x0);
  }
  CsvWriter csv(ctx.out, csv_schema::kTrajectory);
  if (c.steady) {
    const auto ss = steady_state(*system, init, {c.eps, c.t_max, c.rtol, c.atol});
    trajectory_rows(csv, *system, ss.t, ss.x);
    ctx.meta["steady"] = {{"converged", ss.converged}, {"t", ss.t}, {"residual", ss.residual}};
    if (!ss.converged) {
      ++ctx.result.nonconverged;
      ctx.warn("steady state not reached by t_max=" + num(c.t_max) + " (residual " + num(ss.residual) + ")");
    }
  } else {
    const auto traj = integrate(*system, init, c.t_end, {c.rtol, c.atol, c.sample_dt});
    for (std::size_t i = 0; i < traj.times.size(); ++i) trajectory_rows(csv, *system, traj.times[i], traj.states[i]);
    ctx.meta["samples"] = traj.times.size();
  }
  csv.close();
}

void recursive_rows(CsvWriter& csv, const RecursiveEngine& e) {
  const auto t = num(static_cast<double>(e.time()));
  for (int o = 0; o < e.opinions(); ++o) {
    const std::string name = opinion_name(o);
    csv.row({t, name, num(e.single()[o])});
    csv.row({t, "mixed_" + name, num(e.mixed_total(o))});
    csv.row({t, "Q_" + name, num(e.transmission()[o])});
    csv.row({t, "n_" + name, num(e.single()[o] + e.committed()[o])});
  }
}

void run_recursive(Context& ctx) {
  const RunConfig& c = ctx.config;
  const ScenarioConfig s = build_scenario(c);
  ctx.meta["scenario"] = scenario_json(s);
  RecursiveEngine engine(s.P, s.x0);
  ctx.meta["groups"] = engine.groups().size();
  CsvWriter csv(ctx.out, csv_schema::kTrajectory);
  if (c.steady) {
    const auto ss = steady_state_recursive(std::move(engine), c.recursive_eps, c.recursive_max_steps);
    recursive_rows(csv, ss.state);
    ctx.meta["steady"] = {{"converged", ss.converged}, {"steps", ss.state.time()}};
    if (!ss.converged) {
      ++ctx.result.nonconverged;
      ctx.warn("recursion did not settle within " + std::to_string(c.recursive_max_steps) + " steps");
    }
  } else {
    const std::int64_t every = std::max<std::int64_t>(1, std::llround(c.sample_dt));
    recursive_rows(csv, engine);
    while (engine.time() < c.steps) {
      engine.step();
      if (engine.time() % every == 0 || engine.time() == c.steps) recursive_rows(csv, engine);
    }
  }
  csv.close();
}

json ensemble_meta(const EnsembleStats& st) {
  return {{"L", st.L},
          {"ties", st.ties},
          {"isolated_redraws", st.isolated_redraws},
          {"committed_violations", st.committed_violations},
          {"dominant", st.dominant}};
}

void run_abm(Context& ctx) {
  const RunConfig& c = ctx.config;
  std::vector<std::optional<double>> grid;
  if (c.values.empty()) grid.push_back(std::nullopt);
  for (double v : c.values) grid.push_back(v);
  const NetworkSpec spec = network_spec(c);
  const EnsembleOptions opts = ensemble_options(c);
  CsvWriter csv(ctx.out, csv_schema::kEnsemble);
  json points = json::array();
  for (const auto& pa : grid) {
    const ScenarioConfig s = build_scenario(c, pa);
    const EnsembleStats st = ensemble(spec, s, opts);
    for (int o = 0; o < s.m; ++o) csv.row({num(s.P[0]), opinion_name(o), num(st.mean_n[o]), num(st.R[o])});
    json p = ensemble_meta(st);
    p["scenario"] = scenario_json(s);
    points.push_back(p);
    if (st.ties) ctx.warn(std::to_string(st.ties) + " realization(s) tied at P_A=" + num(s.P[0]));
    if (st.isolated_redraws)
      ctx.warn(std::to_string(st.isolated_redraws) + " speaker redraws from isolated nodes at P_A=" + num(s.P[0]));
    if (!c.realization_csv.empty()) {
      CsvWriter rcsv(c.realization_csv, csv_schema::kRealization);
      for (std::size_t r = 0; r < st.series.size(); ++r)
        for (std::size_t t = 0; t < st.series[r].size(); ++t)
          for (int o = 0; o < s.m; ++o)
            rcsv.row({std::to_string(r), std::to_string(t), opinion_name(o), num(st.series[r][t][o])});
      rcsv.close();
      ctx.result.outputs.push_back(c.realization_csv);
    }
  }
  csv.close();
  ctx.meta["points"] = points;
}

void sweep_rows(CsvWriter& csv, const SweepResult& r) {
  const char* cls = to_string(r.classification);
  for (const auto& p : r.points)
    for (std::size_t o = 0; o < p.n.size(); ++o)
      csv.row({"P_A", num(p.P_A), "n_" + opinion_name(static_cast<OpinionId>(o)), num(p.n[o]), cls});
  csv.row({"P_A", num(r.critical.value_or(kNaN)), "P_A^(c)", num(r.critical.value_or(kNaN)), cls});
}

json sweep_meta(const SweepResult& r) {
  json j = {{"critical", r.critical ? json(*r.critical) : json(nullptr)},
            {"classification", to_string(r.classification)},
            {"jump", r.jump},
            {"probes", r.points.size()},
            {"nonconverged", r.nonconverged}};
  return j;
}

void note_sweep(Context& ctx, const SweepResult& r, const std::string& where) {
  ctx.result.nonconverged += r.nonconverged;
  for (const auto& w : r.warnings) ctx.warn(where.empty() ? w : where + ": " + w);
}

void run_sweep_critical(Context& ctx) {
  const RunConfig& c = ctx.config;
  const SweepResult r = find_critical_meanfield(family_for(c), capped(c, critical_options(c)));
  CsvWriter csv(ctx.out, csv_schema::kSweep);
  sweep_rows(csv, r);
  csv.close();
  note_sweep(ctx, r, "");
  ctx.meta["result"] = sweep_meta(r);
}

void run_sweep_curve(Context& ctx) {
  const RunConfig& c = ctx.config;
  const auto points = curve_pc_vs(
      c.values,
      [&](double v) {
        const RunConfig cv = with_parameter(c, c.parameter, v);
        return std::make_pair(family_for(cv), capped(cv, critical_options(cv)));
      },
      worker_count(c));
  CsvWriter csv(ctx.out, csv_schema::kSweep);
  json rows = json::array();
  for (const auto& p : points) {
    if (p.error) {
      csv.row({c.parameter, num(p.value), "P_A^(c)", num(kNaN), "error"});
      ctx.warn(c.parameter + "=" + num(p.value) + ": " + *p.error);
      rows.push_back({{"value", p.value}, {"error", *p.error}});
      continue;
    }
    csv.row({c.parameter, num(p.value), "P_A^(c)", num(p.result.critical.value_or(kNaN)),
             to_string(p.result.classification)});
    note_sweep(ctx, p.result, c.parameter + "=" + num(p.value));
    json m = sweep_meta(p.result);
    m["value"] = p.value;
    rows.push_back(m);
  }
  csv.close();
  ctx.meta["points"] = rows;
}

void run_sweep_tricritical(Context& ctx) {
  const RunConfig& c = ctx.config;
  const auto r = find_tricritical(c.pb_lo, c.pb_hi, c.pb_tol, critical_options(c));
  CsvWriter csv(ctx.out, csv_schema::kSweep);
  for (const auto& [pb, sr] : r.scan) {
    csv.row({"P_B", num(pb), "P_A^(c)", num(sr.critical.value_or(kNaN)), to_string(sr.classification)});
    note_sweep(ctx, sr, "P_B=" + num(pb));
  }
  csv.row({"P_B", num(r.P_B), "tricritical", num(r.P_A), ""});
  csv.close();
  ctx.meta["tricritical"] = {{"P_B", r.P_B}, {"P_A", r.P_A}, {"scan", r.scan.size()}};
}

void run_sweep_bound(Context& ctx) {
  const RunConfig& c = ctx.config;
  BoundOptions o;
  o.critical = critical_options(c);
  o.sigma = c.sigma;
  o.trials = c.trials;
  o.max_draws = c.max_draws;
  o.seed = c.scenario_seed;
  const BoundReport r = bound_check_s0(*c.m, *c.p0, o);
  CsvWriter csv(ctx.out, csv_schema::kSweep);
  csv.row({"p0", num(r.p0), "P_A^(c1)", num(r.pc1), ""});
  csv.row({"p0", num(r.p0), "P_A^(c2)", num(r.pc2.value_or(kNaN)), ""});
  json samples = json::array();
  for (const auto& s : r.samples) {
    csv.row({"sd", num(s.sd), "P_A^(c0)", num(s.pc0), to_string(s.classification)});
    samples.push_back({{"P", s.P},
                       {"sd", s.sd},
                       {"max_P", s.max_P},
                       {"pc0", s.pc0},
                       {"decreasing_branch", s.decreasing_branch},
                       {"within_bounds", s.within_bounds}});
  }
  csv.close();
  for (const auto& n : r.notes) ctx.warn(n);
  if (r.violations) ctx.warn(std::to_string(r.violations) + " S0 sample(s) fall outside the S1/S2 bounds");
  if (r.qualifying < c.trials)
    ctx.warn("only " + std::to_string(r.qualifying) + " of " + std::to_string(c.trials) +
             " requested samples are on the decreasing branch");
  ctx.meta["bound"] = {{"m", r.m},          {"p0", r.p0},          {"pc1", r.pc1},
                       {"pc2", r.pc2 ? json(*r.pc2) : json(nullptr)},
                       {"qualifying", r.qualifying}, {"violations", r.violations}, {"samples", samples}};
}

AbmSweepResult abm_critical(const RunConfig& c, bool stop_early) {
  AbmGridOptions o;
  o.network = network_spec(c);
  o.ensemble = ensemble_options(c);
  o.ensemble.keep_series = false;
  o.stop_at_crossing = stop_early;
  return find_critical_abm(family_for(c), make_grid(c.grid_lo, c.grid_hi, c.grid_step), o);
}

void run_sweep_abm(Context& ctx) {
  const RunConfig& c = ctx.config;
  CsvWriter csv(ctx.out, csv_schema::kSweep);
  if (c.parameter.empty()) {
    const auto r = abm_critical(c, false);
    const char* cls = to_string(r.classification);
    json pts = json::array();
    for (const auto& p : r.points) {
      csv.row({"P_A", num(p.P_A), "R_A", num(p.stats.R[0]), cls});
      csv.row({"P_A", num(p.P_A), "n_A", num(p.stats.mean_n[0]), cls});
      json m = ensemble_meta(p.stats);
      m["P_A"] = p.P_A;
      pts.push_back(m);
    }
    csv.row({"P_A", num(r.critical.value_or(kNaN)), "P_A^(c)", num(r.critical.value_or(kNaN)), cls});
    ctx.meta["points"] = pts;
    ctx.meta["critical"] = r.critical ? json(*r.critical) : json(nullptr);
  } else {
    json pts = json::array();
    for (double v : c.values) {
      const auto r = abm_critical(with_parameter(c, c.parameter, v), true);
      csv.row({c.parameter, num(v), "P_A^(c)", num(r.critical.value_or(kNaN)), to_string(r.classification)});
      pts.push_back({{"value", v}, {"critical", r.critical ? json(*r.critical) : json(nullptr)}});
    }
    ctx.meta["points"] = pts;
  }
  csv.close();
}

void run_sweep_heatmap(Context& ctx) {
  const RunConfig& c = ctx.config;
  const auto cells = heatmap(c.rows, c.cols, [&](double m, double k) {
    return abm_critical(with_parameter(with_parameter(c, "m", m), "avg_degree", k), true).critical;
  });
  CsvWriter csv(ctx.out, csv_schema::kHeatmap);
  for (const auto& cell : cells) csv.row({num(cell.row), num(cell.col), num(cell.critical.value_or(kNaN))});
  csv.close();
}

void run_scenario(Context& ctx) {
  const ScenarioConfig s = build_scenario(ctx.config);
  json j = scenario_json(s);
  ctx.meta["scenario"] = j;
  write_text_file(ctx.out, j.dump(2) + "\n");
}

}  // namespace

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config:
    case ErrorCode::SchemaMismatch: return kStatusConfig;
    case ErrorCode::InfeasibleScenario: return kStatusInfeasible;
    default: return kStatusFailure;
  }
}

std::string output_path(const RunConfig& c) {
  if (!c.out.empty()) return c.out;
  if (c.command == "scenario") return "scenario.json";
  if (c.command == "sweep") return "sweep_" + c.sweep + ".csv";
  return c.command + ".csv";
}

std::string metadata_path(const RunConfig& c) {
  return c.metadata.empty() ? output_path(c) + ".meta.json" : c.metadata;
}

RunResult run(const RunConfig& config) {
  Context ctx{config};
  ctx.out = output_path(config);
  ctx.result.outputs.push_back(ctx.out);

  const auto& c = config;
  if (c.command == "meanfield") run_meanfield(ctx);
  else if (c.command == "recursive") run_recursive(ctx);
  else if (c.command == "abm") run_abm(ctx);
  else if (c.command == "scenario") run_scenario(ctx);
  else if (c.command == "sweep") {
    if (c.sweep == "critical") run_sweep_critical(ctx);
    else if (c.sweep == "curve") run_sweep_curve(ctx);
    else if (c.sweep == "tricritical") run_sweep_tricritical(ctx);
    else if (c.sweep == "bound") run_sweep_bound(ctx);
    else if (c.sweep == "abm") run_sweep_abm(ctx);
    else if (c.sweep == "heatmap") run_sweep_heatmap(ctx);
    else fail(ErrorCode::Config, "unknown sweep kind '" + c.sweep + "'");
  } else {
    fail(ErrorCode::Config, "unknown command '" + c.command + "'");
  }

  auto& r = ctx.result;
  if (r.nonconverged > 0) r.status = kStatusNonConverged;
  json meta = {
      {"artifact_version", kArtifactVersion},
      {"schema_version", kSchemaVersion},
      {"command", c.command},
      {"config", json::parse(config_to_json(config, 0))},
      {"outputs", r.outputs},
      {"status", r.status},
      {"nonconverged", r.nonconverged},
      {"warnings", r.warnings},
      {"rng",
       {{"generator", "xoshiro256**"},
        {"seeding", "splitmix64 expansion of the seed"},
        {"master_seed", c.seed},
        {"realization_streams", "realization r uses the master state after r jumps of 2^128 draws"},
        {"network_seed", c.network_seed},
        {"network_per_realization", c.resample_network ? "network_seed + r" : "one graph shared by all realizations"},
        {"scenario_seed", c.scenario_seed}}},
      {"unspecified_defaults",
       {{"beta", c.beta},
        {"delta_jump", c.delta_jump},
        {"eps", c.eps},
        {"t_max", c.t_max},
        {"rtol", c.rtol},
        {"atol", c.atol},
        {"tol", c.tol},
        {"recursive_eps", c.recursive_eps},
        {"grid_step", c.grid_step}}},
  };
  for (auto& [k, v] : ctx.meta.items()) meta["result"][k] = v;
  r.metadata = meta.dump(2);
  write_text_file(metadata_path(config), r.metadata + "\n");
  return r;
}

}  // namespace ngame

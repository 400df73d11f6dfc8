#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ngame/abm.hpp"
#include "ngame/meanfield.hpp"
#include "ngame/scenarios.hpp"

namespace ngame {

enum class Classification { Continuous, Discontinuous, NoTransition };
enum class Backend { Full, Reduced, Recursive };

const char* to_string(Classification c);
const char* to_string(Backend b);
Backend parse_backend(const std::string& text);

/// Scenario as a function of P_A.
using ScenarioFamily = std::function<ScenarioConfig(double P_A)>;

struct SteadyOptions {
  Backend backend = Backend::Reduced;
  RuleVariant variant = RuleVariant::Original;
  SteadyStateOptions ode;
  double recursive_eps = 1e-12;
  std::int64_t recursive_max_steps = 1'000'000;
};

struct SteadyPoint {
  double P_A = 0.0;
  std::vector<double> n;
  bool converged = false;
  double elapsed = 0.0;  // integration time or recursion steps
};

/// Steady-state supports n_i from the scenario's initial condition.
SteadyPoint steady_point(const ScenarioConfig& scenario, const SteadyOptions& options);

/// n_A strictly greater than every other n_i.
bool a_dominant(const std::vector<double>& n);

struct CriticalOptions {
  SteadyOptions steady;
  double lo = 0.0;
  double hi = 0.5;
  double tol = 5e-4;
  double delta_jump = 0.1;
};

struct SweepResult {
  std::vector<SteadyPoint> points;  // sorted by P_A
  std::optional<double> critical;
  Classification classification = Classification::NoTransition;
  double jump = 0.0;  // n_A(above) - n_A(below) across the final bracket
  std::optional<std::vector<double>> below, above;
  int nonconverged = 0;
  std::vector<std::string> warnings;
};

/// Bisection on the dominance predicate inside [lo, hi].  The reported
/// critical point is the midpoint of the final bracket.
SweepResult find_critical_meanfield(const ScenarioFamily& family, const CriticalOptions& options);

struct AbmGridOptions {
  NetworkSpec network;
  EnsembleOptions ensemble;
  /// Stop at the first grid value with R_A > 1/2.
  bool stop_at_crossing = false;
};

struct AbmPoint {
  double P_A = 0.0;
  EnsembleStats stats;
};

struct AbmSweepResult {
  std::vector<AbmPoint> points;
  std::optional<double> critical;
  Classification classification = Classification::NoTransition;
};

/// R_A on a P_A grid; the critical point is the smallest value with R_A > 1/2.
/// Every grid point reuses the same master seed.
AbmSweepResult find_critical_abm(const ScenarioFamily& family, const std::vector<double>& grid,
                                 const AbmGridOptions& options);

/// P_A = lo, lo + step, ..., up to hi inclusive (within rounding).
std::vector<double> make_grid(double lo, double hi, double step);

struct CurvePoint {
  double value = 0.0;
  SweepResult result;
  std::optional<std::string> error;
};

/// One critical-point search per parameter value; `setup` supplies the family
/// and bracket.  Errors are recorded per point.
std::vector<CurvePoint> curve_pc_vs(const std::vector<double>& values,
                                    const std::function<std::pair<ScenarioFamily, CriticalOptions>(double)>& setup,
                                    int threads = 1);

struct BoundSample {
  std::vector<double> P;  // sampled committed fractions (P_A slot unused)
  double sd = 0.0;
  double max_P = 0.0;  // largest minority committed fraction
  double pc0 = 0.0;
  Classification classification = Classification::NoTransition;
  bool decreasing_branch = false;
  bool within_bounds = false;
};

struct BoundReport {
  int m = 0;
  double p0 = 0.0;
  double pc1 = 0.0;
  std::optional<double> pc2;
  std::vector<BoundSample> samples;
  int qualifying = 0;
  int violations = 0;
  std::vector<std::string> notes;
};

struct BoundOptions {
  CriticalOptions critical;
  double sigma = 0.02;
  int trials = 10;          // qualifying samples wanted
  int max_draws = 60;       // total samples drawn at most
  std::uint64_t seed = 1;
};

/// Checks pc(S2) <= pc(S0) <= pc(S1), up to the bisection tolerance, for S0
/// samples on the decreasing branch: a discontinuous B-to-A transition at a
/// P_A above every minority committed fraction.
BoundReport bound_check_s0(int m, double p0, const BoundOptions& options);

struct TricriticalResult {
  double P_B = 0.0;
  double P_A = 0.0;
  std::vector<std::pair<double, SweepResult>> scan;
};

/// Two-opinion boundary between discontinuous and continuous transitions,
/// located by bisection on P_B in [lo, hi].
TricriticalResult find_tricritical(double lo, double hi, double tol, const CriticalOptions& options);

struct HeatmapCell {
  double row = 0.0;
  double col = 0.0;
  std::optional<double> critical;
};

std::vector<HeatmapCell> heatmap(const std::vector<double>& rows, const std::vector<double>& cols,
                                 const std::function<std::optional<double>(double, double)>& cell);

}  // namespace ngame

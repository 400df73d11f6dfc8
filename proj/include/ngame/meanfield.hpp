#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ngame/ode.hpp"
#include "ngame/opinion.hpp"

namespace ngame {

/// Densities over the uncommitted opinion states plus the committed fraction
/// of each single opinion.  Entries sum to one.
struct DensityVector {
  std::vector<double> x;
  std::vector<double> P;

  double total() const;
  /// Throws InvalidState unless entries are non-negative and sum to one
  /// within `tol`.
  void validate(double tol = 1e-12) const;
};

/// Mean-field system over some encoding of the uncommitted population
/// (the full 2^m - 1 states, or a symmetry-reduced orbit space).
class MeanFieldSystem : public OdeSystem {
 public:
  virtual int opinions() const = 0;
  virtual RuleVariant variant() const = 0;
  /// Committed fraction per single opinion (length m).
  virtual const std::vector<double>& committed() const = 0;
  /// Support n_i = pure single-state density + committed fraction.
  virtual std::vector<double> support(std::span<const double> x) const = 0;
  virtual std::string state_label(std::size_t k) const = 0;
  /// State with the given per-opinion uncommitted densities on the pure states
  /// and nothing in mixed states.
  virtual std::vector<double> pure_state(std::span<const double> x0_single) const = 0;

  double uncommitted_mass() const;
};

inline constexpr int kMaxFullOpinions = 20;

/// Mean-field dynamics over all 2^m - 1 uncommitted states (dense index
/// mask - 1).  One ordered speaker/listener pair is drawn per unit time with
/// probability equal to the product of the two densities; for the listener-only
/// rule this coincides with map(x) - x of the synchronous listener update.
class FullSystem final : public MeanFieldSystem {
 public:
  FullSystem(int m, std::vector<double> committed, RuleVariant variant, int max_opinions = kMaxFullOpinions);

  std::size_t dimension() const override { return n_states_; }
  void rhs(std::span<const double> x, std::span<double> dxdt) const override;
  int opinions() const override { return m_; }
  RuleVariant variant() const override { return variant_; }
  const std::vector<double>& committed() const override { return P_; }
  std::vector<double> support(std::span<const double> x) const override;
  std::string state_label(std::size_t k) const override;
  std::vector<double> pure_state(std::span<const double> x0_single) const override;

 private:
  int m_;
  std::size_t n_states_;
  std::vector<double> P_;
  RuleVariant variant_;
};

std::unique_ptr<FullSystem> build_system(int m, const std::vector<double>& committed, RuleVariant variant);

/// Literal two-opinion equations.  Returns (dx_A/dt, dx_B/dt); dx_AB/dt is the
/// negated sum.
std::array<double, 2> two_opinion_rhs(double xA, double xB, double xAB, double PA, double PB);

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
};

struct IntegrateOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  /// Record at multiples of this interval (plus t_end); 0 records every
  /// accepted step.
  double sample_dt = 0.0;
};

/// Adaptive integration from t = 0 to t_end.  Tiny negative excursions are
/// clipped and the mass re-normalised after each step.
Trajectory integrate(const MeanFieldSystem& system, std::span<const double> init, double t_end,
                     const IntegrateOptions& options = {});

struct SteadyStateOptions {
  double eps = 1e-10;
  double t_max = 1e5;
  double rtol = 1e-9;
  double atol = 1e-12;
};

struct SteadyState {
  std::vector<double> x;
  bool converged = false;
  double t = 0.0;
  double residual = 0.0;  // |dx/dt|_inf at the returned state
};

/// Integrates until |dx/dt|_inf < eps or t_max.  Non-convergence is reported
/// through the flag.
SteadyState steady_state(const MeanFieldSystem& system, std::span<const double> init,
                         const SteadyStateOptions& options = {});

/// n_i for each single opinion.
std::vector<double> observables(const MeanFieldSystem& system, std::span<const double> x);

}  // namespace ngame

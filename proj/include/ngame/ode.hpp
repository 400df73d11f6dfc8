#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ngame {

/// Autonomous first-order system dx/dt = f(x).
class OdeSystem {
 public:
  virtual ~OdeSystem() = default;
  virtual std::size_t dimension() const = 0;
  virtual void rhs(std::span<const double> x, std::span<double> dxdt) const = 0;
};

struct StepperOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double initial_step = 1e-3;
  double max_step = 0.0;  // 0: unbounded
};

/// Dormand-Prince 5(4) embedded Runge-Kutta stepper with PI step-size control.
/// The derivative at the current state is kept up to date (first-same-as-last),
/// so callers can test steady-state criteria without extra evaluations.
class Dopri5 {
 public:
  Dopri5(const OdeSystem& system, StepperOptions options = {});

  void reset(double t, std::span<const double> x);
  /// Takes one accepted step, never past t_limit.  Throws Error(Stiffness) when
  /// the step size underflows.
  void step(double t_limit);
  /// Marks the current state as externally modified so the derivative is
  /// recomputed.
  void state_modified();

  double time() const { return t_; }
  double last_step() const { return h_last_; }
  std::size_t accepted_steps() const { return accepted_; }
  std::size_t rejected_steps() const { return rejected_; }
  std::vector<double>& state() { return x_; }
  const std::vector<double>& state() const { return x_; }
  const std::vector<double>& derivative() const { return k1_; }

 private:
  const OdeSystem& sys_;
  StepperOptions opt_;
  double t_ = 0.0;
  double h_ = 0.0;
  double h_last_ = 0.0;
  double err_old_ = 1e-4;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
  std::vector<double> x_, k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, x_new_;
};

}  // namespace ngame

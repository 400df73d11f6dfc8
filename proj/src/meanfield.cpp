#include "ngame/meanfield.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ngame/error.hpp"

namespace ngame {

double DensityVector::total() const {
  return std::accumulate(x.begin(), x.end(), 0.0) + std::accumulate(P.begin(), P.end(), 0.0);
}

void DensityVector::validate(double tol) const {
  for (double v : x)
    if (!(v >= 0.0)) fail(ErrorCode::InvalidState, "negative or NaN density");
  for (double v : P)
    if (!(v >= 0.0)) fail(ErrorCode::InvalidState, "negative or NaN committed fraction");
  if (std::abs(total() - 1.0) > tol) {
    std::ostringstream os;
    os << "densities sum to " << total() << ", expected 1";
    fail(ErrorCode::InvalidState, os.str());
  }
}

double MeanFieldSystem::uncommitted_mass() const {
  const auto& P = committed();
  return 1.0 - std::accumulate(P.begin(), P.end(), 0.0);
}

FullSystem::FullSystem(int m, std::vector<double> committed, RuleVariant variant, int max_opinions)
    : m_(m), P_(std::move(committed)), variant_(variant) {
  if (m < 1) fail(ErrorCode::ContractViolation, "m must be at least 1");
  if (m > max_opinions || m > kMaxOpinions)
    fail(ErrorCode::ResourceLimit, "full state space capped at m=" + std::to_string(max_opinions));
  require(P_.size() == static_cast<std::size_t>(m), "committed fractions must have length m");
  for (double p : P_)
    if (!(p >= 0.0)) fail(ErrorCode::InfeasibleScenario, "committed fractions must be non-negative");
  if (std::accumulate(P_.begin(), P_.end(), 0.0) >= 1.0)
    fail(ErrorCode::InfeasibleScenario, "committed fractions sum to 1 or more");
  n_states_ = (std::size_t{1} << m) - 1;
}

void FullSystem::rhs(std::span<const double> x, std::span<double> dxdt) const {
  // Q[o]: probability a random speaker utters o.  H[o]: probability a random
  // listener already holds o.
  std::array<double, kMaxOpinions> Q{}, H{};
  for (int o = 0; o < m_; ++o) Q[o] = H[o] = P_[o];
  for (std::size_t k = 0; k < n_states_; ++k) {
    const double xk = x[k];
    if (xk == 0.0) continue;
    const auto mask = static_cast<OpinionSet::Mask>(k + 1);
    const double share = xk / std::popcount(mask);
    for (auto rest = mask; rest != 0; rest &= rest - 1) {
      const int o = std::countr_zero(rest);
      Q[o] += share;
      H[o] += xk;
    }
  }

  std::fill(dxdt.begin(), dxdt.end(), 0.0);
  const bool speaker_updates = variant_ == RuleVariant::Original;
  for (std::size_t k = 0; k < n_states_; ++k) {
    const double xk = x[k];
    if (xk == 0.0) continue;
    const auto mask = static_cast<OpinionSet::Mask>(k + 1);
    const double inv_size = 1.0 / std::popcount(mask);
    for (int o = 0; o < m_; ++o) {
      const auto bit = OpinionSet::Mask{1} << o;
      if (mask & bit) {
        // Success as listener (hears o) or as speaker (utters o to a holder).
        double rate = xk * Q[o];
        if (speaker_updates) rate += xk * inv_size * H[o];
        if (mask == bit) continue;
        dxdt[k] -= rate;
        dxdt[bit - 1] += rate;
      } else {
        const double rate = xk * Q[o];
        dxdt[k] -= rate;
        dxdt[(mask | bit) - 1] += rate;
      }
    }
  }
}

std::vector<double> FullSystem::support(std::span<const double> x) const {
  std::vector<double> n(m_);
  for (int o = 0; o < m_; ++o) n[o] = x[(std::size_t{1} << o) - 1] + P_[o];
  return n;
}

std::string FullSystem::state_label(std::size_t k) const { return state_name(OpinionSet::from_index(k)); }

std::vector<double> FullSystem::pure_state(std::span<const double> x0_single) const {
  require(x0_single.size() == static_cast<std::size_t>(m_), "initial allocation must have length m");
  std::vector<double> x(n_states_, 0.0);
  for (int o = 0; o < m_; ++o) x[(std::size_t{1} << o) - 1] = x0_single[o];
  return x;
}

std::unique_ptr<FullSystem> build_system(int m, const std::vector<double>& committed, RuleVariant variant) {
  return std::make_unique<FullSystem>(m, committed, variant);
}

std::array<double, 2> two_opinion_rhs(double xA, double xB, double xAB, double PA, double PB) {
  const double total = xA + xB + xAB + PA + PB;
  if (xA < 0 || xB < 0 || xAB < 0 || PA < 0 || PB < 0 || std::abs(total - 1.0) > 1e-9)
    fail(ErrorCode::ContractViolation, "two-opinion state is not a normalised density");
  const double dA = -xA * xB + xAB * xAB + xAB * xA + 1.5 * PA * xAB - PB * xA;
  const double dB = -xA * xB + xAB * xAB + xAB * xB + 1.5 * PB * xAB - PA * xB;
  return {dA, dB};
}

namespace {

void check_initial(const MeanFieldSystem& system, std::span<const double> init) {
  require(init.size() == system.dimension(), "initial state has the wrong dimension");
  double sum = 0.0;
  for (double v : init) {
    if (!(v >= 0.0)) fail(ErrorCode::InvalidState, "initial state has a negative density");
    sum += v;
  }
  if (std::abs(sum - system.uncommitted_mass()) > 1e-10)
    fail(ErrorCode::InvalidState, "initial state does not conserve total mass");
}

/// Clips round-off negatives and restores the mass.  Returns true when the
/// state was touched.
bool condition_state(std::vector<double>& x, double mass, double tol) {
  bool touched = false;
  double sum = 0.0;
  for (double& v : x) {
    if (v < 0.0) {
      if (v < -tol) {
        std::ostringstream os;
        os << "density fell to " << v << ", below the clipping tolerance " << tol;
        fail(ErrorCode::Stiffness, os.str());
      }
      v = 0.0;
      touched = true;
    }
    sum += v;
  }
  if (std::abs(sum - mass) > 1e-13 && sum > 0.0) {
    const double scale = mass / sum;
    for (double& v : x) v *= scale;
    touched = true;
  }
  return touched;
}

double inf_norm(const std::vector<double>& v) {
  double out = 0.0;
  for (double e : v) out = std::max(out, std::abs(e));
  return out;
}

// Newton iteration on f(x) = 0 with the mass constraint replacing one
// (linearly dependent) equation.  Near a stable node the adaptive stepper can
// stall on a spurious fixed point of the Runge-Kutta map with |f| ~ rtol, so the
// last digits are recovered here.  Leaves x untouched on failure.
bool newton_polish(const MeanFieldSystem& system, std::vector<double>& x, double eps, double& residual) {
  const auto n = static_cast<Eigen::Index>(x.size());
  std::vector<double> y = x, f(x.size()), fp(x.size()), fm(x.size());
  Eigen::MatrixXd J(n, n);
  Eigen::VectorXd rhs(n);
  for (int iter = 0; iter < 8; ++iter) {
    system.rhs(y, f);
    const double res = inf_norm(f);
    if (res < 1e-3 * eps) break;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double h = 1e-7 * std::max(1e-3, std::abs(y[j]));
      const double keep = y[j];
      y[j] = keep + h;
      system.rhs(y, fp);
      y[j] = keep - h;
      system.rhs(y, fm);
      y[j] = keep;
      for (Eigen::Index i = 0; i < n; ++i) J(i, j) = (fp[i] - fm[i]) / (2 * h);
    }
    for (Eigen::Index i = 0; i < n; ++i) rhs[i] = -f[i];
    J.row(n - 1).setOnes();
    rhs[n - 1] = 0.0;
    const Eigen::VectorXd delta = J.colPivHouseholderQr().solve(rhs);
    if (!delta.allFinite()) return false;
    for (Eigen::Index i = 0; i < n; ++i) y[i] += delta[i];
  }
  for (double& v : y) {
    if (v < -1e-12) return false;
    v = std::max(v, 0.0);
  }
  system.rhs(y, f);
  const double res = inf_norm(f);
  if (!(res < eps)) return false;
  double moved = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) moved = std::max(moved, std::abs(y[i] - x[i]));
  if (moved > 1e-6) return false;
  x = std::move(y);
  residual = res;
  return true;
}

}  // namespace

Trajectory integrate(const MeanFieldSystem& system, std::span<const double> init, double t_end,
                     const IntegrateOptions& options) {
  check_initial(system, init);
  require(options.rtol > 0 && options.atol > 0, "tolerances must be positive");
  const double mass = system.uncommitted_mass();
  const double clip_tol = 10.0 * std::max(options.rtol, options.atol);

  Dopri5 stepper(system, {options.rtol, options.atol});
  stepper.reset(0.0, init);
  Trajectory out;
  out.times.push_back(0.0);
  out.states.emplace_back(init.begin(), init.end());

  double next_sample = options.sample_dt > 0 ? options.sample_dt : t_end;
  while (stepper.time() < t_end) {
    const double limit = options.sample_dt > 0 ? std::min(next_sample, t_end) : t_end;
    stepper.step(limit);
    if (condition_state(stepper.state(), mass, clip_tol)) stepper.state_modified();
    const bool at_sample = options.sample_dt <= 0 || stepper.time() >= limit;
    if (at_sample) {
      out.times.push_back(stepper.time());
      out.states.push_back(stepper.state());
      if (options.sample_dt > 0 && stepper.time() >= next_sample) next_sample += options.sample_dt;
    }
  }
  return out;
}

SteadyState steady_state(const MeanFieldSystem& system, std::span<const double> init,
                         const SteadyStateOptions& options) {
  check_initial(system, init);
  require(options.eps > 0, "eps must be positive");
  const double mass = system.uncommitted_mass();
  const double clip_tol = 10.0 * std::max(options.rtol, options.atol);

  Dopri5 stepper(system, {options.rtol, options.atol});
  stepper.reset(0.0, init);
  SteadyState out;
  out.residual = inf_norm(stepper.derivative());
  double next_polish = 0.0;
  while (out.residual >= options.eps && stepper.time() < options.t_max) {
    stepper.step(options.t_max);
    if (condition_state(stepper.state(), mass, clip_tol)) stepper.state_modified();
    out.residual = inf_norm(stepper.derivative());
    if (out.residual < 100 * options.eps && out.residual >= options.eps && stepper.time() >= next_polish) {
      if (newton_polish(system, stepper.state(), options.eps, out.residual)) {
        stepper.state_modified();
        break;
      }
      next_polish = 2 * stepper.time() + 1.0;
    }
  }
  out.converged = out.residual < options.eps;
  out.t = stepper.time();
  out.x = stepper.state();
  return out;
}

std::vector<double> observables(const MeanFieldSystem& system, std::span<const double> x) {
  return system.support(x);
}

}  // namespace ngame

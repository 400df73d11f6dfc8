#include "ngame/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ngame/error.hpp"

namespace ngame {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Dopri5::Dopri5(const OdeSystem& system, StepperOptions options) : sys_(system), opt_(options) {
  const std::size_t n = sys_.dimension();
  for (auto* v : {&x_, &k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &x_new_}) v->assign(n, 0.0);
}

void Dopri5::reset(double t, std::span<const double> x) {
  require(x.size() == x_.size(), "initial state has the wrong dimension");
  t_ = t;
  std::copy(x.begin(), x.end(), x_.begin());
  h_ = opt_.initial_step;
  err_old_ = 1e-4;
  accepted_ = rejected_ = 0;
  sys_.rhs(x_, k1_);
}

void Dopri5::state_modified() { sys_.rhs(x_, k1_); }

void Dopri5::step(double t_limit) {
  const std::size_t n = x_.size();
  if (t_limit <= t_) return;
  for (;;) {
    double h = std::min(h_, t_limit - t_);
    if (opt_.max_step > 0) h = std::min(h, opt_.max_step);
    if (h < 1e-14 * std::max(1.0, std::abs(t_))) {
      double norm = 0.0;
      for (double v : x_) norm = std::max(norm, std::abs(v));
      std::ostringstream os;
      os << "step size underflow at t=" << t_ << " (h=" << h << ", |x|_inf=" << norm << ")";
      fail(ErrorCode::Stiffness, os.str());
    }

    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x_[i] + h * a21 * k1_[i];
    sys_.rhs(tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x_[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
    sys_.rhs(tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x_[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
    sys_.rhs(tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i)
      tmp_[i] = x_[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
    sys_.rhs(tmp_, k5_);
    for (std::size_t i = 0; i < n; ++i)
      tmp_[i] = x_[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
    sys_.rhs(tmp_, k6_);
    for (std::size_t i = 0; i < n; ++i)
      x_new_[i] = x_[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
    sys_.rhs(x_new_, k7_);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] + e7 * k7_[i]);
      const double sc = opt_.atol + opt_.rtol * std::max(std::abs(x_[i]), std::abs(x_new_[i]));
      err += (e / sc) * (e / sc);
    }
    err = n ? std::sqrt(err / static_cast<double>(n)) : 0.0;

    // PI controller (Hairer & Wanner, DOPRI5 defaults).
    const double fac11 = std::pow(std::max(err, 1e-16), 0.17);
    if (err <= 1.0) {
      double fac = fac11 / std::pow(err_old_, 0.04);
      fac = std::clamp(fac / 0.9, 0.2, 10.0);
      err_old_ = std::max(err, 1e-4);
      t_ += h;
      h_last_ = h;
      x_.swap(x_new_);
      k1_.swap(k7_);
      // A step clamped to t_limit must not shrink the next proposal.
      const bool clamped = h < h_;
      h_ = clamped ? std::max(h_, h / fac) : h / fac;
      ++accepted_;
      return;
    }
    ++rejected_;
    h_ = h / std::min(10.0, fac11 / 0.9);
  }
}

}  // namespace ngame

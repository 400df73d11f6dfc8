#include "ngame/recursive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ngame/error.hpp"
#include "ngame/symmetry.hpp"

namespace ngame {

namespace {

constexpr std::size_t kMaxDpStates = std::size_t{1} << 22;

// The sum equals the total mass, which is one exactly; dividing by it keeps
// rounding errors in the mass from doubling every step.
void normalize(std::vector<double>& Q) {
  const double sum = std::accumulate(Q.begin(), Q.end(), 0.0);
  for (double& q : Q) q /= sum;
}

}  // namespace

std::vector<double> mixed_length_densities(const OpinionGroups& groups, std::span<const double> origin,
                                           const std::vector<std::span<const double>>& q_sequence) {
  const int n = static_cast<int>(q_sequence.size());
  const std::size_t m = origin.size();
  const int n_groups = static_cast<int>(groups.size());
  std::vector<double> out(m, 0.0);
  if (n == 0) return out;

  std::vector<int> cap(n_groups), size(n_groups);
  std::vector<std::size_t> stride(n_groups);
  std::size_t n_codes = 1;
  for (int c = 0; c < n_groups; ++c) {
    size[c] = static_cast<int>(groups[c].size());
    cap[c] = std::min(size[c], n);
    stride[c] = n_codes;
    n_codes *= static_cast<std::size_t>(cap[c] + 1);
    if (n_codes > kMaxDpStates) fail(ErrorCode::ResourceLimit, "too many distinct opinion groups for the recursion");
  }

  // g[u]: sum over ordered sequences of distinct opinions whose per-group
  // usage is u, of the product of per-position hearing probabilities.
  std::vector<double> g(n_codes, 0.0);
  std::vector<int> u(n_groups, 0);
  std::vector<int> len(n_codes, 0);
  g[0] = 1.0;
  for (std::size_t code = 1; code < n_codes; ++code) {
    // Increment the mixed-radix counter u.
    for (int c = 0; c < n_groups; ++c) {
      if (++u[c] <= cap[c]) break;
      u[c] = 0;
    }
    int l = 0;
    for (int c = 0; c < n_groups; ++c) l += u[c];
    len[code] = l;
    if (l > n) continue;
    const std::span<const double> w = q_sequence[l - 1];
    double acc = 0.0;
    for (int c = 0; c < n_groups; ++c) {
      if (u[c] == 0) continue;
      acc += g[code - stride[c]] * w[groups[c].front()] * (size[c] - u[c] + 1);
    }
    g[code] = acc;
  }

  std::fill(u.begin(), u.end(), 0);
  std::vector<double> per_group(n_groups, 0.0);
  for (std::size_t code = 1; code < n_codes; ++code) {
    for (int c = 0; c < n_groups; ++c) {
      if (++u[c] <= cap[c]) break;
      u[c] = 0;
    }
    if (len[code] != n || g[code] == 0.0) continue;
    double outside = 0.0;  // density of pure states not among the heard opinions
    for (int c = 0; c < n_groups; ++c) outside += (size[c] - u[c]) * origin[groups[c].front()];
    for (int c = 0; c < n_groups; ++c) {
      const double holds = static_cast<double>(u[c]) / size[c];
      per_group[c] += g[code] * (holds * outside + (1.0 - holds) * origin[groups[c].front()]);
    }
  }
  for (int c = 0; c < n_groups; ++c)
    for (OpinionId o : groups[c]) out[o] = per_group[c];
  return out;
}

RecursiveEngine::RecursiveEngine(std::vector<double> committed, std::vector<double> x0_single)
    : m_(static_cast<int>(committed.size())), P_(std::move(committed)), x_(std::move(x0_single)) {
  if (m_ < 1 || m_ > kMaxOpinions) fail(ErrorCode::ContractViolation, "recursion needs 1..31 opinions");
  require(x_.size() == P_.size(), "P and x0 must have the same length");
  double total = 0.0;
  for (int o = 0; o < m_; ++o) {
    if (!(P_[o] >= 0.0) || !(x_[o] >= 0.0)) fail(ErrorCode::InvalidState, "negative density");
    total += P_[o] + x_[o];
  }
  if (std::abs(total - 1.0) > 1e-10) fail(ErrorCode::InvalidState, "initial densities must sum to 1");

  for (const auto& c : OpinionClassPartition::from_allocation(P_, x_).classes) groups_.push_back(c.members);

  depth_ = std::max(m_ - 1, 1);
  x_len_.assign(static_cast<std::size_t>(m_) * depth_, 0.0);
  Q_.resize(m_);
  for (int o = 0; o < m_; ++o) Q_[o] = x_[o] + P_[o];
  q_hist_.assign(static_cast<std::size_t>(depth_) * m_, 0.0);
  x_hist_.assign(static_cast<std::size_t>(depth_) * m_, 0.0);
  std::copy(Q_.begin(), Q_.end(), q_hist_.begin());
  std::copy(x_.begin(), x_.end(), x_hist_.begin());
}

const double* RecursiveEngine::q_back(int k) const {
  return q_hist_.data() + static_cast<std::size_t>((head_ - k + depth_) % depth_) * m_;
}

const double* RecursiveEngine::x_back(int k) const {
  return x_hist_.data() + static_cast<std::size_t>((head_ - k + depth_) % depth_) * m_;
}

void RecursiveEngine::step() {
  // Pure states: stay or collapse onto i when hearing i.
  std::vector<double> x_new(m_);
  for (int i = 0; i < m_; ++i) x_new[i] = (x_[i] + mixed_total(i)) * Q_[i];

  // Mixed states of length n+1: pure at t-n, then n growth steps.
  std::vector<double> len_new(x_len_.size(), 0.0);
  std::vector<std::span<const double>> seq;
  for (int n = 1; n <= m_ - 1; ++n) {
    if (n > t_ + 1) break;  // cold start: nothing of this length yet
    seq.clear();
    for (int k = 1; k <= n; ++k) seq.emplace_back(q_back(n - k), static_cast<std::size_t>(m_));
    const auto dens = mixed_length_densities(groups_, std::span<const double>(x_back(n - 1), m_), seq);
    for (int i = 0; i < m_; ++i) len_new[static_cast<std::size_t>(i) * depth_ + (n - 1)] = dens[i];
  }

  x_.swap(x_new);
  x_len_.swap(len_new);
  ++t_;
  Q_ = transmission_probabilities(*this);

  head_ = (head_ + 1) % depth_;
  std::copy(Q_.begin(), Q_.end(), q_hist_.begin() + static_cast<std::ptrdiff_t>(head_) * m_);
  std::copy(x_.begin(), x_.end(), x_hist_.begin() + static_cast<std::ptrdiff_t>(head_) * m_);
}

double RecursiveEngine::mixed_total(OpinionId i) const {
  if (m_ < 2) return 0.0;
  const auto first = x_len_.begin() + static_cast<std::ptrdiff_t>(i) * depth_;
  return std::accumulate(first, first + (m_ - 1), 0.0);
}

double RecursiveEngine::total_mass() const {
  double total = 0.0;
  for (int i = 0; i < m_; ++i) {
    total += x_[i] + P_[i];
    // A state of length n+1 is counted once per member.
    for (int n = 1; n <= m_ - 1; ++n) total += mixed(i, n) / (n + 1);
  }
  return total;
}

std::size_t RecursiveEngine::stored_values() const {
  return P_.size() + x_.size() + x_len_.size() + Q_.size() + q_hist_.size() + x_hist_.size();
}

std::vector<double> transmission_probabilities(const RecursiveEngine& state) {
  const int m = state.opinions();
  std::vector<double> Q(m);
  for (int i = 0; i < m; ++i) {
    double q = state.single()[i] + state.committed()[i];
    for (int n = 1; n <= m - 1; ++n) q += state.mixed(i, n) / (n + 1);
    Q[i] = q;
  }
  normalize(Q);
  return Q;
}

FullDiscreteState full_discrete_from_pure(const std::vector<double>& committed, const std::vector<double>& x0_single) {
  const int m = static_cast<int>(committed.size());
  if (m < 1 || m > kMaxFullOpinions) fail(ErrorCode::ResourceLimit, "full discrete state capped at m=20");
  require(x0_single.size() == committed.size(), "P and x0 must have the same length");
  FullDiscreteState s{std::vector<double>((std::size_t{1} << m) - 1, 0.0), committed};
  for (int o = 0; o < m; ++o) s.x[(std::size_t{1} << o) - 1] = x0_single[o];
  return s;
}

std::vector<double> full_transmission(const FullDiscreteState& state) {
  std::vector<double> Q(state.P);
  for (std::size_t k = 0; k < state.x.size(); ++k) {
    const OpinionSet s = OpinionSet::from_index(k);
    const double share = state.x[k] / s.size();
    for (OpinionId o : s.members()) Q[o] += share;
  }
  normalize(Q);
  return Q;
}

FullDiscreteState oracle_step(const FullDiscreteState& state) {
  const int m = static_cast<int>(state.P.size());
  const auto Q = full_transmission(state);
  FullDiscreteState next{std::vector<double>(state.x.size(), 0.0), state.P};
  for (std::size_t k = 0; k < state.x.size(); ++k) {
    const double xk = state.x[k];
    if (xk == 0.0) continue;
    const OpinionSet s = OpinionSet::from_index(k);
    for (OpinionId o = 0; o < m; ++o) {
      const OpinionSet to = s.contains(o) ? OpinionSet::single(o) : s.with(o);
      next.x[to.index()] += xk * Q[o];
    }
  }
  return next;
}

RecursiveSteadyState steady_state_recursive(RecursiveEngine init, double eps, std::int64_t max_steps) {
  require(eps > 0, "eps must be positive");
  RecursiveSteadyState out{std::move(init), false};
  for (std::int64_t k = 0; k < max_steps; ++k) {
    RecursiveEngine next = out.state;
    next.step();
    double diff = 0.0;
    for (int i = 0; i < next.opinions(); ++i)
      diff = std::max(diff, std::abs(next.single()[i] - out.state.single()[i]));
    if (diff < eps) {
      out.converged = true;
      return out;
    }
    out.state = std::move(next);
  }
  return out;
}

}  // namespace ngame

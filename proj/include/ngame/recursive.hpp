#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ngame/opinion.hpp"

namespace ngame {

/// Groups of opinions whose trajectories coincide; the ordered-tuple sums are
/// evaluated over per-group usage counts instead of individual opinions.
using OpinionGroups = std::vector<std::vector<OpinionId>>;

/// Density of mixed states of length n+1 containing each opinion i, for n =
/// q_sequence.size(): every such state was a pure state `origin` steps ago and
/// then heard n distinct new opinions, the k-th with probabilities
/// q_sequence[k].  Opinions in one group must share origin and q values.
std::vector<double> mixed_length_densities(const OpinionGroups& groups, std::span<const double> origin,
                                           const std::vector<std::span<const double>>& q_sequence);

/// Synchronous listener-only recursion that tracks pure-state densities,
/// per-length mixed aggregates and transmission probabilities, with a history
/// window of m-1 steps.
class RecursiveEngine {
 public:
  /// Starts from pure states only; opinions with equal (P, x0) are grouped.
  RecursiveEngine(std::vector<double> committed, std::vector<double> x0_single);

  void step();

  int opinions() const { return m_; }
  std::int64_t time() const { return t_; }
  const std::vector<double>& committed() const { return P_; }
  const std::vector<double>& single() const { return x_; }
  /// Q_i at the current time.
  const std::vector<double>& transmission() const { return Q_; }
  /// Aggregate density of mixed states of length n+1 containing opinion i.
  double mixed(OpinionId i, int n) const { return x_len_[static_cast<std::size_t>(i) * depth_ + (n - 1)]; }
  /// x_{i+}: all mixed states containing i.
  double mixed_total(OpinionId i) const;
  /// Reconstructed total mass of uncommitted plus committed agents.
  double total_mass() const;
  /// Number of doubles held by the state, O(m^2).
  std::size_t stored_values() const;
  const OpinionGroups& groups() const { return groups_; }

 private:
  const double* q_back(int k) const;  // Q^(t-k), k = 0..depth-1
  const double* x_back(int k) const;

  int m_;
  int depth_;  // history window, max(m-1, 1)
  std::int64_t t_ = 0;
  std::vector<double> P_;
  OpinionGroups groups_;
  std::vector<double> x_;
  std::vector<double> x_len_;  // m x depth
  std::vector<double> Q_;
  std::vector<double> q_hist_;  // ring, depth x m
  std::vector<double> x_hist_;
  int head_ = 0;
};

/// Q_i = x_i + P_i + sum_n mixed(i, n) / (n + 1), normalized to sum to one.
std::vector<double> transmission_probabilities(const RecursiveEngine& state);

/// Full-state synchronous listener-only map, used as the reference for the
/// recursion.
struct FullDiscreteState {
  std::vector<double> x;  // dense over 2^m - 1 states
  std::vector<double> P;
};

FullDiscreteState full_discrete_from_pure(const std::vector<double>& committed, const std::vector<double>& x0_single);
std::vector<double> full_transmission(const FullDiscreteState& state);
FullDiscreteState oracle_step(const FullDiscreteState& state);

struct RecursiveSteadyState {
  RecursiveEngine state;
  bool converged = false;
};

/// Iterates until successive pure-state densities differ by less than eps (the
/// returned state is the one whose successor is within eps).
RecursiveSteadyState steady_state_recursive(RecursiveEngine init, double eps = 1e-12,
                                            std::int64_t max_steps = 1'000'000);

}  // namespace ngame

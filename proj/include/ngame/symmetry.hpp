#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ngame/meanfield.hpp"

namespace ngame {

/// Opinions that are interchangeable: same committed fraction and same initial
/// uncommitted density.
struct OpinionClass {
  int size = 0;
  double P = 0.0;   // committed fraction per member opinion
  double x0 = 0.0;  // initial pure-state density per member opinion
  std::vector<OpinionId> members;
};

struct OpinionClassPartition {
  std::vector<OpinionClass> classes;

  int opinions() const;
  /// Fills missing member lists with consecutive ids and checks that the
  /// members cover 0..m-1 exactly once and that the mass sums to one.
  void validate();

  /// Groups opinions with identical (P_i, x0_i), in order of first occurrence.
  static OpinionClassPartition from_allocation(const std::vector<double>& P, const std::vector<double>& x0);
};

/// Orbits of opinion states under permutations within each class.  An orbit is
/// the vector u of how many opinions of each class a state contains; the
/// dense index is the mixed-radix code of u minus one.
class OrbitSpace {
 public:
  explicit OrbitSpace(std::vector<int> class_sizes);

  std::size_t size() const { return n_orbits_; }
  int classes() const { return static_cast<int>(sizes_.size()); }
  int class_size(int c) const { return sizes_[c]; }
  std::vector<int> usage(std::size_t orbit) const;
  std::size_t index(std::span<const int> usage) const;
  /// Number of full states in the orbit.
  double multiplicity(std::size_t orbit) const;

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> strides_;
  std::size_t n_orbits_;
};

/// Mean-field dynamics lumped onto the orbit space: y_u is the total density of
/// every state in orbit u.
class ReducedSystem final : public MeanFieldSystem {
 public:
  ReducedSystem(OpinionClassPartition partition, RuleVariant variant);

  std::size_t dimension() const override { return space_.size(); }
  void rhs(std::span<const double> y, std::span<double> dydt) const override;
  int opinions() const override { return m_; }
  RuleVariant variant() const override { return variant_; }
  const std::vector<double>& committed() const override { return P_; }
  std::vector<double> support(std::span<const double> y) const override;
  std::string state_label(std::size_t k) const override;
  std::vector<double> pure_state(std::span<const double> x0_single) const override;

  const OrbitSpace& space() const { return space_; }
  const OpinionClassPartition& partition() const { return partition_; }
  /// Orbit state of the partition's own initial condition.
  std::vector<double> initial_state() const;

 private:
  OpinionClassPartition partition_;
  RuleVariant variant_;
  OrbitSpace space_;
  int m_ = 0;
  int n_classes_ = 0;
  std::vector<double> P_;
  std::vector<int> opinion_class_;
  // Per orbit, per class: usage count and transition targets (flattened).
  std::vector<int> usage_;
  std::vector<double> inv_len_;
  std::vector<std::size_t> grow_;
  std::vector<std::size_t> single_;
};

std::unique_ptr<ReducedSystem> reduce_system(const OpinionClassPartition& partition, RuleVariant variant);

/// Expands an orbit state to the full 2^m - 1 state space (m <= 20).
DensityVector lift(const ReducedSystem& system, std::span<const double> orbit_state);
/// Lumps a full state onto the orbit space; throws ContractViolation unless
/// the state is symmetric under the partition (within `tol`).
std::vector<double> project(const ReducedSystem& system, const DensityVector& state, double tol = 1e-12);

}  // namespace ngame

#include "ngame/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ngame/error.hpp"

namespace ngame {

int OpinionClassPartition::opinions() const {
  int m = 0;
  for (const auto& c : classes) m += c.size;
  return m;
}

void OpinionClassPartition::validate() {
  // Zero-size classes carry no opinions.
  std::erase_if(classes, [](const OpinionClass& c) { return c.size == 0; });
  const int m = opinions();
  if (m < 1 || m > kMaxOpinions) fail(ErrorCode::ContractViolation, "partition must cover 1..31 opinions");
  OpinionId next = 0;
  std::vector<int> seen(m, 0);
  double mass = 0.0;
  for (auto& c : classes) {
    if (c.size < 0) fail(ErrorCode::ContractViolation, "negative class size");
    if (!(c.P >= 0.0) || !(c.x0 >= 0.0)) fail(ErrorCode::ContractViolation, "negative class fraction");
    if (c.members.empty())
      for (int k = 0; k < c.size; ++k) c.members.push_back(next++);
    if (static_cast<int>(c.members.size()) != c.size)
      fail(ErrorCode::ContractViolation, "class member list does not match its size");
    for (OpinionId o : c.members) {
      if (o < 0 || o >= m || seen[o]++) fail(ErrorCode::ContractViolation, "class members must partition 0..m-1");
    }
    mass += c.size * (c.P + c.x0);
  }
  if (std::abs(mass - 1.0) > 1e-10) fail(ErrorCode::ContractViolation, "partition mass does not sum to one");
}

OpinionClassPartition OpinionClassPartition::from_allocation(const std::vector<double>& P,
                                                             const std::vector<double>& x0) {
  require(P.size() == x0.size(), "allocation vectors differ in length");
  OpinionClassPartition out;
  for (std::size_t o = 0; o < P.size(); ++o) {
    auto it = std::find_if(out.classes.begin(), out.classes.end(),
                           [&](const OpinionClass& c) { return c.P == P[o] && c.x0 == x0[o]; });
    if (it == out.classes.end()) {
      out.classes.push_back({0, P[o], x0[o], {}});
      it = std::prev(out.classes.end());
    }
    ++it->size;
    it->members.push_back(static_cast<OpinionId>(o));
  }
  return out;
}

OrbitSpace::OrbitSpace(std::vector<int> class_sizes) : sizes_(std::move(class_sizes)) {
  std::size_t stride = 1;
  for (int s : sizes_) {
    strides_.push_back(stride);
    stride *= static_cast<std::size_t>(s + 1);
  }
  n_orbits_ = stride - 1;
}

std::vector<int> OrbitSpace::usage(std::size_t orbit) const {
  std::vector<int> u(sizes_.size());
  std::size_t code = orbit + 1;
  for (std::size_t c = 0; c < sizes_.size(); ++c) {
    u[c] = static_cast<int>(code % (sizes_[c] + 1));
    code /= sizes_[c] + 1;
  }
  return u;
}

std::size_t OrbitSpace::index(std::span<const int> usage) const {
  std::size_t code = 0;
  for (std::size_t c = 0; c < sizes_.size(); ++c) code += strides_[c] * static_cast<std::size_t>(usage[c]);
  require(code > 0, "the empty opinion state has no orbit");
  return code - 1;
}

double OrbitSpace::multiplicity(std::size_t orbit) const {
  const auto u = usage(orbit);
  double n = 1.0;
  for (std::size_t c = 0; c < u.size(); ++c) {
    // binomial(sizes_[c], u[c])
    double b = 1.0;
    for (int k = 1; k <= u[c]; ++k) b = b * (sizes_[c] - u[c] + k) / k;
    n *= b;
  }
  return n;
}

namespace {

std::vector<int> sizes_of(const OpinionClassPartition& p) {
  std::vector<int> out;
  for (const auto& c : p.classes) out.push_back(c.size);
  return out;
}

OpinionClassPartition validated(OpinionClassPartition p) {
  p.validate();
  return p;
}

}  // namespace

ReducedSystem::ReducedSystem(OpinionClassPartition partition, RuleVariant variant)
    : partition_(validated(std::move(partition))), variant_(variant), space_(sizes_of(partition_)) {
  m_ = partition_.opinions();
  n_classes_ = space_.classes();
  P_.assign(m_, 0.0);
  opinion_class_.assign(m_, 0);
  double committed = 0.0;
  for (int c = 0; c < n_classes_; ++c) {
    for (OpinionId o : partition_.classes[c].members) {
      P_[o] = partition_.classes[c].P;
      opinion_class_[o] = c;
      committed += P_[o];
    }
  }
  if (committed >= 1.0) fail(ErrorCode::InfeasibleScenario, "committed fractions sum to 1 or more");

  const std::size_t n = space_.size();
  usage_.resize(n * n_classes_);
  inv_len_.resize(n);
  grow_.assign(n * n_classes_, 0);
  single_.resize(n_classes_);
  for (int c = 0; c < n_classes_; ++c) {
    std::vector<int> e(n_classes_, 0);
    e[c] = 1;
    single_[c] = space_.index(e);
  }
  for (std::size_t k = 0; k < n; ++k) {
    auto u = space_.usage(k);
    inv_len_[k] = 1.0 / std::accumulate(u.begin(), u.end(), 0);
    for (int c = 0; c < n_classes_; ++c) {
      usage_[k * n_classes_ + c] = u[c];
      if (u[c] < space_.class_size(c)) {
        ++u[c];
        grow_[k * n_classes_ + c] = space_.index(u);
        --u[c];
      }
    }
  }
}

void ReducedSystem::rhs(std::span<const double> y, std::span<double> dydt) const {
  // Per-opinion utterance and holding probabilities, uniform within a class.
  std::array<double, kMaxOpinions> Q{}, H{};
  for (int c = 0; c < n_classes_; ++c) Q[c] = H[c] = partition_.classes[c].P;
  const std::size_t n = space_.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (y[k] == 0.0) continue;
    for (int c = 0; c < n_classes_; ++c) {
      const int u = usage_[k * n_classes_ + c];
      if (u == 0) continue;
      const double held = y[k] * u / space_.class_size(c);
      H[c] += held;
      Q[c] += held * inv_len_[k];
    }
  }

  std::fill(dydt.begin(), dydt.end(), 0.0);
  const bool speaker_updates = variant_ == RuleVariant::Original;
  for (std::size_t k = 0; k < n; ++k) {
    const double yk = y[k];
    if (yk == 0.0) continue;
    for (int c = 0; c < n_classes_; ++c) {
      const int u = usage_[k * n_classes_ + c];
      const int s = space_.class_size(c);
      if (u > 0 && k != single_[c]) {
        double rate = yk * u * Q[c];
        if (speaker_updates) rate += yk * u * inv_len_[k] * H[c];
        dydt[k] -= rate;
        dydt[single_[c]] += rate;
      }
      if (u < s) {
        const double rate = yk * (s - u) * Q[c];
        dydt[k] -= rate;
        dydt[grow_[k * n_classes_ + c]] += rate;
      }
    }
  }
}

std::vector<double> ReducedSystem::support(std::span<const double> y) const {
  std::vector<double> n(m_);
  for (int o = 0; o < m_; ++o) {
    const int c = opinion_class_[o];
    n[o] = y[single_[c]] / space_.class_size(c) + P_[o];
  }
  return n;
}

std::string ReducedSystem::state_label(std::size_t k) const {
  const auto u = space_.usage(k);
  std::string out;
  for (int c = 0; c < n_classes_; ++c) {
    if (u[c] == 0) continue;
    if (!out.empty()) out += '+';
    const auto& cls = partition_.classes[c];
    if (cls.size == 1) {
      out += opinion_name(cls.members.front());
    } else {
      out += '[' + opinion_name(cls.members.front()) + ".." + opinion_name(cls.members.back()) + ']';
      out += '*' + std::to_string(u[c]);
    }
  }
  return out;
}

std::vector<double> ReducedSystem::pure_state(std::span<const double> x0_single) const {
  require(x0_single.size() == static_cast<std::size_t>(m_), "initial allocation must have length m");
  std::vector<double> y(space_.size(), 0.0);
  for (int c = 0; c < n_classes_; ++c) {
    const auto& members = partition_.classes[c].members;
    const double first = x0_single[members.front()];
    for (OpinionId o : members) {
      if (std::abs(x0_single[o] - first) > 1e-15)
        fail(ErrorCode::ContractViolation, "initial condition is not symmetric under the partition");
      y[single_[c]] += x0_single[o];
    }
  }
  return y;
}

std::vector<double> ReducedSystem::initial_state() const {
  std::vector<double> x0(m_);
  for (const auto& c : partition_.classes)
    for (OpinionId o : c.members) x0[o] = c.x0;
  return pure_state(x0);
}

std::unique_ptr<ReducedSystem> reduce_system(const OpinionClassPartition& partition, RuleVariant variant) {
  return std::make_unique<ReducedSystem>(partition, variant);
}

namespace {

std::vector<int> usage_of(const ReducedSystem& system, OpinionSet s) {
  const auto& cls = system.partition().classes;
  std::vector<int> u(cls.size(), 0);
  for (std::size_t c = 0; c < cls.size(); ++c)
    for (OpinionId o : cls[c].members) u[c] += s.contains(o) ? 1 : 0;
  return u;
}

}  // namespace

DensityVector lift(const ReducedSystem& system, std::span<const double> orbit_state) {
  const int m = system.opinions();
  if (m > kMaxFullOpinions) fail(ErrorCode::ResourceLimit, "lift to the full state space capped at m=20");
  require(orbit_state.size() == system.dimension(), "orbit state has the wrong dimension");
  const std::size_t n_states = (std::size_t{1} << m) - 1;
  DensityVector out{std::vector<double>(n_states), system.committed()};
  const auto& space = system.space();
  for (std::size_t k = 0; k < n_states; ++k) {
    const std::size_t orbit = space.index(usage_of(system, OpinionSet::from_index(k)));
    out.x[k] = orbit_state[orbit] / space.multiplicity(orbit);
  }
  return out;
}

std::vector<double> project(const ReducedSystem& system, const DensityVector& state, double tol) {
  const int m = system.opinions();
  const std::size_t n_states = (std::size_t{1} << m) - 1;
  require(state.x.size() == n_states && state.P.size() == static_cast<std::size_t>(m),
          "state does not match the partition's opinion count");
  for (int o = 0; o < m; ++o)
    if (std::abs(state.P[o] - system.committed()[o]) > tol)
      fail(ErrorCode::ContractViolation, "committed fractions are not symmetric under the partition");

  const auto& space = system.space();
  std::vector<double> y(space.size(), 0.0);
  std::vector<double> first(space.size(), -1.0);
  for (std::size_t k = 0; k < n_states; ++k) {
    const std::size_t orbit = space.index(usage_of(system, OpinionSet::from_index(k)));
    if (first[orbit] < 0.0) {
      first[orbit] = state.x[k];
    } else if (std::abs(state.x[k] - first[orbit]) > tol) {
      fail(ErrorCode::ContractViolation, "state is not symmetric under the partition");
    }
    y[orbit] += state.x[k];
  }
  return y;
}

}  // namespace ngame

#include "ngame/network.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "ngame/error.hpp"
#include "ngame/rng.hpp"

namespace ngame {

const char* to_string(NetworkKind kind) {
  switch (kind) {
    case NetworkKind::Complete: return "complete";
    case NetworkKind::ER: return "er";
    case NetworkKind::SW: return "sw";
    case NetworkKind::SF: return "sf";
  }
  return "complete";
}

NetworkKind parse_network_kind(const std::string& text) {
  for (auto k : {NetworkKind::Complete, NetworkKind::ER, NetworkKind::SW, NetworkKind::SF})
    if (text == to_string(k)) return k;
  fail(ErrorCode::Config, "unknown network kind '" + text + "'");
}

Network::Network(NetworkKind kind, int n, NetworkParams params, std::uint64_t seed,
                 const std::vector<std::pair<int, int>>& edges)
    : kind_(kind), n_(n), params_(params), seed_(seed) {
  std::vector<int> deg(n, 0);
  for (auto [a, b] : edges) {
    require(a != b && a >= 0 && b >= 0 && a < n && b < n, "invalid edge");
    ++deg[a];
    ++deg[b];
  }
  offsets_.assign(n + 1, 0);
  for (int v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
  targets_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (auto [a, b] : edges) {
    targets_[fill[a]++] = b;
    targets_[fill[b]++] = a;
  }
  for (int v = 0; v < n; ++v) std::sort(targets_.begin() + offsets_[v], targets_.begin() + offsets_[v + 1]);
}

Network Network::complete(int n) {
  Network g;
  g.kind_ = NetworkKind::Complete;
  g.n_ = n;
  g.params_.avg_degree = n - 1;
  return g;
}

std::size_t Network::edge_count() const {
  if (implicit_complete()) return static_cast<std::size_t>(n_) * (n_ - 1) / 2;
  return targets_.size() / 2;
}

int Network::degree(int v) const {
  if (implicit_complete()) return n_ - 1;
  return static_cast<int>(offsets_[v + 1] - offsets_[v]);
}

double Network::mean_degree() const { return n_ ? 2.0 * static_cast<double>(edge_count()) / n_ : 0.0; }

std::span<const int> Network::neighbors(int v) const {
  require(!implicit_complete(), "complete graphs have no explicit neighbour lists");
  return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

std::vector<int> Network::neighbor_list(int v) const {
  if (!implicit_complete()) {
    auto s = neighbors(v);
    return {s.begin(), s.end()};
  }
  std::vector<int> out;
  for (int u = 0; u < n_; ++u)
    if (u != v) out.push_back(u);
  return out;
}

namespace {

int integral_degree(double k, const char* what) {
  const double r = std::round(k);
  if (std::abs(k - r) > 1e-9 || r < 1) fail(ErrorCode::InfeasibleScenario, what);
  return static_cast<int>(r);
}

std::vector<std::pair<int, int>> erdos_renyi(int n, double avg_degree, Xoshiro256& rng) {
  const auto max_edges = static_cast<long long>(n) * (n - 1) / 2;
  const auto m = std::llround(n * avg_degree / 2.0);
  if (m < 0 || m > max_edges) fail(ErrorCode::InfeasibleScenario, "ER edge count exceeds n(n-1)/2");
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(m) * 2);
  std::vector<std::pair<int, int>> edges;
  edges.reserve(m);
  while (static_cast<long long>(edges.size()) < m) {
    int a = static_cast<int>(rng.below(n));
    int b = static_cast<int>(rng.below(n));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (seen.insert((static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b)).second)
      edges.emplace_back(a, b);
  }
  return edges;
}

std::vector<std::pair<int, int>> watts_strogatz(int n, double avg_degree, double beta, Xoshiro256& rng) {
  const int k = integral_degree(avg_degree, "SW degree must be a positive integer");
  if (k % 2 != 0) fail(ErrorCode::InfeasibleScenario, "SW ring degree must be even");
  if (k >= n) fail(ErrorCode::InfeasibleScenario, "SW ring degree must be below n");
  if (beta < 0 || beta > 1) fail(ErrorCode::InfeasibleScenario, "SW rewiring probability must be in [0, 1]");
  std::vector<std::vector<int>> adj(n);
  auto has = [&](int a, int b) { return std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end(); };
  auto add = [&](int a, int b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  auto remove = [&](int a, int b) {
    std::erase(adj[a], b);
    std::erase(adj[b], a);
  };
  for (int j = 1; j <= k / 2; ++j)
    for (int u = 0; u < n; ++u) add(u, (u + j) % n);
  // Rewire each lattice edge (u, u+j) by moving its far end.
  for (int j = 1; j <= k / 2; ++j) {
    for (int u = 0; u < n; ++u) {
      if (rng.uniform() >= beta) continue;
      const int v = (u + j) % n;
      if (static_cast<int>(adj[u].size()) >= n - 1) continue;
      int w = static_cast<int>(rng.below(n));
      while (w == u || has(u, w)) w = static_cast<int>(rng.below(n));
      remove(u, v);
      add(u, w);
    }
  }
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v : adj[u])
      if (u < v) edges.emplace_back(u, v);
  return edges;
}

std::vector<std::pair<int, int>> barabasi_albert(int n, double avg_degree, Xoshiro256& rng) {
  const int k = integral_degree(avg_degree, "SF degree must be a positive integer");
  if (k % 2 != 0) fail(ErrorCode::InfeasibleScenario, "SF average degree must be even (2 x attachment count)");
  const int m = k / 2;
  if (m >= n) fail(ErrorCode::InfeasibleScenario, "SF attachment count must be below n");
  std::vector<std::pair<int, int>> edges;
  std::vector<int> repeated;
  std::vector<int> targets(m);
  for (int i = 0; i < m; ++i) targets[i] = i;
  for (int source = m; source < n; ++source) {
    for (int t : targets) {
      edges.emplace_back(t, source);
      repeated.push_back(t);
      repeated.push_back(source);
    }
    // m distinct nodes, drawn proportionally to degree.
    targets.clear();
    while (static_cast<int>(targets.size()) < m) {
      const int c = repeated[rng.below(static_cast<std::uint32_t>(repeated.size()))];
      if (std::find(targets.begin(), targets.end(), c) == targets.end()) targets.push_back(c);
    }
  }
  return edges;
}

}  // namespace

Network gen_network(NetworkKind kind, int n, const NetworkParams& params, std::uint64_t seed) {
  if (n < 2) fail(ErrorCode::InfeasibleScenario, "network needs at least two nodes");
  if (kind == NetworkKind::Complete) return Network::complete(n);
  Xoshiro256 rng(seed);
  switch (kind) {
    case NetworkKind::ER: return Network(kind, n, params, seed, erdos_renyi(n, params.avg_degree, rng));
    case NetworkKind::SW: return Network(kind, n, params, seed, watts_strogatz(n, params.avg_degree, params.beta, rng));
    case NetworkKind::SF: return Network(kind, n, params, seed, barabasi_albert(n, params.avg_degree, rng));
    case NetworkKind::Complete: break;
  }
  return Network::complete(n);
}

}  // namespace ngame

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ngame {

enum class NetworkKind { Complete, ER, SW, SF };

const char* to_string(NetworkKind kind);
NetworkKind parse_network_kind(const std::string& text);

struct NetworkParams {
  /// ER: 2M/n; SW: ring degree k (even); SF: 2 * attachment count.
  double avg_degree = 8.0;
  /// SW rewiring probability.
  double beta = 0.1;
};

/// Simple undirected graph in compressed adjacency form.  Complete graphs are
/// implicit: neighbours of v are all other nodes.
class Network {
 public:
  Network() = default;
  Network(NetworkKind kind, int n, NetworkParams params, std::uint64_t seed,
          const std::vector<std::pair<int, int>>& edges);
  static Network complete(int n);

  NetworkKind kind() const { return kind_; }
  int size() const { return n_; }
  const NetworkParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t edge_count() const;
  int degree(int v) const;
  double mean_degree() const;
  bool implicit_complete() const { return kind_ == NetworkKind::Complete; }
  /// Explicit neighbour list (not available for implicit complete graphs).
  std::span<const int> neighbors(int v) const;
  /// Materialised neighbours for any kind.
  std::vector<int> neighbor_list(int v) const;

 private:
  NetworkKind kind_ = NetworkKind::Complete;
  int n_ = 0;
  NetworkParams params_;
  std::uint64_t seed_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<int> targets_;
};

/// ER is G(n, M) with M = round(n * <k> / 2); SW is a ring lattice with k
/// neighbours rewired with probability beta; SF is Barabasi-Albert with
/// <k>/2 edges per new node.  Deterministic given the seed.
Network gen_network(NetworkKind kind, int n, const NetworkParams& params, std::uint64_t seed);

}  // namespace ngame

#pragma once
// Directed communication topologies: fixed graphs, per-step Bernoulli
// sampling, and rootedness checks for the normal-node subnetwork.
//
// Node ids are 0-based everywhere in the library; config files and exports
// use the paper's 1-based labels and the harness converts at the boundary.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "wlsim/rng.hpp"

namespace wlsim::topo {

struct Digraph {
  int n = 0;
  // in[i] = sorted in-neighbor set N_i = { j : edge j -> i }.
  std::vector<std::vector<int>> in;

  explicit Digraph(int nodes = 0) : n(nodes), in(static_cast<size_t>(nodes)) {}

  // edges are (from, to) pairs; symmetric inserts both directions.
  static Digraph from_edges(int n, std::span<const std::pair<int, int>> edges,
                            bool symmetric);

  void add_edge(int from, int to);  // rejects self-loops and bad ids
  const std::vector<int>& in_neighbors(int i) const;
  bool has_edge(int from, int to) const;
  int64_t directed_edge_count() const;
  bool operator==(const Digraph&) const = default;
};

// True iff some node has a directed path to every other node. Computed by
// strongly-connected-component condensation: rooted iff the condensation has
// exactly one source component.
bool is_rooted(const Digraph& g);

// is_rooted on the subgraph induced by `keep` (edges with both ends kept).
bool is_rooted_subgraph(const Digraph& g, std::span<const int> keep);

class TopologyProvider {
 public:
  TopologyProvider() = default;  // empty fixed graph; rejected by validation

  static TopologyProvider fixed(Digraph g);
  static TopologyProvider stochastic(int n, double edge_prob, bool symmetric);

  bool is_fixed() const { return fixed_; }
  int n() const { return n_; }
  double edge_prob() const { return edge_prob_; }
  bool symmetric() const { return symmetric_; }
  const Digraph& fixed_graph() const;

  // The step-k instance. Fixed mode returns the stored graph; stochastic mode
  // draws every pair from the stream's blocks [k*pairs, (k+1)*pairs), so the
  // result depends only on (stream identity, k).
  Digraph sample(const rng::Substream& stream, int64_t k) const;
  // Same draw, reusing the adjacency storage of `out`.
  void sample_into(const rng::Substream& stream, int64_t k, Digraph& out) const;

 private:
  bool fixed_ = true;
  int n_ = 0;
  double edge_prob_ = 0.0;
  bool symmetric_ = true;
  Digraph graph_;
};

}  // namespace wlsim::topo

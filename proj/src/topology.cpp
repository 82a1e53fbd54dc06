#include "wlsim/topology.hpp"

#include <algorithm>
#include <stdexcept>

#include "wlsim/kernels.hpp"

namespace wlsim::topo {

namespace {

void check_node(const Digraph& g, int i) {
  if (i < 0 || i >= g.n) throw std::invalid_argument("node id out of range");
}

}  // namespace

Digraph Digraph::from_edges(int n, std::span<const std::pair<int, int>> edges,
                            bool symmetric) {
  Digraph g(n);
  for (const auto& [a, b] : edges) {
    g.add_edge(a, b);
    if (symmetric) g.add_edge(b, a);
  }
  for (auto& nb : g.in) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

void Digraph::add_edge(int from, int to) {
  check_node(*this, from);
  check_node(*this, to);
  if (from == to) throw std::invalid_argument("self-loops are not allowed");
  in[static_cast<size_t>(to)].push_back(from);
}

const std::vector<int>& Digraph::in_neighbors(int i) const {
  check_node(*this, i);
  return in[static_cast<size_t>(i)];
}

bool Digraph::has_edge(int from, int to) const {
  check_node(*this, from);
  check_node(*this, to);
  const auto& nb = in[static_cast<size_t>(to)];
  return std::binary_search(nb.begin(), nb.end(), from);
}

int64_t Digraph::directed_edge_count() const {
  int64_t c = 0;
  for (const auto& nb : in) c += static_cast<int64_t>(nb.size());
  return c;
}

bool is_rooted(const Digraph& g) {
  if (g.n <= 1) return true;
  const size_t n = static_cast<size_t>(g.n);

  // Forward adjacency (edge j -> i is stored on i's in-list).
  std::vector<std::vector<int>> out(n);
  for (int i = 0; i < g.n; ++i)
    for (int j : g.in[static_cast<size_t>(i)])
      out[static_cast<size_t>(j)].push_back(i);

  // Iterative Tarjan SCC.
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  int next_index = 0, comp_count = 0;

  struct Frame {
    int v;
    size_t edge;
  };
  std::vector<Frame> call;
  for (int start = 0; start < g.n; ++start) {
    if (index[static_cast<size_t>(start)] != -1) continue;
    call.push_back({start, 0});
    index[static_cast<size_t>(start)] = low[static_cast<size_t>(start)] =
        next_index++;
    stack.push_back(start);
    on_stack[static_cast<size_t>(start)] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      const size_t v = static_cast<size_t>(f.v);
      if (f.edge < out[v].size()) {
        const int w = out[v][f.edge++];
        const size_t wu = static_cast<size_t>(w);
        if (index[wu] == -1) {
          index[wu] = low[wu] = next_index++;
          stack.push_back(w);
          on_stack[wu] = 1;
          call.push_back({w, 0});
        } else if (on_stack[wu]) {
          low[v] = std::min(low[v], index[wu]);
        }
      } else {
        if (low[v] == index[v]) {
          while (true) {
            const int w = stack.back();
            stack.pop_back();
            on_stack[static_cast<size_t>(w)] = 0;
            comp[static_cast<size_t>(w)] = comp_count;
            if (w == f.v) break;
          }
          ++comp_count;
        }
        call.pop_back();
        if (!call.empty()) {
          const size_t p = static_cast<size_t>(call.back().v);
          low[p] = std::min(low[p], low[v]);
        }
      }
    }
  }

  // Source components of the condensation: components with no incoming edge
  // from a different component.
  std::vector<char> has_incoming(static_cast<size_t>(comp_count), 0);
  for (int i = 0; i < g.n; ++i)
    for (int j : g.in[static_cast<size_t>(i)])
      if (comp[static_cast<size_t>(j)] != comp[static_cast<size_t>(i)])
        has_incoming[static_cast<size_t>(comp[static_cast<size_t>(i)])] = 1;
  int sources = 0;
  for (char h : has_incoming)
    if (!h) ++sources;
  return sources == 1;
}

bool is_rooted_subgraph(const Digraph& g, std::span<const int> keep) {
  if (keep.empty()) throw std::invalid_argument("keep set must be nonempty");
  std::vector<int> remap(static_cast<size_t>(g.n), -1);
  int m = 0;
  for (int v : keep) {
    check_node(g, v);
    if (remap[static_cast<size_t>(v)] == -1)
      remap[static_cast<size_t>(v)] = m++;
  }
  Digraph sub(m);
  for (int v : keep) {
    const int vi = remap[static_cast<size_t>(v)];
    for (int j : g.in[static_cast<size_t>(v)]) {
      const int ji = remap[static_cast<size_t>(j)];
      if (ji != -1) sub.in[static_cast<size_t>(vi)].push_back(ji);
    }
  }
  for (auto& nb : sub.in) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return is_rooted(sub);
}

TopologyProvider TopologyProvider::fixed(Digraph g) {
  TopologyProvider p;
  p.fixed_ = true;
  p.n_ = g.n;
  p.graph_ = std::move(g);
  return p;
}

TopologyProvider TopologyProvider::stochastic(int n, double edge_prob,
                                              bool symmetric) {
  if (n <= 0) throw std::invalid_argument("stochastic topology needs n > 0");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
    throw std::invalid_argument("edge_prob must lie in [0, 1]");
  TopologyProvider p;
  p.fixed_ = false;
  p.n_ = n;
  p.edge_prob_ = edge_prob;
  p.symmetric_ = symmetric;
  return p;
}

const Digraph& TopologyProvider::fixed_graph() const {
  if (!fixed_) throw std::logic_error("not a fixed topology");
  return graph_;
}

Digraph TopologyProvider::sample(const rng::Substream& stream,
                                 int64_t k) const {
  Digraph g;
  sample_into(stream, k, g);
  return g;
}

void TopologyProvider::sample_into(const rng::Substream& stream, int64_t k,
                                   Digraph& out) const {
  if (fixed_) {
    out = graph_;
    return;
  }
  out.n = n_;
  out.in.resize(static_cast<size_t>(n_));
  for (auto& nb : out.in) nb.clear();

  const uint64_t npairs = symmetric_
                              ? static_cast<uint64_t>(n_) * (n_ - 1) / 2
                              : static_cast<uint64_t>(n_) * (n_ - 1);
  if (npairs == 0) return;
  thread_local std::vector<double> u;
  u.resize(npairs);
  kernels::u01_blocks(stream.key(), stream.prefix(),
                      static_cast<uint64_t>(k) * npairs, u.data(), npairs);
  size_t m = 0;
  if (symmetric_) {
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j, ++m)
        if (u[m] < edge_prob_) {
          out.in[static_cast<size_t>(i)].push_back(j);
          out.in[static_cast<size_t>(j)].push_back(i);
        }
  } else {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        if (i == j) continue;
        // draw for directed edge i -> j lands in j's in-list
        if (u[m++] < edge_prob_) out.in[static_cast<size_t>(j)].push_back(i);
      }
  }
  for (auto& nb : out.in) std::sort(nb.begin(), nb.end());
}

}  // namespace wlsim::topo

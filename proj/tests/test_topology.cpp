#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "wlsim/rng.hpp"
#include "wlsim/topology.hpp"

using namespace wlsim;
using topo::Digraph;

namespace {

Digraph complete(int n) {
  Digraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) g.add_edge(i, j);
  for (auto& nb : g.in) std::sort(nb.begin(), nb.end());
  return g;
}

// Brute-force oracle: some node reaches all others along directed edges.
bool rooted_oracle(const Digraph& g) {
  std::vector<std::vector<int>> out(static_cast<size_t>(g.n));
  for (int i = 0; i < g.n; ++i)
    for (int j : g.in_neighbors(i)) out[static_cast<size_t>(j)].push_back(i);
  for (int root = 0; root < g.n; ++root) {
    std::vector<char> seen(static_cast<size_t>(g.n), 0);
    std::vector<int> stack{root};
    seen[static_cast<size_t>(root)] = 1;
    int count = 0;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      ++count;
      for (int w : out[static_cast<size_t>(v)])
        if (!seen[static_cast<size_t>(w)]) {
          seen[static_cast<size_t>(w)] = 1;
          stack.push_back(w);
        }
    }
    if (count == g.n) return true;
  }
  return g.n <= 1;
}

}  // namespace

TEST_CASE("in_neighbors basics") {
  CHECK(complete(3).in_neighbors(0) == std::vector<int>{1, 2});
  CHECK(Digraph(4).in_neighbors(0).empty());

  Digraph chain(3);  // 0 -> 1 -> 2
  chain.add_edge(0, 1);
  chain.add_edge(1, 2);
  CHECK(chain.in_neighbors(1) == std::vector<int>{0});
  CHECK_THROWS_AS((void)chain.in_neighbors(7), std::invalid_argument);
  CHECK_THROWS_AS(chain.add_edge(1, 1), std::invalid_argument);
}

TEST_CASE("is_rooted examples") {
  CHECK(topo::is_rooted(complete(4)));

  Digraph two_cycles(4);
  two_cycles.add_edge(0, 1);
  two_cycles.add_edge(1, 0);
  two_cycles.add_edge(2, 3);
  two_cycles.add_edge(3, 2);
  CHECK_FALSE(topo::is_rooted(two_cycles));

  Digraph vee(3);  // 0 -> 1, 2 -> 1: no single root
  vee.add_edge(0, 1);
  vee.add_edge(2, 1);
  CHECK_FALSE(topo::is_rooted(vee));
  CHECK(rooted_oracle(vee) == false);
}

TEST_CASE("is_rooted agrees with brute-force reachability on n <= 5") {
  rng::Substream s = rng::Substream(1234).child("graphs");
  uint64_t block = 0;
  for (int trial = 0; trial < 1500; ++trial) {
    const int n = 2 + static_cast<int>(s.u01_at(block++) * 4.0);
    const double p = s.u01_at(block++);
    Digraph g(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && s.u01_at(block++) < p) g.add_edge(i, j);
    for (auto& nb : g.in) std::sort(nb.begin(), nb.end());
    INFO("trial ", trial, " n=", n);
    CHECK(topo::is_rooted(g) == rooted_oracle(g));
  }
}

TEST_CASE("is_rooted_subgraph") {
  const Digraph k10 = complete(10);
  CHECK(topo::is_rooted_subgraph(k10, std::vector<int>{3}));
  CHECK(topo::is_rooted_subgraph(k10,
                                 std::vector<int>{1, 2, 3, 5, 6, 8, 9}));

  Digraph chain(3);
  chain.add_edge(0, 1);
  chain.add_edge(1, 2);
  CHECK_FALSE(topo::is_rooted_subgraph(chain, std::vector<int>{0, 2}));
  CHECK_THROWS_AS(topo::is_rooted_subgraph(chain, std::vector<int>{}),
                  std::invalid_argument);
}

TEST_CASE("fixed provider returns the identical graph at every step") {
  auto p = topo::TopologyProvider::fixed(complete(5));
  const rng::Substream s = rng::Substream(9).child("topology");
  for (int64_t k : {0, 1, 77}) CHECK(p.sample(s, k) == complete(5));
}

TEST_CASE("stochastic sampling: determinism, symmetry, edge cases") {
  const rng::Substream s = rng::Substream(5).child("topology");
  auto p = topo::TopologyProvider::stochastic(10, 0.5, true);

  const Digraph a = p.sample(s, 3);
  const Digraph b = p.sample(s, 3);
  CHECK(a == b);
  CHECK_FALSE(a == p.sample(s, 4));

  for (int64_t k = 0; k < 50; ++k) {
    const Digraph g = p.sample(s, k);
    for (int i = 0; i < g.n; ++i)
      for (int j : g.in_neighbors(i)) CHECK(g.has_edge(i, j));
  }

  auto full = topo::TopologyProvider::stochastic(10, 1.0, true);
  CHECK(full.sample(s, 0) == complete(10));
  auto empty = topo::TopologyProvider::stochastic(10, 0.0, true);
  CHECK(empty.sample(s, 0).directed_edge_count() == 0);
}

TEST_CASE("stochastic sampling: per-pair frequency over 10000 steps") {
  const rng::Substream s = rng::Substream(31).child("topology");
  auto p = topo::TopologyProvider::stochastic(10, 0.5, true);
  std::vector<int> hits(45, 0);
  Digraph g;
  for (int64_t k = 0; k < 10000; ++k) {
    p.sample_into(s, k, g);
    int m = 0;
    for (int i = 0; i < 10; ++i)
      for (int j = i + 1; j < 10; ++j, ++m)
        if (g.has_edge(j, i)) ++hits[static_cast<size_t>(m)];
  }
  for (int h : hits) {
    const double freq = h / 10000.0;
    CHECK(freq >= 0.48);
    CHECK(freq <= 0.52);
  }
}

TEST_CASE("directed stochastic sampling draws each ordered pair") {
  const rng::Substream s = rng::Substream(8).child("topology");
  auto p = topo::TopologyProvider::stochastic(6, 0.5, false);
  int asym = 0;
  Digraph g;
  for (int64_t k = 0; k < 200; ++k) {
    p.sample_into(s, k, g);
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j)
        if (g.has_edge(i, j) != g.has_edge(j, i)) ++asym;
  }
  CHECK(asym > 0);
}

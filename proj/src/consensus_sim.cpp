#include "wlsim/consensus_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "wlsim/kernels.hpp"

namespace wlsim::sim {

namespace {

std::vector<int> sorted_kind(const std::vector<fault::NodeSpec>& nodes,
                             bool want_faulty) {
  std::vector<int> out;
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].faulty() == want_faulty) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace

std::vector<std::string> validate_sim(const SimConfig& cfg) {
  std::vector<std::string> warnings;
  const int n = cfg.topology.n();
  if (n <= 0) throw std::invalid_argument("topology has no nodes");
  if (static_cast<int>(cfg.nodes.size()) != n)
    throw std::invalid_argument("node spec list length must equal n");
  for (const auto& spec : cfg.nodes) fault::validate(spec);
  fault::validate(cfg.noise);
  wla::validate(cfg.reward);
  if (!cfg.topology.is_fixed() && !(cfg.gamma > 0.0 && cfg.gamma < 1.0))
    throw std::invalid_argument("gamma must lie in (0, 1)");
  if (cfg.max_iter < 0) throw std::invalid_argument("max_iter must be >= 0");
  if (cfg.init.explicit_values) {
    if (static_cast<int>(cfg.init.values.size()) != n)
      throw std::invalid_argument("explicit initial state length must equal n");
  } else if (!(cfg.init.lo <= cfg.init.hi)) {
    throw std::invalid_argument("initial state interval needs lo <= hi");
  }
  for (int64_t s : cfg.snapshot_steps)
    if (s < 0 || s > cfg.max_iter)
      throw std::invalid_argument("snapshot step outside [0, max_iter]");
  if (!(cfg.faulty_row_total >= 0.0 && cfg.faulty_row_total < 1.0))
    throw std::invalid_argument(
        "faulty initial rows must satisfy sum a_ij(0) < 1");
  for (const auto& [node, row] : cfg.faulty_rows_explicit) {
    if (node < 0 || node >= n)
      throw std::invalid_argument("explicit faulty row for unknown node");
    double total = 0.0;
    for (const auto& [j, v] : row) {
      if (j < 0 || j >= n || j == node)
        throw std::invalid_argument("explicit faulty row has a bad target");
      if (!(v >= 0.0))
        throw std::invalid_argument("explicit faulty row has a negative weight");
      total += v;
    }
    if (total >= 1.0)
      throw std::invalid_argument(
          "faulty initial rows must satisfy sum a_ij(0) < 1");
  }

  const auto normal = sorted_kind(cfg.nodes, false);
  if (cfg.topology.is_fixed()) {
    const auto& g = cfg.topology.fixed_graph();
    if (!normal.empty() && !topo::is_rooted_subgraph(g, normal))
      warnings.push_back("normal-node subgraph is not rooted");
    for (int i : normal)
      if (g.in_neighbors(i).size() == 1)
        warnings.push_back("normal node " + std::to_string(i + 1) +
                           " has |N_i| = 1; its weight row is all-zero");
  }
  return warnings;
}

double disagreement(std::span<const double> x, std::span<const int> normal) {
  if (normal.empty())
    throw std::invalid_argument("disagreement needs a nonempty node set");
  const size_t m = normal.size();
  if (m == 1) return 0.0;
  thread_local std::vector<double> xn;
  xn.resize(m);
  for (size_t i = 0; i < m; ++i) xn[i] = x[static_cast<size_t>(normal[i])];
  const double mean = kernels::sum(xn.data(), m) / static_cast<double>(m);
  const double css = kernels::centered_sumsq(xn.data(), mean, m);
  // Sum over ordered pairs i != j of (x_i - x_j)^2 equals 2m * css.
  return std::sqrt(2.0 * css / static_cast<double>(m - 1));
}

int64_t convergence_count(const SimTrace& trace, double threshold) {
  if (!(threshold > 0.0))
    throw std::invalid_argument("convergence threshold must be positive");
  const int64_t max_iter =
      static_cast<int64_t>(trace.disagreement.size()) - 1;
  for (int64_t k = 0; k <= max_iter; ++k)
    if (trace.disagreement[static_cast<size_t>(k)] < threshold) return k;
  return max_iter;
}

double isolation_metric(std::span<const double> weights_dense, int n,
                        std::span<const int> normal,
                        std::span<const int> faulty) {
  double mx = 0.0;
  for (int i : normal)
    for (int j : faulty)
      mx = std::max(mx, weights_dense[static_cast<size_t>(i) *
                                          static_cast<size_t>(n) +
                                      static_cast<size_t>(j)]);
  return mx;
}

Engine::Engine(const SimConfig& cfg)
    : cfg_(cfg),
      n_(cfg.topology.n()),
      stochastic_(!cfg.topology.is_fixed()),
      topo_s_(rng::Substream(cfg.seed).child("topology")),
      chan_s_(rng::Substream(cfg.seed).child("channel_noise")),
      proc_s_(rng::Substream(cfg.seed).child("process_noise")),
      coin_s_(rng::Substream(cfg.seed).child("fault_coin")),
      rand_s_(rng::Substream(cfg.seed).child("fault_value")),
      init_s_(rng::Substream(cfg.seed).child("init_state")) {
  normal_ = sorted_kind(cfg_.nodes, false);
  faulty_ = sorted_kind(cfg_.nodes, true);

  x_.resize(static_cast<size_t>(n_));
  if (cfg_.init.explicit_values) {
    x_ = cfg_.init.values;
  } else {
    for (int i = 0; i < n_; ++i)
      x_[static_cast<size_t>(i)] =
          cfg_.init.lo +
          (cfg_.init.hi - cfg_.init.lo) * init_s_.u01_at(static_cast<uint64_t>(i));
  }
  x_next_ = x_;

  ledger_of_.assign(static_cast<size_t>(n_), -1);
  frozen_of_.assign(static_cast<size_t>(n_), -1);
  for (int i = 0; i < n_; ++i) {
    const auto& spec = cfg_.nodes[static_cast<size_t>(i)];
    if (!spec.faulty()) {
      ledger_of_[static_cast<size_t>(i)] = static_cast<int>(ledgers_.size());
      if (stochastic_) {
        ledgers_.push_back(wla::CredibilityLedger::stochastic(i, n_));
      } else {
        ledgers_.push_back(wla::CredibilityLedger::fixed(
            i, cfg_.topology.fixed_graph().in_neighbors(i)));
      }
    } else {
      std::vector<int> targets;
      if (stochastic_) {
        for (int j = 0; j < n_; ++j)
          if (j != i) targets.push_back(j);
      } else {
        targets = cfg_.topology.fixed_graph().in_neighbors(i);
      }
      frozen_of_[static_cast<size_t>(i)] = static_cast<int>(frozen_.size());
      const auto it = cfg_.faulty_rows_explicit.find(i);
      if (it != cfg_.faulty_rows_explicit.end()) {
        std::vector<int> t;
        std::vector<double> v;
        for (const auto& [j, w] : it->second) {
          t.push_back(j);
          v.push_back(w);
        }
        frozen_.push_back(wla::FrozenRow::from_values(i, std::move(t),
                                                      std::move(v)));
      } else {
        frozen_.push_back(wla::FrozenRow::uniform(i, std::move(targets),
                                                  cfg_.faulty_row_total));
      }
    }
  }
  keep_last_known_ = stochastic_ && !cfg_.snapshot_steps.empty();
  if (keep_last_known_)
    last_known_.assign(static_cast<size_t>(n_) * static_cast<size_t>(n_), 0.0);
}

const topo::Digraph& Engine::step_graph() {
  if (!stochastic_) return cfg_.topology.fixed_graph();
  if (g_step_ != k_) {
    cfg_.topology.sample_into(topo_s_, k_, g_);
    g_step_ = k_;
  }
  return g_;
}

const topo::Digraph& Engine::graph_at_current_step() { return step_graph(); }

const wla::CredibilityLedger& Engine::ledger(int i) const {
  const int li = ledger_of_.at(static_cast<size_t>(i));
  if (li < 0) throw std::invalid_argument("node has no ledger (faulty)");
  return ledgers_[static_cast<size_t>(li)];
}

void Engine::merge_last_known(const wla::WeightRow& row) {
  double* dst =
      last_known_.data() + static_cast<size_t>(row.owner) * static_cast<size_t>(n_);
  for (size_t t = 0; t < row.targets.size(); ++t)
    dst[static_cast<size_t>(row.targets[t])] = row.value[t];
}

void Engine::advance(int i, const topo::Digraph& g) {
  const auto& spec = cfg_.nodes[static_cast<size_t>(i)];
  const auto ui = static_cast<size_t>(i);
  const uint64_t node_block =
      static_cast<uint64_t>(k_) * static_cast<uint64_t>(n_) +
      static_cast<uint64_t>(i);

  bool normal_action = true;
  if (spec.kind == fault::NodeKind::pfn) {
    normal_action = false;
  } else if (spec.kind == fault::NodeKind::ifn) {
    normal_action = fault::ifn_acts_normal(spec.p_normal, coin_s_, node_block);
  }

  if (!normal_action) {
    x_next_[ui] = x_[ui] + fault::sample_random(spec.random, rand_s_, node_block);
    if (keep_last_known_) {
      const auto& frozen = frozen_[static_cast<size_t>(frozen_of_[ui])];
      frozen.restrict_to_into(g.in_neighbors(i), row_);
      merge_last_known(row_);
    }
    return;
  }

  const auto& nbrs = g.in_neighbors(i);
  const size_t m = nbrs.size();

  // Weight row in effect at this step: computed before this step's
  // observations enter the ledger.
  if (spec.kind == fault::NodeKind::normal) {
    const auto& led = ledgers_[static_cast<size_t>(ledger_of_[ui])];
    if (stochastic_) {
      wla::weights_stochastic_into(led, nbrs, cfg_.gamma, row_);
    } else {
      row_ = wla::weights_fixed(led);
    }
  } else {
    frozen_[static_cast<size_t>(frozen_of_[ui])].restrict_to_into(nbrs, row_);
  }
  if (keep_last_known_) merge_last_known(row_);

  gx_.resize(m);
  for (size_t t = 0; t < m; ++t)
    gx_[t] = x_[static_cast<size_t>(row_.targets[t])];
  const double delta =
      m ? kernels::weighted_diff_sum(row_.value.data(), gx_.data(), x_[ui], m)
        : 0.0;
  const double wproc = fault::sample_noise(cfg_.noise, proc_s_, node_block);
  x_next_[ui] = x_[ui] + delta + wproc;

  // Only normal nodes learn; an IFN keeps its frozen row.
  if (spec.kind == fault::NodeKind::normal && m > 0) {
    auto& led = ledgers_[static_cast<size_t>(ledger_of_[ui])];
    const uint64_t edge_base =
        static_cast<uint64_t>(k_) * static_cast<uint64_t>(n_) *
            static_cast<uint64_t>(n_) +
        static_cast<uint64_t>(i) * static_cast<uint64_t>(n_);
    s_.resize(m);
    if (m > 16) {
      // One bulk draw over all potential neighbors; same blocks as the
      // per-edge path below, so both strategies yield identical values.
      noise_all_.resize(static_cast<size_t>(n_));
      kernels::sym_noise_blocks(chan_s_.key(), chan_s_.prefix(), edge_base,
                                cfg_.noise.bound, noise_all_.data(),
                                static_cast<size_t>(n_));
      for (size_t t = 0; t < m; ++t)
        s_[t] = std::abs(gx_[t] - x_[ui] +
                         noise_all_[static_cast<size_t>(nbrs[t])]);
    } else {
      for (size_t t = 0; t < m; ++t) {
        const double w_ij = fault::sample_noise(
            cfg_.noise, chan_s_, edge_base + static_cast<uint64_t>(nbrs[t]));
        s_[t] = std::abs(gx_[t] - x_[ui] + w_ij);
      }
    }
    if (stochastic_) {
      led.observe_stochastic(nbrs, s_, k_, cfg_.reward);
    } else {
      led.observe_fixed(s_, k_, cfg_.reward);
    }
  }
}

void Engine::step() {
  const topo::Digraph& g = step_graph();
  for (int i = 0; i < n_; ++i) advance(i, g);
  std::swap(x_, x_next_);
  ++k_;
}

void Engine::step_with_order(std::span<const int> order) {
  const topo::Digraph& g = step_graph();
  for (int i : order) advance(i, g);
  std::swap(x_, x_next_);
  ++k_;
}

std::vector<double> Engine::weight_matrix_now() {
  const topo::Digraph& g = step_graph();
  std::vector<double> dense;
  if (keep_last_known_) {
    dense = last_known_;
  } else {
    dense.assign(static_cast<size_t>(n_) * static_cast<size_t>(n_), 0.0);
  }
  auto put = [&](const wla::WeightRow& row) {
    double* dst = dense.data() +
                  static_cast<size_t>(row.owner) * static_cast<size_t>(n_);
    for (size_t t = 0; t < row.targets.size(); ++t)
      dst[static_cast<size_t>(row.targets[t])] = row.value[t];
  };
  for (int i = 0; i < n_; ++i) {
    const auto ui = static_cast<size_t>(i);
    if (ledger_of_[ui] >= 0) {
      const auto& led = ledgers_[static_cast<size_t>(ledger_of_[ui])];
      if (stochastic_) {
        put(wla::weights_stochastic(led, g.in_neighbors(i), cfg_.gamma));
      } else {
        put(wla::weights_fixed(led));
      }
    } else {
      const auto& frozen = frozen_[static_cast<size_t>(frozen_of_[ui])];
      if (stochastic_) {
        put(frozen.restrict_to(g.in_neighbors(i)));
      } else {
        put(frozen.row());
      }
    }
  }
  return dense;
}

SimTrace run(const SimConfig& cfg) {
  SimTrace trace;
  trace.warnings = validate_sim(cfg);
  Engine e(cfg);
  trace.n = e.n();
  trace.normal_nodes.assign(e.normal_nodes().begin(), e.normal_nodes().end());

  const auto record = [&] {
    trace.states.emplace_back(e.state().begin(), e.state().end());
    trace.disagreement.push_back(
        trace.normal_nodes.empty()
            ? 0.0
            : disagreement(e.state(), trace.normal_nodes));
  };
  const auto want_snapshot = [&](int64_t k) {
    return std::find(cfg.snapshot_steps.begin(), cfg.snapshot_steps.end(), k) !=
           cfg.snapshot_steps.end();
  };

  const bool stochastic = !cfg.topology.is_fixed();
  int64_t rooted_steps = 0;
  record();
  for (int64_t k = 0; k < cfg.max_iter; ++k) {
    if (want_snapshot(k))
      trace.weight_snapshots.emplace_back(k, e.weight_matrix_now());
    if (stochastic && (cfg.log_topology || cfg.track_rootedness)) {
      const auto& g = e.graph_at_current_step();
      if (cfg.log_topology) {
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < g.n; ++i)
          for (int j : g.in_neighbors(i)) edges.emplace_back(j, i);
        trace.topology_log.push_back(std::move(edges));
      }
      if (cfg.track_rootedness && !trace.normal_nodes.empty() &&
          topo::is_rooted_subgraph(g, trace.normal_nodes))
        ++rooted_steps;
    }
    e.step();
    record();
  }
  if (want_snapshot(cfg.max_iter))
    trace.weight_snapshots.emplace_back(cfg.max_iter, e.weight_matrix_now());
  if (stochastic && cfg.track_rootedness && cfg.max_iter > 0)
    trace.rooted_fraction =
        static_cast<double>(rooted_steps) / static_cast<double>(cfg.max_iter);
  return trace;
}

std::vector<SweepPoint> sweep_fault_probability(const SimConfig& base,
                                                std::span<const int> ifn_nodes,
                                                std::span<const double> probs,
                                                int reps, double threshold,
                                                int jobs) {
  if (reps < 1) throw std::invalid_argument("sweep needs reps >= 1");
  if (!(threshold > 0.0))
    throw std::invalid_argument("convergence threshold must be positive");
  for (double q : probs)
    if (!(q >= 0.0 && q <= 1.0))
      throw std::invalid_argument("fault probabilities must lie in [0, 1]");
  for (int node : ifn_nodes) {
    if (node < 0 || node >= static_cast<int>(base.nodes.size()))
      throw std::invalid_argument("sweep IFN node id out of range");
    if (base.nodes[static_cast<size_t>(node)].kind != fault::NodeKind::ifn)
      throw std::invalid_argument("sweep node is not an IFN in the base config");
  }
  validate_sim(base);

  const size_t np = probs.size();
  const size_t nr = static_cast<size_t>(reps);
  std::vector<int64_t> counts(np * nr, 0);

  const auto task = [&](size_t pi, size_t r) {
    SimConfig cfg = base;
    for (int node : ifn_nodes)
      cfg.nodes[static_cast<size_t>(node)].p_normal = 1.0 - probs[pi];
    cfg.seed = rng::derive_seed(base.seed, "rep", r);
    cfg.snapshot_steps.clear();
    cfg.log_topology = false;
    cfg.track_rootedness = false;
    const SimTrace t = run(cfg);
    counts[pi * nr + r] = convergence_count(t, threshold);
  };

  const size_t total = np * nr;
  if (jobs <= 1) {
    for (size_t idx = 0; idx < total; ++idx) task(idx / nr, idx % nr);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    const int nw = std::min<int>(jobs, static_cast<int>(total));
    workers.reserve(static_cast<size_t>(nw));
    for (int w = 0; w < nw; ++w)
      workers.emplace_back([&] {
        for (size_t idx = next.fetch_add(1); idx < total;
             idx = next.fetch_add(1))
          task(idx / nr, idx % nr);
      });
    for (auto& t : workers) t.join();
  }

  std::vector<SweepPoint> out(np);
  for (size_t pi = 0; pi < np; ++pi) {
    int64_t sum = 0;
    for (size_t r = 0; r < nr; ++r) sum += counts[pi * nr + r];
    out[pi] = {probs[pi],
               static_cast<double>(sum) / static_cast<double>(reps), reps};
  }
  return out;
}

}  // namespace wlsim::sim

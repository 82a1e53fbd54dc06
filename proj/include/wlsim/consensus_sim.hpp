#pragma once
// Synchronous simulation engine for the scalar resilient-consensus system,
// disagreement metrics, and the Monte-Carlo fault-probability sweep driver.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wlsim/fault_models.hpp"
#include "wlsim/topology.hpp"
#include "wlsim/wla.hpp"

namespace wlsim::sim {

struct InitState {
  bool explicit_values = false;
  double lo = 0.0;
  double hi = 1000.0;           // uniform draw per node when not explicit
  std::vector<double> values;   // explicit per-node initial states
};

struct SimConfig {
  topo::TopologyProvider topology;
  std::vector<fault::NodeSpec> nodes;  // mode comes from the topology provider
  fault::NoiseSpec noise{10.0};
  wla::RewardSchedule reward{};
  double gamma = 0.8;  // stochastic weight rule only
  InitState init;
  int64_t max_iter = 1000;
  uint64_t seed = 1;
  std::vector<int64_t> snapshot_steps;
  // a_ij(0) for faulty nodes: uniform row summing to faulty_row_total unless
  // an explicit row is given for the node.
  double faulty_row_total = 0.8;
  std::map<int, std::map<int, double>> faulty_rows_explicit;
  bool log_topology = false;      // per-step edge lists (stochastic runs)
  bool track_rootedness = false;  // per-step normal-subgraph rootedness share
};

// Throws std::invalid_argument on hard errors; returns soft warnings
// (fixed-mode normal subgraph not rooted, |N_i| = 1 normal nodes).
std::vector<std::string> validate_sim(const SimConfig& cfg);

struct SimTrace {
  int n = 0;
  std::vector<int> normal_nodes;  // sorted
  std::vector<std::vector<double>> states;  // [k][i], k = 0..max_iter
  std::vector<double> disagreement;         // V(x(k)), k = 0..max_iter
  // (k, dense n*n row-major matrix of a_ij in effect at step k; stochastic
  // runs use the last-known semantics, values kept since last contact)
  std::vector<std::pair<int64_t, std::vector<double>>> weight_snapshots;
  std::vector<std::vector<std::pair<int, int>>> topology_log;  // (j, i) edges
  double rooted_fraction = -1.0;  // stochastic runs with track_rootedness
  std::vector<std::string> warnings;
};

// RMS pairwise disagreement over the given node set; 0 for a single node.
double disagreement(std::span<const double> x, std::span<const int> normal);

// Smallest k with V(x(k)) < threshold, or max_iter if never reached.
int64_t convergence_count(const SimTrace& trace, double threshold);

// Max a_ij over i in normal, j in faulty; 0 when faulty is empty.
double isolation_metric(std::span<const double> weights_dense, int n,
                        std::span<const int> normal,
                        std::span<const int> faulty);

class Engine {
 public:
  explicit Engine(const SimConfig& cfg);

  int64_t k() const { return k_; }
  int n() const { return n_; }
  std::span<const double> state() const { return x_; }
  std::span<const int> normal_nodes() const { return normal_; }
  std::span<const int> faulty_nodes() const { return faulty_; }

  void step();
  // Synchronous-update check hook: any permutation of all node ids gives the
  // same next state.
  void step_with_order(std::span<const int> order);

  // Weight rows in effect at the current step, dense n*n row-major. Faulty
  // rows are the frozen initial rows (stochastic: restricted to the step's
  // neighbor sets and merged over history with last-known semantics).
  std::vector<double> weight_matrix_now();

  const wla::CredibilityLedger& ledger(int i) const;
  const topo::Digraph& graph_at_current_step();

 private:
  void advance(int i, const topo::Digraph& g);
  const topo::Digraph& step_graph();
  void merge_last_known(const wla::WeightRow& row);

  SimConfig cfg_;
  int n_ = 0;
  int64_t k_ = 0;
  bool stochastic_ = false;
  std::vector<int> normal_, faulty_;
  std::vector<double> x_, x_next_;
  std::vector<int> ledger_of_;  // node -> index into ledgers_, -1 if faulty
  std::vector<wla::CredibilityLedger> ledgers_;
  std::vector<int> frozen_of_;  // node -> index into frozen_, -1 if normal
  std::vector<wla::FrozenRow> frozen_;
  rng::Substream topo_s_, chan_s_, proc_s_, coin_s_, rand_s_, init_s_;
  topo::Digraph g_;
  int64_t g_step_ = -1;
  bool keep_last_known_ = false;
  std::vector<double> last_known_;  // n*n, stochastic snapshot bookkeeping
  // step scratch
  std::vector<double> gx_, s_, noise_all_;
  wla::WeightRow row_;
};

SimTrace run(const SimConfig& cfg);

struct SweepPoint {
  double fault_prob = 0.0;
  double mean_count = 0.0;
  int reps = 0;
};

// For each fault probability q: set p_normal = 1 - q on every listed IFN,
// run `reps` replicas seeded by (base seed, replica index), and average the
// convergence count (censored at max_iter). Replicas may run on `jobs`
// threads; results are identical for any jobs value.
std::vector<SweepPoint> sweep_fault_probability(const SimConfig& base,
                                                std::span<const int> ifn_nodes,
                                                std::span<const double> probs,
                                                int reps, double threshold,
                                                int jobs = 1);

}  // namespace wlsim::sim

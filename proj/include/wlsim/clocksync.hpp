#pragma once
// Fault-tolerant logical clock synchronization on top of the weight learning
// core: affine hardware clocks, skew consensus through the eta ratio
// estimator, and offset consensus on exchanged logical times. Skew and offset
// run separate weight-learning instances (adjacency matrices A' and A'').

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wlsim/fault_models.hpp"
#include "wlsim/topology.hpp"
#include "wlsim/wla.hpp"

namespace wlsim::clocks {

struct HardwareClock {
  double alpha_star = 1.0;  // true skew, > 0
  double beta_star = 0.0;   // true offset
  double read(double t) const { return alpha_star * t + beta_star; }
};

// Ratio estimate alpha_j* / alpha_i* from two reading pairs taken at the
// same two instants; exact for noiseless readings. Throws on a zero
// denominator (impossible for distinct instants and alpha_i* > 0).
double eta(double tau_j_k1, double tau_j_k2, double tau_i_k1, double tau_i_k2);

struct ClockConfig {
  topo::TopologyProvider topology;  // fixed, symmetric
  std::vector<fault::NodeSpec> nodes;
  double skew_noise_bound = 0.01;  // channel noise on the alpha exchange
  double offset_noise_bound = 5.0; // channel noise on the logical-time exchange
  wla::RewardSchedule skew_reward{0.1, 1e-3};
  wla::RewardSchedule offset_reward{1e-4, 1e-6};
  fault::RandomSpec alpha_star_init{0.7, 1.3};
  fault::RandomSpec beta_star_init{0.0, 100.0};
  double alpha0 = 1.0;
  double beta0 = 0.1;
  fault::RandomSpec random_alpha{0.0, 5.0};  // faulty alpha increments
  fault::RandomSpec random_beta{0.0, 50.0};  // faulty beta increments
  double period = 1.0;
  int64_t max_iter = 1000;
  uint64_t seed = 1;
  bool wla_disabled = false;  // hold every normal row at its k = 0 value
  std::vector<int64_t> snapshot_steps;
  double faulty_row_total = 0.8;
  bool record_rows = false;  // keep per-round A'/A'' (derivation tests)
};

std::vector<std::string> validate_clock(const ClockConfig& cfg);

struct ClockTrace {
  int n = 0;
  std::vector<int> normal_nodes;
  std::vector<double> alpha_star, beta_star;  // hidden hardware parameters
  // [k][i] for k = 0..max_iter
  std::vector<std::vector<double>> alpha, beta, x_prime, x_dprime, tau;
  // (max |x'_i - x'_j|, max |x''_i - x''_j|, max |tau_i - tau_j|) over
  // normal nodes at each k
  std::vector<std::array<double, 3>> disagreement;
  // (k, dense n*n) rows in effect at the snapshot step
  std::vector<std::pair<int64_t, std::vector<double>>> skew_snapshots;
  std::vector<std::pair<int64_t, std::vector<double>>> offset_snapshots;
  // populated when record_rows is set: rows applied at round k
  std::vector<std::vector<double>> skew_rows, offset_rows;
  std::vector<std::string> warnings;
};

ClockTrace run_clock(const ClockConfig& cfg);

// The trace's stored triple recomputed over an arbitrary normal set.
std::array<double, 3> clock_disagreement(const ClockTrace& trace, int64_t k,
                                         std::span<const int> normal);

}  // namespace wlsim::clocks

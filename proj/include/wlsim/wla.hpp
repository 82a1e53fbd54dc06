#pragma once
// Weight learning core: reward schedule, per-neighbor credibility, and the
// normalized weight rules for the fixed-topology and stochastic-topology
// variants.
//
// Credibility is the running product of per-step rewards in (0, 1]. Stored
// literally it underflows to 0 within a few thousand steps for any neighbor
// with a persistent discrepancy, so the ledger keeps log credibility
// L_ij = sum of log rewards and the weight rules normalize with
// max-subtraction; algebraically identical and never underflows (the
// log-domain vs direct-product equivalence is property-tested).

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace wlsim::wla {

struct RewardSchedule {
  double theta0 = 1e-4;
  double theta_slope = 1e-6;
  double theta(int64_t k) const {
    return theta0 + theta_slope * static_cast<double>(k);
  }
};

void validate(const RewardSchedule& s);  // theta0 > 0, theta_slope >= 0

// log f(s, k) = -s * theta(k); f is the reward exp(-s * theta(k)) in (0, 1].
double log_reward(const RewardSchedule& sched, double s, int64_t k);

class CredibilityLedger {
 public:
  // Fixed variant tracks exactly the owner's in-neighbor set.
  static CredibilityLedger fixed(int owner, std::vector<int> neighbors);
  // Stochastic variant tracks every other node with last log reward 0.
  static CredibilityLedger stochastic(int owner, int n);

  // Fixed: s aligned with tracked(); one observation per tracked neighbor.
  void observe_fixed(std::span<const double> s, int64_t k,
                     const RewardSchedule& sched);
  // Map interface per the operation contract; keys must equal tracked().
  void observe_fixed(const std::map<int, double>& s_by_node, int64_t k,
                     const RewardSchedule& sched);

  // Stochastic: fresh rewards for current neighbors (sorted, aligned with s),
  // stale re-application of the last log reward for every other tracked node.
  void observe_stochastic(std::span<const int> current,
                          std::span<const double> s, int64_t k,
                          const RewardSchedule& sched);
  void observe_stochastic(const std::map<int, double>& s_by_node, int64_t k,
                          const RewardSchedule& sched);

  int owner() const { return owner_; }
  bool is_stochastic() const { return stochastic_; }
  std::span<const int> tracked() const { return tracked_; }
  double log_credibility(int j) const;
  double last_log_reward(int j) const;

  // Dense views for the weight rules; fixed variant aligns with tracked(),
  // stochastic variant indexes by node id (owner slot unused, held at 0).
  std::span<const double> log_credibility_raw() const { return logq_; }

 private:
  CredibilityLedger() = default;
  int slot(int j) const;  // -1 if untracked
  int owner_ = -1;
  int n_ = 0;
  bool stochastic_ = false;
  std::vector<int> tracked_;
  std::vector<double> logq_;
  std::vector<double> last_log_;  // stochastic only
  std::vector<double> scratch_;
};

struct WeightRow {
  int owner = -1;
  std::vector<int> targets;  // sorted node ids; weight is 0 elsewhere
  std::vector<double> value;

  double at(int j) const;
  double sum() const;
};

// a_ij = Q_ij / sum(Q) * (1 - 1/|N_i|) over the fixed neighbor set. |N_i| = 1
// yields the degenerate all-zero row (scale factor 0).
WeightRow weights_fixed(const CredibilityLedger& ledger);
// Contract-checking variant: neighbors must equal the tracked set.
WeightRow weights_fixed(const CredibilityLedger& ledger,
                        std::span<const int> neighbors);

// a_ij = Q_ij / sum(Q over current) * gamma over the step's neighbor set;
// empty set yields the all-zero row. gamma must lie in (0, 1).
WeightRow weights_stochastic(const CredibilityLedger& ledger,
                             std::span<const int> current, double gamma);
void weights_stochastic_into(const CredibilityLedger& ledger,
                             std::span<const int> current, double gamma,
                             WeightRow& out);

// Frozen initial row used by faulty nodes (and by normal nodes when weight
// learning is disabled): a_ij(k) = a_ij(0) with sum(a_ij(0)) < 1.
class FrozenRow {
 public:
  static FrozenRow uniform(int owner, std::vector<int> targets, double total);
  static FrozenRow from_values(int owner, std::vector<int> targets,
                               std::vector<double> values);

  const WeightRow& row() const { return row_; }
  // Stochastic per-step restriction: weights kept on current targets only.
  WeightRow restrict_to(std::span<const int> current) const;
  void restrict_to_into(std::span<const int> current, WeightRow& out) const;

 private:
  WeightRow row_;
};

}  // namespace wlsim::wla

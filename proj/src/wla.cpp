#include "wlsim/wla.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "wlsim/kernels.hpp"

namespace wlsim::wla {

void validate(const RewardSchedule& s) {
  if (!(s.theta0 > 0.0))
    throw std::invalid_argument("reward schedule needs theta0 > 0");
  if (!(s.theta_slope >= 0.0))
    throw std::invalid_argument("reward schedule needs theta_slope >= 0");
}

double log_reward(const RewardSchedule& sched, double s, int64_t k) {
  if (!(s >= 0.0))
    throw std::invalid_argument("reward input s must be nonnegative");
  return -s * sched.theta(k);
}

CredibilityLedger CredibilityLedger::fixed(int owner,
                                           std::vector<int> neighbors) {
  std::sort(neighbors.begin(), neighbors.end());
  CredibilityLedger l;
  l.owner_ = owner;
  l.stochastic_ = false;
  l.tracked_ = std::move(neighbors);
  l.logq_.assign(l.tracked_.size(), 0.0);
  return l;
}

CredibilityLedger CredibilityLedger::stochastic(int owner, int n) {
  CredibilityLedger l;
  l.owner_ = owner;
  l.n_ = n;
  l.stochastic_ = true;
  l.tracked_.reserve(static_cast<size_t>(n) - 1);
  for (int j = 0; j < n; ++j)
    if (j != owner) l.tracked_.push_back(j);
  l.logq_.assign(static_cast<size_t>(n), 0.0);
  // The owner slot exists only to keep the storage dense; -inf keeps it out
  // of max scans and the stale vector add leaves it untouched.
  l.logq_[static_cast<size_t>(owner)] =
      -std::numeric_limits<double>::infinity();
  l.last_log_.assign(static_cast<size_t>(n), 0.0);
  return l;
}

int CredibilityLedger::slot(int j) const {
  if (stochastic_) return (j >= 0 && j < n_ && j != owner_) ? j : -1;
  const auto it = std::lower_bound(tracked_.begin(), tracked_.end(), j);
  if (it == tracked_.end() || *it != j) return -1;
  return static_cast<int>(it - tracked_.begin());
}

double CredibilityLedger::log_credibility(int j) const {
  const int s = slot(j);
  if (s < 0) throw std::invalid_argument("node is not tracked by this ledger");
  return logq_[static_cast<size_t>(s)];
}

double CredibilityLedger::last_log_reward(int j) const {
  if (!stochastic_)
    throw std::logic_error("last reward is stochastic-variant state");
  const int s = slot(j);
  if (s < 0) throw std::invalid_argument("node is not tracked by this ledger");
  return last_log_[static_cast<size_t>(s)];
}

void CredibilityLedger::observe_fixed(std::span<const double> s, int64_t k,
                                      const RewardSchedule& sched) {
  if (stochastic_)
    throw std::logic_error("fixed observation on a stochastic ledger");
  if (s.size() != tracked_.size())
    throw std::invalid_argument(
        "observations must cover exactly the tracked neighbor set");
  for (size_t i = 0; i < s.size(); ++i)
    logq_[i] += log_reward(sched, s[i], k);
}

void CredibilityLedger::observe_fixed(const std::map<int, double>& s_by_node,
                                      int64_t k, const RewardSchedule& sched) {
  if (s_by_node.size() != tracked_.size())
    throw std::invalid_argument(
        "observations must cover exactly the tracked neighbor set");
  scratch_.clear();
  size_t i = 0;
  for (const auto& [j, s] : s_by_node) {
    if (i >= tracked_.size() || tracked_[i] != j)
      throw std::invalid_argument("observation for untracked node");
    scratch_.push_back(s);
    ++i;
  }
  observe_fixed(std::span<const double>(scratch_), k, sched);
}

void CredibilityLedger::observe_stochastic(std::span<const int> current,
                                           std::span<const double> s,
                                           int64_t k,
                                           const RewardSchedule& sched) {
  if (!stochastic_)
    throw std::logic_error("stochastic observation on a fixed ledger");
  if (current.size() != s.size())
    throw std::invalid_argument("neighbor set and observations disagree");
  for (size_t i = 0; i < current.size(); ++i) {
    const int sl = slot(current[i]);
    if (sl < 0) throw std::invalid_argument("observation for untracked node");
    last_log_[static_cast<size_t>(sl)] = log_reward(sched, s[i], k);
  }
  // Fresh rewards were just written; every other tracked node re-applies its
  // stale value. One vector add covers both cases (owner slot is inert 0).
  kernels::add_inplace(logq_.data(), last_log_.data(), logq_.size());
}

void CredibilityLedger::observe_stochastic(
    const std::map<int, double>& s_by_node, int64_t k,
    const RewardSchedule& sched) {
  std::vector<int> current;
  scratch_.clear();
  current.reserve(s_by_node.size());
  for (const auto& [j, s] : s_by_node) {
    current.push_back(j);
    scratch_.push_back(s);
  }
  observe_stochastic(current, std::span<const double>(scratch_), k, sched);
}

double WeightRow::at(int j) const {
  const auto it = std::lower_bound(targets.begin(), targets.end(), j);
  if (it == targets.end() || *it != j) return 0.0;
  return value[static_cast<size_t>(it - targets.begin())];
}

double WeightRow::sum() const {
  double t = 0.0;
  for (double v : value) t += v;
  return t;
}

namespace {

// Softmax of the given log credibilities scaled so the row sums to `scale`.
void normalize_into(std::span<const double> logq, double scale,
                    WeightRow& out) {
  const size_t m = logq.size();
  out.value.resize(m);
  if (m == 0) return;
  const double mx = kernels::max_value(logq.data(), m);
  const double total = kernels::exp_shift_sum(logq.data(), mx,
                                              out.value.data(), m);
  kernels::scale(out.value.data(), scale / total, m);
}

}  // namespace

WeightRow weights_fixed(const CredibilityLedger& ledger) {
  if (ledger.is_stochastic())
    throw std::logic_error("fixed weight rule on a stochastic ledger");
  const auto tracked = ledger.tracked();
  if (tracked.empty())
    throw std::invalid_argument("fixed weight rule needs |N_i| >= 1");
  WeightRow out;
  out.owner = ledger.owner();
  out.targets.assign(tracked.begin(), tracked.end());
  const double scale =
      1.0 - 1.0 / static_cast<double>(tracked.size());
  normalize_into(ledger.log_credibility_raw(), scale, out);
  return out;
}

WeightRow weights_fixed(const CredibilityLedger& ledger,
                        std::span<const int> neighbors) {
  const auto tracked = ledger.tracked();
  if (!std::equal(tracked.begin(), tracked.end(), neighbors.begin(),
                  neighbors.end()))
    throw std::invalid_argument(
        "neighbor set does not match the tracked set of the ledger");
  return weights_fixed(ledger);
}

// A neighborhood whose best source sits this many log-units below the node's
// best-tracked credibility carries no usable information and is treated as
// empty. In the literal product domain such a set has sum(Q) underflowed to
// exactly 0 (the weight rule's 0/0 case); holding state is the only defined
// extension, and it is what keeps a step whose sampled neighbors are all
// long-isolated nodes from being handed the full gamma by normalization.
// The margin is unreachable by healthy dynamics (normal-to-normal gaps stay
// within a few log-units) and by the documented oracle ranges (50 steps at
// |s| <= 1e4 bound gaps by 75).
constexpr double kEffectivelyEmptyMargin = 80.0;

void weights_stochastic_into(const CredibilityLedger& ledger,
                             std::span<const int> current, double gamma,
                             WeightRow& out) {
  if (!ledger.is_stochastic())
    throw std::logic_error("stochastic weight rule on a fixed ledger");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma must lie in (0, 1)");
  out.owner = ledger.owner();
  out.targets.assign(current.begin(), current.end());
  const auto logq = ledger.log_credibility_raw();
  thread_local std::vector<double> gathered;
  gathered.resize(current.size());
  for (size_t i = 0; i < current.size(); ++i) {
    const int j = current[i];
    if (j < 0 || static_cast<size_t>(j) >= logq.size() || j == ledger.owner())
      throw std::invalid_argument("current neighbor is not tracked");
    gathered[i] = logq[static_cast<size_t>(j)];
  }
  if (!current.empty()) {
    const double best_tracked =
        kernels::max_value(logq.data(), logq.size());
    const double best_present =
        kernels::max_value(gathered.data(), gathered.size());
    if (best_present - best_tracked < -kEffectivelyEmptyMargin) {
      out.value.assign(current.size(), 0.0);
      return;
    }
  }
  normalize_into(gathered, gamma, out);
}

WeightRow weights_stochastic(const CredibilityLedger& ledger,
                             std::span<const int> current, double gamma) {
  WeightRow out;
  weights_stochastic_into(ledger, current, gamma, out);
  return out;
}

FrozenRow FrozenRow::uniform(int owner, std::vector<int> targets,
                             double total) {
  std::sort(targets.begin(), targets.end());
  std::vector<double> v(targets.size(),
                        targets.empty() ? 0.0
                                        : total / static_cast<double>(
                                                      targets.size()));
  return from_values(owner, std::move(targets), std::move(v));
}

FrozenRow FrozenRow::from_values(int owner, std::vector<int> targets,
                                 std::vector<double> values) {
  if (targets.size() != values.size())
    throw std::invalid_argument("frozen row targets/values size mismatch");
  double total = 0.0;
  for (double v : values) {
    if (!(v >= 0.0))
      throw std::invalid_argument("frozen row weights must be nonnegative");
    total += v;
  }
  if (total >= 1.0)
    throw std::invalid_argument(
        "frozen initial row must satisfy sum a_ij(0) < 1");
  FrozenRow f;
  f.row_.owner = owner;
  f.row_.targets = std::move(targets);
  f.row_.value = std::move(values);
  return f;
}

WeightRow FrozenRow::restrict_to(std::span<const int> current) const {
  WeightRow out;
  restrict_to_into(current, out);
  return out;
}

void FrozenRow::restrict_to_into(std::span<const int> current,
                                 WeightRow& out) const {
  out.owner = row_.owner;
  out.targets.assign(current.begin(), current.end());
  out.value.resize(current.size());
  for (size_t i = 0; i < current.size(); ++i)
    out.value[i] = row_.at(current[i]);
}

}  // namespace wlsim::wla

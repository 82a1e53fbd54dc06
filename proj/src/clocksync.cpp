#include "wlsim/clocksync.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wlsim::clocks {

double eta(double tau_j_k1, double tau_j_k2, double tau_i_k1,
           double tau_i_k2) {
  const double denom = tau_i_k1 - tau_i_k2;
  if (denom == 0.0)
    throw std::domain_error("eta needs readings at distinct instants");
  return (tau_j_k1 - tau_j_k2) / denom;
}

std::vector<std::string> validate_clock(const ClockConfig& cfg) {
  if (!cfg.topology.is_fixed())
    throw std::invalid_argument("clock synchronization runs on a fixed topology");
  const int n = cfg.topology.n();
  if (n <= 0) throw std::invalid_argument("topology has no nodes");
  if (static_cast<int>(cfg.nodes.size()) != n)
    throw std::invalid_argument("node spec list length must equal n");
  for (const auto& spec : cfg.nodes) fault::validate(spec);
  fault::validate(cfg.alpha_star_init);
  fault::validate(cfg.beta_star_init);
  fault::validate(cfg.random_alpha);
  fault::validate(cfg.random_beta);
  if (!(cfg.alpha_star_init.lo > 0.0))
    throw std::invalid_argument("hardware skew must be positive");
  if (!(cfg.skew_noise_bound >= 0.0) || !(cfg.offset_noise_bound >= 0.0))
    throw std::invalid_argument("noise bounds must be >= 0");
  wla::validate(cfg.skew_reward);
  wla::validate(cfg.offset_reward);
  if (!(cfg.period > 0.0)) throw std::invalid_argument("period must be > 0");
  if (cfg.max_iter < 0) throw std::invalid_argument("max_iter must be >= 0");
  for (int64_t s : cfg.snapshot_steps)
    if (s < 0 || s > cfg.max_iter)
      throw std::invalid_argument("snapshot step outside [0, max_iter]");
  if (!(cfg.faulty_row_total >= 0.0 && cfg.faulty_row_total < 1.0))
    throw std::invalid_argument(
        "faulty initial rows must satisfy sum a_ij(0) < 1");

  std::vector<std::string> warnings;
  std::vector<int> normal;
  for (int i = 0; i < n; ++i)
    if (!cfg.nodes[static_cast<size_t>(i)].faulty()) normal.push_back(i);
  if (!normal.empty() &&
      !topo::is_rooted_subgraph(cfg.topology.fixed_graph(), normal))
    warnings.push_back("normal-node subgraph is not rooted");
  return warnings;
}

namespace {

struct ClockEngine {
  const ClockConfig& cfg;
  int n;
  std::vector<fault::NodeKind> kind;
  std::vector<double> alpha_star, beta_star;
  std::vector<double> alpha, beta;
  std::vector<double> tau_star_prev;  // readings from the previous round
  std::vector<wla::CredibilityLedger> skew_led, offset_led;
  std::vector<int> led_of;                 // node -> ledger index, -1 faulty
  std::vector<wla::FrozenRow> frozen;      // faulty inits / wla-disabled rows
  std::vector<int> frozen_of;
  rng::Substream skew_noise_s, offset_noise_s, coin_s, ra_s, rb_s;

  explicit ClockEngine(const ClockConfig& c)
      : cfg(c),
        n(c.topology.n()),
        skew_noise_s(rng::Substream(c.seed).child("skew_noise")),
        offset_noise_s(rng::Substream(c.seed).child("offset_noise")),
        coin_s(rng::Substream(c.seed).child("clock_coin")),
        ra_s(rng::Substream(c.seed).child("clock_rand_alpha")),
        rb_s(rng::Substream(c.seed).child("clock_rand_beta")) {
    const auto as_s = rng::Substream(c.seed).child("alpha_star");
    const auto bs_s = rng::Substream(c.seed).child("beta_star");
    const size_t un = static_cast<size_t>(n);
    alpha_star.resize(un);
    beta_star.resize(un);
    kind.resize(un);
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<size_t>(i);
      alpha_star[ui] = fault::sample_random(c.alpha_star_init, as_s,
                                            static_cast<uint64_t>(i));
      beta_star[ui] = fault::sample_random(c.beta_star_init, bs_s,
                                           static_cast<uint64_t>(i));
      kind[ui] = c.nodes[ui].kind;
    }
    alpha.assign(un, c.alpha0);
    beta.assign(un, c.beta0);
    // Silent exchange at t = -T seeds the first reading difference.
    tau_star_prev.resize(un);
    for (int i = 0; i < n; ++i)
      tau_star_prev[static_cast<size_t>(i)] =
          HardwareClock{alpha_star[static_cast<size_t>(i)],
                        beta_star[static_cast<size_t>(i)]}
              .read(-c.period);

    led_of.assign(un, -1);
    frozen_of.assign(un, -1);
    const auto& g = c.topology.fixed_graph();
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<size_t>(i);
      const auto& nbrs = g.in_neighbors(i);
      if (kind[ui] == fault::NodeKind::normal && !c.wla_disabled) {
        led_of[ui] = static_cast<int>(skew_led.size());
        skew_led.push_back(wla::CredibilityLedger::fixed(i, nbrs));
        offset_led.push_back(wla::CredibilityLedger::fixed(i, nbrs));
      } else {
        frozen_of[ui] = static_cast<int>(frozen.size());
        const double total =
            kind[ui] == fault::NodeKind::normal
                ? (nbrs.empty() ? 0.0
                                : 1.0 - 1.0 / static_cast<double>(nbrs.size()))
                : c.faulty_row_total;
        frozen.push_back(wla::FrozenRow::uniform(i, nbrs, total));
      }
    }
  }

  double t_at(int64_t k) const {
    return static_cast<double>(k) * cfg.period;
  }

  // Row applied by node i this round; faulty and wla-disabled nodes use their
  // frozen rows, learners use the pre-observation ledger state.
  wla::WeightRow row_for(int i, bool skew) const {
    const auto ui = static_cast<size_t>(i);
    if (led_of[ui] >= 0) {
      const auto& led =
          skew ? skew_led[static_cast<size_t>(led_of[ui])]
               : offset_led[static_cast<size_t>(led_of[ui])];
      return wla::weights_fixed(led);
    }
    return frozen[static_cast<size_t>(frozen_of[ui])].row();
  }

  void round(int64_t k, std::vector<double>* dense_skew,
             std::vector<double>* dense_offset) {
    const size_t un = static_cast<size_t>(n);
    const double tk = t_at(k);
    const auto& g = cfg.topology.fixed_graph();

    std::vector<double> tau_star_now(un), tau_now(un);
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<size_t>(i);
      tau_star_now[ui] =
          HardwareClock{alpha_star[ui], beta_star[ui]}.read(tk);
      tau_now[ui] = alpha[ui] * tau_star_now[ui] + beta[ui];
    }
    const std::vector<double> alpha_k = alpha;  // pre-update broadcast values
    const std::vector<double> beta_k = beta;

    std::vector<double> alpha_next = alpha, beta_next = beta;
    const uint64_t nn = static_cast<uint64_t>(n);
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<size_t>(i);
      const uint64_t node_block = static_cast<uint64_t>(k) * nn +
                                  static_cast<uint64_t>(i);
      bool normal_action = kind[ui] != fault::NodeKind::pfn;
      if (kind[ui] == fault::NodeKind::ifn)
        // One coin per round governs the whole broadcast.
        normal_action = fault::ifn_acts_normal(cfg.nodes[ui].p_normal, coin_s,
                                               node_block);
      if (!normal_action) {
        alpha_next[ui] =
            alpha_k[ui] + fault::sample_random(cfg.random_alpha, ra_s,
                                               node_block);
        beta_next[ui] = beta_k[ui] + fault::sample_random(cfg.random_beta,
                                                          rb_s, node_block);
        if (dense_skew != nullptr) {
          const auto& row = frozen[static_cast<size_t>(frozen_of[ui])].row();
          for (size_t t = 0; t < row.targets.size(); ++t) {
            const size_t off =
                ui * un + static_cast<size_t>(row.targets[t]);
            (*dense_skew)[off] = row.value[t];
            (*dense_offset)[off] = row.value[t];
          }
        }
        continue;
      }

      const auto& nbrs = g.in_neighbors(i);
      const wla::WeightRow skew_row = row_for(i, true);
      const wla::WeightRow offset_row = row_for(i, false);
      if (dense_skew != nullptr) {
        for (size_t t = 0; t < skew_row.targets.size(); ++t) {
          const size_t off =
              ui * un + static_cast<size_t>(skew_row.targets[t]);
          (*dense_skew)[off] = skew_row.value[t];
          (*dense_offset)[off] = offset_row.value[t];
        }
      }

      const uint64_t edge_base = static_cast<uint64_t>(k) * nn * nn +
                                 static_cast<uint64_t>(i) * nn;
      double dalpha = 0.0, dbeta = 0.0;
      std::vector<double> s_skew(nbrs.size()), s_offset(nbrs.size());
      for (size_t t = 0; t < nbrs.size(); ++t) {
        const auto uj = static_cast<size_t>(nbrs[t]);
        const double e = eta(tau_star_now[uj], tau_star_prev[uj],
                             tau_star_now[ui], tau_star_prev[ui]);
        const double wp = fault::sample_noise(
            {cfg.skew_noise_bound}, skew_noise_s,
            edge_base + static_cast<uint64_t>(nbrs[t]));
        const double wpp = fault::sample_noise(
            {cfg.offset_noise_bound}, offset_noise_s,
            edge_base + static_cast<uint64_t>(nbrs[t]));
        // Channel noise corrupts the transmitted alpha_j before the receiver
        // scales by eta; in x'-space the per-edge noise is then w' * alpha_j*,
        // which is the derived closed-loop noise term.
        const double skew_resid = e * (alpha_k[uj] + wp) - alpha_k[ui];
        const double offset_resid =
            tau_now[uj] - alpha_k[ui] * tau_star_now[ui] - beta_k[ui] + wpp;
        dalpha += skew_row.value[t] * skew_resid;
        dbeta += offset_row.value[t] * offset_resid;
        s_skew[t] = std::abs(skew_resid);
        s_offset[t] = std::abs(offset_resid);
      }
      alpha_next[ui] = alpha_k[ui] + dalpha;
      beta_next[ui] = beta_k[ui] + dbeta;
      if (led_of[ui] >= 0 && !nbrs.empty()) {
        skew_led[static_cast<size_t>(led_of[ui])].observe_fixed(
            s_skew, k, cfg.skew_reward);
        offset_led[static_cast<size_t>(led_of[ui])].observe_fixed(
            s_offset, k, cfg.offset_reward);
      }
    }
    alpha = std::move(alpha_next);
    beta = std::move(beta_next);
    tau_star_prev = std::move(tau_star_now);
  }

  std::vector<double> matrix_now(bool skew) const {
    const size_t un = static_cast<size_t>(n);
    std::vector<double> dense(un * un, 0.0);
    for (int i = 0; i < n; ++i) {
      const wla::WeightRow row = row_for(i, skew);
      for (size_t t = 0; t < row.targets.size(); ++t)
        dense[static_cast<size_t>(i) * un +
              static_cast<size_t>(row.targets[t])] = row.value[t];
    }
    return dense;
  }
};

std::array<double, 3> tri_disagreement(std::span<const double> xp,
                                       std::span<const double> xpp,
                                       std::span<const double> tau,
                                       std::span<const int> normal) {
  std::array<double, 3> d{0.0, 0.0, 0.0};
  for (size_t a = 0; a < normal.size(); ++a)
    for (size_t b = a + 1; b < normal.size(); ++b) {
      const auto i = static_cast<size_t>(normal[a]);
      const auto j = static_cast<size_t>(normal[b]);
      d[0] = std::max(d[0], std::abs(xp[i] - xp[j]));
      d[1] = std::max(d[1], std::abs(xpp[i] - xpp[j]));
      d[2] = std::max(d[2], std::abs(tau[i] - tau[j]));
    }
  return d;
}

}  // namespace

ClockTrace run_clock(const ClockConfig& cfg) {
  ClockTrace trace;
  trace.warnings = validate_clock(cfg);
  ClockEngine e(cfg);
  trace.n = e.n;
  trace.alpha_star = e.alpha_star;
  trace.beta_star = e.beta_star;
  for (int i = 0; i < e.n; ++i)
    if (!cfg.nodes[static_cast<size_t>(i)].faulty())
      trace.normal_nodes.push_back(i);

  const auto record = [&](int64_t k) {
    const size_t un = static_cast<size_t>(e.n);
    const double tk = e.t_at(k);
    std::vector<double> xp(un), xpp(un), tau(un);
    for (size_t i = 0; i < un; ++i) {
      xp[i] = e.alpha[i] * e.alpha_star[i];
      xpp[i] = e.alpha[i] * e.beta_star[i] + e.beta[i];
      tau[i] = e.alpha[i] * (e.alpha_star[i] * tk + e.beta_star[i]) + e.beta[i];
    }
    if (trace.normal_nodes.size() >= 2)
      trace.disagreement.push_back(
          tri_disagreement(xp, xpp, tau, trace.normal_nodes));
    else
      trace.disagreement.push_back({0.0, 0.0, 0.0});
    trace.alpha.push_back(e.alpha);
    trace.beta.push_back(e.beta);
    trace.x_prime.push_back(std::move(xp));
    trace.x_dprime.push_back(std::move(xpp));
    trace.tau.push_back(std::move(tau));
  };
  const auto want_snapshot = [&](int64_t k) {
    return std::find(cfg.snapshot_steps.begin(), cfg.snapshot_steps.end(), k) !=
           cfg.snapshot_steps.end();
  };
  const auto snap = [&](int64_t k) {
    trace.skew_snapshots.emplace_back(k, e.matrix_now(true));
    trace.offset_snapshots.emplace_back(k, e.matrix_now(false));
  };

  record(0);
  for (int64_t k = 0; k < cfg.max_iter; ++k) {
    if (want_snapshot(k)) snap(k);
    if (cfg.record_rows) {
      const size_t un = static_cast<size_t>(e.n);
      trace.skew_rows.emplace_back(un * un, 0.0);
      trace.offset_rows.emplace_back(un * un, 0.0);
      e.round(k, &trace.skew_rows.back(), &trace.offset_rows.back());
    } else {
      e.round(k, nullptr, nullptr);
    }
    record(k + 1);
  }
  if (want_snapshot(cfg.max_iter)) snap(cfg.max_iter);
  return trace;
}

std::array<double, 3> clock_disagreement(const ClockTrace& trace, int64_t k,
                                         std::span<const int> normal) {
  if (normal.size() < 2)
    throw std::invalid_argument("clock disagreement needs >= 2 normal nodes");
  if (k < 0 || static_cast<size_t>(k) >= trace.x_prime.size())
    throw std::invalid_argument("step index outside the trace");
  const auto uk = static_cast<size_t>(k);
  return tri_disagreement(trace.x_prime[uk], trace.x_dprime[uk],
                          trace.tau[uk], normal);
}

}  // namespace wlsim::clocks

#pragma once
// Node behavioral classes (Normal, PFN, IFN) and the bounded random sources
// behind them. All draws are block-addressed on a caller-supplied substream.

#include <cstdint>

#include "wlsim/rng.hpp"

namespace wlsim::fault {

struct RandomSpec {
  double lo = 0.0;
  double hi = 0.0;  // draw is uniform on [lo, hi)
};

struct NoiseSpec {
  double bound = 0.0;  // draws are uniform on (-bound, bound), strict
};

enum class NodeKind { normal, pfn, ifn };

struct NodeSpec {
  NodeKind kind = NodeKind::normal;
  double p_normal = 1.0;   // IFN: probability of acting normally this step
  RandomSpec random;       // PFN/IFN random control input

  static NodeSpec normal() { return {}; }
  static NodeSpec pfn(RandomSpec r) {
    return {NodeKind::pfn, 1.0, r};
  }
  static NodeSpec ifn(double p, RandomSpec r) {
    return {NodeKind::ifn, p, r};
  }
  bool faulty() const { return kind != NodeKind::normal; }
};

void validate(const RandomSpec& spec);  // lo <= hi
void validate(const NoiseSpec& spec);   // bound >= 0
void validate(const NodeSpec& spec);    // p_normal in [0, 1]

double sample_random(const RandomSpec& spec, const rng::Substream& s,
                     uint64_t block);
double sample_noise(const NoiseSpec& spec, const rng::Substream& s,
                    uint64_t block);
bool ifn_acts_normal(double p_normal, const rng::Substream& s, uint64_t block);

}  // namespace wlsim::fault

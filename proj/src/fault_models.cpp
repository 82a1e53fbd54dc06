#include "wlsim/fault_models.hpp"

#include <cmath>
#include <stdexcept>

namespace wlsim::fault {

void validate(const RandomSpec& spec) {
  if (!(spec.lo <= spec.hi))
    throw std::invalid_argument("random spec needs lo <= hi");
}

void validate(const NoiseSpec& spec) {
  if (!(spec.bound >= 0.0))
    throw std::invalid_argument("noise bound must be >= 0");
}

void validate(const NodeSpec& spec) {
  if (spec.kind == NodeKind::ifn &&
      !(spec.p_normal >= 0.0 && spec.p_normal <= 1.0))
    throw std::invalid_argument("IFN p_normal must lie in [0, 1]");
  if (spec.kind != NodeKind::normal) validate(spec.random);
}

double sample_random(const RandomSpec& spec, const rng::Substream& s,
                     uint64_t block) {
  return spec.lo + (spec.hi - spec.lo) * s.u01_at(block);
}

double sample_noise(const NoiseSpec& spec, const rng::Substream& s,
                    uint64_t block) {
  // Same expression as kernels::sym_noise_blocks so the per-edge and bulk
  // generation paths agree bitwise.
  return spec.bound * std::fma(2.0, s.u01_open_at(block), -1.0);
}

bool ifn_acts_normal(double p_normal, const rng::Substream& s,
                     uint64_t block) {
  return s.u01_at(block) < p_normal;
}

}  // namespace wlsim::fault

#pragma once
// Counter-based PRNG (Philox4x32-10) and deterministic substream derivation.
//
// Every random draw in a run is addressed by (substream, block index) instead
// of by draw order: a substream is a 128-bit identity (64-bit Philox key plus
// a 64-bit counter prefix) derived from the master seed and an ordered label
// path, and block b of a substream is the Philox output for counter
// (lo32(b), hi32(b), lo32(prefix), hi32(prefix)). Results therefore never
// depend on evaluation order, and disjoint label paths give independent,
// non-interacting streams on every platform.
//
// Derivation rule (pure 64-bit arithmetic, documented for reproducibility):
//   root(seed)        : h = mix64(seed)
//   child(h, "label") : h' = mix64(h ^ fnv1a64(label))
//   child(h, index)   : h' = mix64(h ^ (index + 0x9e3779b97f4a7c15))
//   key = h, prefix = mix64(h ^ 0xc2b2ae3d27d4eb4f)
// where mix64 is the splitmix64 finalizer.

#include <cstdint>
#include <string_view>

namespace wlsim::rng {

struct Block {
  uint32_t x[4];
};

// One block of the Philox4x32 generator with the standard 10 rounds and the
// reference multiplier/Weyl constants.
Block philox4x32(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                 uint32_t k0, uint32_t k1);

constexpr uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

uint64_t fnv1a64(std::string_view s);

// The canonical bits -> double mappings, shared by the scalar and SIMD
// generation paths (52-bit mantissa; exact in both).
inline double u01_from_bits(uint64_t bits) {
  return static_cast<double>(bits >> 12) * 0x1.0p-52;  // [0, 1)
}
inline double u01_open_from_bits(uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;  // (0, 1)
}

class Substream {
 public:
  explicit Substream(uint64_t master_seed);

  Substream child(std::string_view label) const;
  Substream child(uint64_t index) const;

  // Draws addressed by block index. Pure functions of (key, prefix, block).
  uint64_t bits_at(uint64_t block) const;
  double u01_at(uint64_t block) const { return u01_from_bits(bits_at(block)); }
  double u01_open_at(uint64_t block) const {
    return u01_open_from_bits(bits_at(block));
  }

  // Sequential interface for stream-style consumers.
  double next_u01() { return u01_at(cursor_++); }
  uint64_t next_bits() { return bits_at(cursor_++); }

  uint64_t key() const { return key_; }
  uint64_t prefix() const { return prefix_; }

 private:
  Substream(uint64_t key, uint64_t prefix) : key_(key), prefix_(prefix) {}
  uint64_t key_;
  uint64_t prefix_;
  uint64_t cursor_ = 0;
};

// 64-bit seed for an independent replica or sub-experiment:
// Substream(master).child(label).child(index).key().
uint64_t derive_seed(uint64_t master_seed, std::string_view label,
                     uint64_t index);

}  // namespace wlsim::rng

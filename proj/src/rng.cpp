#include "wlsim/rng.hpp"

namespace wlsim::rng {

namespace {

constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(uint32_t c[4], uint32_t k0, uint32_t k1) {
  const uint64_t p0 = static_cast<uint64_t>(kMul0) * c[0];
  const uint64_t p1 = static_cast<uint64_t>(kMul1) * c[2];
  const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
  const uint32_t lo0 = static_cast<uint32_t>(p0);
  const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
  const uint32_t lo1 = static_cast<uint32_t>(p1);
  const uint32_t n0 = hi1 ^ c[1] ^ k0;
  const uint32_t n1 = lo1;
  const uint32_t n2 = hi0 ^ c[3] ^ k1;
  const uint32_t n3 = lo0;
  c[0] = n0;
  c[1] = n1;
  c[2] = n2;
  c[3] = n3;
}

}  // namespace

Block philox4x32(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                 uint32_t k0, uint32_t k1) {
  uint32_t c[4] = {c0, c1, c2, c3};
  for (int r = 0; r < 10; ++r) {
    round_once(c, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return Block{{c[0], c[1], c[2], c[3]}};
}

uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

Substream::Substream(uint64_t master_seed) {
  key_ = mix64(master_seed);
  prefix_ = mix64(key_ ^ 0xc2b2ae3d27d4eb4full);
}

Substream Substream::child(std::string_view label) const {
  const uint64_t h = mix64(key_ ^ fnv1a64(label));
  return Substream(h, mix64(h ^ 0xc2b2ae3d27d4eb4full));
}

Substream Substream::child(uint64_t index) const {
  const uint64_t h = mix64(key_ ^ (index + 0x9e3779b97f4a7c15ull));
  return Substream(h, mix64(h ^ 0xc2b2ae3d27d4eb4full));
}

uint64_t Substream::bits_at(uint64_t block) const {
  const Block b = philox4x32(static_cast<uint32_t>(block),
                             static_cast<uint32_t>(block >> 32),
                             static_cast<uint32_t>(prefix_),
                             static_cast<uint32_t>(prefix_ >> 32),
                             static_cast<uint32_t>(key_),
                             static_cast<uint32_t>(key_ >> 32));
  return (static_cast<uint64_t>(b.x[1]) << 32) | b.x[0];
}

uint64_t derive_seed(uint64_t master_seed, std::string_view label,
                     uint64_t index) {
  return Substream(master_seed).child(label).child(index).key();
}

}  // namespace wlsim::rng

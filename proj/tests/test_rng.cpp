#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "wlsim/rng.hpp"

using namespace wlsim;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Reference vectors from the Random123 distribution (kat_vectors).
  auto b = rng::philox4x32(0, 0, 0, 0, 0, 0);
  CHECK(b.x[0] == 0x6627e8d5u);
  CHECK(b.x[1] == 0xe169c58du);
  CHECK(b.x[2] == 0xbc57ac4cu);
  CHECK(b.x[3] == 0x9b00dbd8u);

  b = rng::philox4x32(0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu,
                      0xffffffffu, 0xffffffffu);
  CHECK(b.x[0] == 0x408f276du);
  CHECK(b.x[1] == 0x41c83b0eu);
  CHECK(b.x[2] == 0xa20bc7c6u);
  CHECK(b.x[3] == 0x6d5451fdu);

  b = rng::philox4x32(0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u,
                      0xa4093822u, 0x299f31d0u);
  CHECK(b.x[0] == 0xd16cfe09u);
  CHECK(b.x[1] == 0x94fdccebu);
  CHECK(b.x[2] == 0x5001e420u);
  CHECK(b.x[3] == 0x24126ea1u);
}

TEST_CASE("substream determinism and distinctness") {
  rng::Substream a = rng::Substream(42).child("noise").child(3);
  rng::Substream b = rng::Substream(42).child("noise").child(3);
  rng::Substream c = rng::Substream(42).child("noise").child(4);
  for (uint64_t k = 0; k < 1000; ++k) {
    CHECK(a.bits_at(k) == b.bits_at(k));
  }
  int differing = 0;
  for (uint64_t k = 0; k < 10000; ++k)
    if (a.bits_at(k) != c.bits_at(k)) ++differing;
  CHECK(differing == 10000);
}

TEST_CASE("u01 mappings stay inside their intervals") {
  rng::Substream s = rng::Substream(7).child("u");
  double lo = 1.0, hi = 0.0, lo_open = 1.0, hi_open = 0.0;
  for (uint64_t k = 0; k < 200000; ++k) {
    const double u = s.u01_at(k);
    const double v = s.u01_open_at(k);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    lo_open = std::min(lo_open, v);
    hi_open = std::max(hi_open, v);
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(lo_open > 0.0);
  CHECK(hi_open < 1.0);
}

TEST_CASE("substream independence: paired-draw correlation") {
  rng::Substream a = rng::Substream(99).child("left");
  rng::Substream b = rng::Substream(99).child("right");
  const int n = 100000;
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int k = 0; k < n; ++k) {
    const double x = a.u01_at(static_cast<uint64_t>(k));
    const double y = b.u01_at(static_cast<uint64_t>(k));
    sa += x;
    sb += y;
    saa += x * x;
    sbb += y * y;
    sab += x * y;
  }
  const double ma = sa / n, mb = sb / n;
  const double va = saa / n - ma * ma, vb = sbb / n - mb * mb;
  const double cov = sab / n - ma * mb;
  const double r = cov / std::sqrt(va * vb);
  CHECK(std::abs(r) < 0.01);
}

TEST_CASE("derive_seed distinguishes labels and indices") {
  std::set<uint64_t> seen;
  for (uint64_t i = 0; i < 100; ++i) {
    seen.insert(rng::derive_seed(5, "rep", i));
    seen.insert(rng::derive_seed(5, "point", i));
  }
  CHECK(seen.size() == 200);
  CHECK(rng::derive_seed(5, "rep", 0) == rng::derive_seed(5, "rep", 0));
}

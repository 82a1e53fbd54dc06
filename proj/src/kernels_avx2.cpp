// AVX2 backend. Mirrors the scalar reference operation for operation: the
// same reduction lane order, fused multiply-adds where the scalar path uses
// std::fma, and the same exp polynomial, so results match the scalar backend
// bit for bit (tests/test_kernels.cpp enforces this).

#include <immintrin.h>

#include <cmath>

#include "kernels_backends.hpp"
#include "kernels_internal.hpp"
#include "wlsim/rng.hpp"

namespace wlsim::kernels::avx2 {

namespace {

using detail::combine_lanes;
using detail::combine_lanes_max;

inline double reduce_add(__m256d acc, const double* tail, size_t tail_n,
                         double fold(const double[4])) {
  alignas(32) double a[4];
  _mm256_store_pd(a, acc);
  for (size_t t = 0; t < tail_n; ++t) a[t] += tail[t];
  return fold(a);
}

// ---- exp ----------------------------------------------------------------

inline __m256d exp4(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(detail::kLog2E);
  const __m256d n = _mm256_round_pd(
      _mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fmadd_pd(n, _mm256_set1_pd(-detail::kLn2Hi), x);
  r = _mm256_fmadd_pd(n, _mm256_set1_pd(-detail::kLn2Lo), r);
  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d p = _mm256_fmadd_pd(_mm256_set1_pd(detail::kExpP0), rr,
                              _mm256_set1_pd(detail::kExpP1));
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(detail::kExpP2));
  p = _mm256_mul_pd(r, p);
  __m256d q = _mm256_fmadd_pd(_mm256_set1_pd(detail::kExpQ0), rr,
                              _mm256_set1_pd(detail::kExpQ1));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(detail::kExpQ2));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(detail::kExpQ3));
  const __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  const __m256d y = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

  // 2^n built from exponent bits. n + 1023 is in [1, 2100]; the magic-add
  // trick leaves it as an exact integer in the low dword of each lane.
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 1.5 * 2^52
  const __m256d biased = _mm256_add_pd(n, _mm256_add_pd(magic,
                                                        _mm256_set1_pd(1023.0)));
  __m256i bits = _mm256_castpd_si256(biased);
  bits = _mm256_and_si256(bits, _mm256_set1_epi64x(0xFFFFFFFFll));
  bits = _mm256_slli_epi64(bits, 52);
  const __m256d scale = _mm256_castsi256_pd(bits);
  __m256d res = _mm256_mul_pd(y, scale);

  // Flush to zero below the cutoff, as the scalar element function does.
  const __m256d under = _mm256_cmp_pd(
      x, _mm256_set1_pd(detail::kExpUnderflow), _CMP_LT_OQ);
  return _mm256_andnot_pd(under, res);
}

// ---- Philox, 8 independent blocks per call -------------------------------

struct Philox8 {
  __m256i c0, c1, c2, c3;
};

inline __m256i mullo32(__m256i a, __m256i b) { return _mm256_mullo_epi32(a, b); }

inline __m256i mulhi32u(__m256i a, __m256i b) {
  const __m256i even = _mm256_srli_epi64(_mm256_mul_epu32(a, b), 32);
  const __m256i odd =
      _mm256_mul_epu32(_mm256_srli_epi64(a, 32), _mm256_srli_epi64(b, 32));
  return _mm256_blend_epi32(even, odd, 0xAA);
}

inline Philox8 philox8(uint64_t key, uint64_t prefix, uint64_t block0) {
  alignas(32) uint32_t lo[8], hi[8];
  for (int i = 0; i < 8; ++i) {
    const uint64_t b = block0 + static_cast<uint64_t>(i);
    lo[i] = static_cast<uint32_t>(b);
    hi[i] = static_cast<uint32_t>(b >> 32);
  }
  __m256i c0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(lo));
  __m256i c1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(hi));
  __m256i c2 = _mm256_set1_epi32(static_cast<int>(static_cast<uint32_t>(prefix)));
  __m256i c3 = _mm256_set1_epi32(static_cast<int>(static_cast<uint32_t>(prefix >> 32)));
  __m256i k0 = _mm256_set1_epi32(static_cast<int>(static_cast<uint32_t>(key)));
  __m256i k1 = _mm256_set1_epi32(static_cast<int>(static_cast<uint32_t>(key >> 32)));
  const __m256i m0 = _mm256_set1_epi32(static_cast<int>(0xD2511F53u));
  const __m256i m1 = _mm256_set1_epi32(static_cast<int>(0xCD9E8D57u));
  const __m256i w0 = _mm256_set1_epi32(static_cast<int>(0x9E3779B9u));
  const __m256i w1 = _mm256_set1_epi32(static_cast<int>(0xBB67AE85u));
  for (int r = 0; r < 10; ++r) {
    const __m256i hi0 = mulhi32u(c0, m0);
    const __m256i lo0 = mullo32(c0, m0);
    const __m256i hi1 = mulhi32u(c2, m1);
    const __m256i lo1 = mullo32(c2, m1);
    const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), k0);
    const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), k1);
    c0 = n0;
    c1 = lo1;
    c2 = n2;
    c3 = lo0;
    k0 = _mm256_add_epi32(k0, w0);
    k1 = _mm256_add_epi32(k1, w1);
  }
  return Philox8{c0, c1, c2, c3};
}

// bits = (x1 << 32) | x0 per block, then v = bits >> 12 as an exact double.
inline void u64_values(const Philox8& p, __m256d& v_lo, __m256d& v_hi) {
  // Interleave x0/x1 into 64-bit lanes. c0 holds x0 of blocks 0..7 in dword
  // lanes, c1 holds x1.
  const __m256i lo_pairs = _mm256_unpacklo_epi32(p.c0, p.c1);  // blocks 0,1,4,5
  const __m256i hi_pairs = _mm256_unpackhi_epi32(p.c0, p.c1);  // blocks 2,3,6,7
  const __m256i magic_i = _mm256_set1_epi64x(0x4330000000000000ll);  // 2^52
  const __m256d magic_d = _mm256_set1_pd(4503599627370496.0);        // 2^52
  const __m256i a = _mm256_or_si256(_mm256_srli_epi64(lo_pairs, 12), magic_i);
  const __m256i b = _mm256_or_si256(_mm256_srli_epi64(hi_pairs, 12), magic_i);
  v_lo = _mm256_sub_pd(_mm256_castsi256_pd(a), magic_d);  // blocks 0,1,4,5
  v_hi = _mm256_sub_pd(_mm256_castsi256_pd(b), magic_d);  // blocks 2,3,6,7
}

// Store blocks back in index order 0..7 from the (0,1,4,5)/(2,3,6,7) pairs.
inline void store_blocks(__m256d v_lo, __m256d v_hi, double* out) {
  _mm_storeu_pd(out + 0, _mm256_castpd256_pd128(v_lo));
  _mm_storeu_pd(out + 2, _mm256_castpd256_pd128(v_hi));
  _mm_storeu_pd(out + 4, _mm256_extractf128_pd(v_lo, 1));
  _mm_storeu_pd(out + 6, _mm256_extractf128_pd(v_hi, 1));
}

template <typename MapFn>
inline void gen_blocks(uint64_t key, uint64_t prefix, uint64_t block0,
                       double* out, size_t n, MapFn map8, double (*map1)(uint64_t)) {
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const Philox8 p = philox8(key, prefix, block0 + i);
    __m256d v_lo, v_hi;
    u64_values(p, v_lo, v_hi);
    alignas(32) double v[8];
    store_blocks(v_lo, v_hi, v);
    const __m256d r0 = map8(_mm256_load_pd(v));
    const __m256d r1 = map8(_mm256_load_pd(v + 4));
    _mm256_storeu_pd(out + i, r0);
    _mm256_storeu_pd(out + i + 4, r1);
  }
  for (; i < n; ++i) {
    const uint64_t b = block0 + i;
    const rng::Block blk = rng::philox4x32(
        static_cast<uint32_t>(b), static_cast<uint32_t>(b >> 32),
        static_cast<uint32_t>(prefix), static_cast<uint32_t>(prefix >> 32),
        static_cast<uint32_t>(key), static_cast<uint32_t>(key >> 32));
    out[i] = map1((static_cast<uint64_t>(blk.x[1]) << 32) | blk.x[0]);
  }
}

}  // namespace

double exp_shift_sum(const double* x, double shift, double* y, size_t n) {
  const __m256d vshift = _mm256_set1_pd(shift);
  __m256d acc = _mm256_setzero_pd();
  const size_t nb = n / 4 * 4;
  for (size_t i = 0; i < nb; i += 4) {
    const __m256d v = exp4(_mm256_sub_pd(_mm256_loadu_pd(x + i), vshift));
    _mm256_storeu_pd(y + i, v);
    acc = _mm256_add_pd(acc, v);
  }
  alignas(32) double a[4];
  _mm256_store_pd(a, acc);
  for (size_t t = 0; nb + t < n; ++t) {
    const double v = detail::exp_elem(x[nb + t] - shift);
    y[nb + t] = v;
    a[t] += v;
  }
  return combine_lanes(a);
}

double sum(const double* x, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const size_t nb = n / 4 * 4;
  for (size_t i = 0; i < nb; i += 4)
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  return reduce_add(acc, x + nb, n - nb, combine_lanes);
}

double max_value(const double* x, size_t n) {
  __m256d acc = _mm256_set1_pd(x[0]);
  const size_t nb = n / 4 * 4;
  for (size_t i = 0; i < nb; i += 4)
    acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
  alignas(32) double a[4];
  _mm256_store_pd(a, acc);
  for (size_t t = 0; nb + t < n; ++t)
    if (x[nb + t] > a[t]) a[t] = x[nb + t];
  return combine_lanes_max(a);
}

double centered_sumsq(const double* x, double mean, size_t n) {
  const __m256d vmean = _mm256_set1_pd(mean);
  __m256d acc = _mm256_setzero_pd();
  const size_t nb = n / 4 * 4;
  for (size_t i = 0; i < nb; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), vmean);
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  alignas(32) double a[4];
  _mm256_store_pd(a, acc);
  for (size_t t = 0; nb + t < n; ++t) {
    const double d = x[nb + t] - mean;
    a[t] = std::fma(d, d, a[t]);
  }
  return combine_lanes(a);
}

double weighted_diff_sum(const double* w, const double* x, double x0,
                         size_t n) {
  const __m256d v0 = _mm256_set1_pd(x0);
  __m256d acc = _mm256_setzero_pd();
  const size_t nb = n / 4 * 4;
  for (size_t i = 0; i < nb; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), v0);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), d, acc);
  }
  alignas(32) double a[4];
  _mm256_store_pd(a, acc);
  for (size_t t = 0; nb + t < n; ++t)
    a[t] = std::fma(w[nb + t], x[nb + t] - x0, a[t]);
  return combine_lanes(a);
}

void add_inplace(double* a, const double* b, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(a + i,
                     _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) a[i] += b[i];
}

void scale(double* x, double c, size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), vc));
  for (; i < n; ++i) x[i] *= c;
}

void u01_blocks(uint64_t key, uint64_t prefix, uint64_t block0, double* out,
                size_t n) {
  const __m256d k = _mm256_set1_pd(0x1.0p-52);
  gen_blocks(
      key, prefix, block0, out, n,
      [k](__m256d v) { return _mm256_mul_pd(v, k); }, rng::u01_from_bits);
}

void u01_open_blocks(uint64_t key, uint64_t prefix, uint64_t block0,
                     double* out, size_t n) {
  const __m256d k = _mm256_set1_pd(0x1.0p-52);
  const __m256d h = _mm256_set1_pd(0x1.0p-53);
  gen_blocks(
      key, prefix, block0, out, n,
      [k, h](__m256d v) { return _mm256_fmadd_pd(v, k, h); },
      rng::u01_open_from_bits);
}

void sym_noise_blocks(uint64_t key, uint64_t prefix, uint64_t block0,
                      double bound, double* out, size_t n) {
  u01_open_blocks(key, prefix, block0, out, n);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d neg1 = _mm256_set1_pd(-1.0);
  const __m256d vb = _mm256_set1_pd(bound);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d u = _mm256_loadu_pd(out + i);
    _mm256_storeu_pd(out + i,
                     _mm256_mul_pd(vb, _mm256_fmadd_pd(two, u, neg1)));
  }
  for (; i < n; ++i) out[i] = bound * std::fma(2.0, out[i], -1.0);
}

}  // namespace wlsim::kernels::avx2

// Scalar reference backend. Every kernel here is the semantic definition the
// AVX2 backend must reproduce bitwise.

#include <cmath>

#include "kernels_internal.hpp"
#include "wlsim/kernels.hpp"
#include "wlsim/rng.hpp"

namespace wlsim::kernels {

double exp_reference(double x) { return detail::exp_elem(x); }

namespace scalar {

double exp_shift_sum(const double* x, double shift, double* y, size_t n) {
  double acc[4] = {0, 0, 0, 0};
  const size_t nb = n / 4 * 4;
  for (size_t i = 0; i < nb; i += 4) {
    for (size_t l = 0; l < 4; ++l) {
      const double v = detail::exp_elem(x[i + l] - shift);
      y[i + l] = v;
      acc[l] += v;
    }
  }
  for (size_t t = 0; nb + t < n; ++t) {
    const double v = detail::exp_elem(x[nb + t] - shift);
    y[nb + t] = v;
    acc[t] += v;
  }
  return detail::combine_lanes(acc);
}

double sum(const double* x, size_t n) {
  double acc[4] = {0, 0, 0, 0};
  const size_t nb = n / 4 * 4;
  for (size_t i = 0; i < nb; i += 4)
    for (size_t l = 0; l < 4; ++l) acc[l] += x[i + l];
  for (size_t t = 0; nb + t < n; ++t) acc[t] += x[nb + t];
  return detail::combine_lanes(acc);
}

double max_value(const double* x, size_t n) {
  double acc[4] = {x[0], x[0], x[0], x[0]};
  const size_t nb = n / 4 * 4;
  for (size_t i = 0; i < nb; i += 4)
    for (size_t l = 0; l < 4; ++l)
      if (x[i + l] > acc[l]) acc[l] = x[i + l];
  for (size_t t = 0; nb + t < n; ++t)
    if (x[nb + t] > acc[t]) acc[t] = x[nb + t];
  return detail::combine_lanes_max(acc);
}

double centered_sumsq(const double* x, double mean, size_t n) {
  double acc[4] = {0, 0, 0, 0};
  const size_t nb = n / 4 * 4;
  for (size_t i = 0; i < nb; i += 4)
    for (size_t l = 0; l < 4; ++l) {
      const double d = x[i + l] - mean;
      acc[l] = std::fma(d, d, acc[l]);
    }
  for (size_t t = 0; nb + t < n; ++t) {
    const double d = x[nb + t] - mean;
    acc[t] = std::fma(d, d, acc[t]);
  }
  return detail::combine_lanes(acc);
}

double weighted_diff_sum(const double* w, const double* x, double x0,
                         size_t n) {
  double acc[4] = {0, 0, 0, 0};
  const size_t nb = n / 4 * 4;
  for (size_t i = 0; i < nb; i += 4)
    for (size_t l = 0; l < 4; ++l)
      acc[l] = std::fma(w[i + l], x[i + l] - x0, acc[l]);
  for (size_t t = 0; nb + t < n; ++t)
    acc[t] = std::fma(w[nb + t], x[nb + t] - x0, acc[t]);
  return detail::combine_lanes(acc);
}

void add_inplace(double* a, const double* b, size_t n) {
  for (size_t i = 0; i < n; ++i) a[i] += b[i];
}

void scale(double* x, double c, size_t n) {
  for (size_t i = 0; i < n; ++i) x[i] *= c;
}

void u01_blocks(uint64_t key, uint64_t prefix, uint64_t block0, double* out,
                size_t n) {
  for (size_t i = 0; i < n; ++i) {
    const uint64_t b = block0 + i;
    const rng::Block blk = rng::philox4x32(
        static_cast<uint32_t>(b), static_cast<uint32_t>(b >> 32),
        static_cast<uint32_t>(prefix), static_cast<uint32_t>(prefix >> 32),
        static_cast<uint32_t>(key), static_cast<uint32_t>(key >> 32));
    const uint64_t bits =
        (static_cast<uint64_t>(blk.x[1]) << 32) | blk.x[0];
    out[i] = rng::u01_from_bits(bits);
  }
}

void u01_open_blocks(uint64_t key, uint64_t prefix, uint64_t block0,
                     double* out, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    const uint64_t b = block0 + i;
    const rng::Block blk = rng::philox4x32(
        static_cast<uint32_t>(b), static_cast<uint32_t>(b >> 32),
        static_cast<uint32_t>(prefix), static_cast<uint32_t>(prefix >> 32),
        static_cast<uint32_t>(key), static_cast<uint32_t>(key >> 32));
    const uint64_t bits =
        (static_cast<uint64_t>(blk.x[1]) << 32) | blk.x[0];
    out[i] = rng::u01_open_from_bits(bits);
  }
}

void sym_noise_blocks(uint64_t key, uint64_t prefix, uint64_t block0,
                      double bound, double* out, size_t n) {
  u01_open_blocks(key, prefix, block0, out, n);
  for (size_t i = 0; i < n; ++i)
    out[i] = bound * std::fma(2.0, out[i], -1.0);
}

}  // namespace scalar
}  // namespace wlsim::kernels

#pragma once
// Per-backend entry points wired into the dispatch table.

#include <cstddef>
#include <cstdint>

namespace wlsim::kernels {

#define WLSIM_KERNEL_DECLS                                                   \
  double exp_shift_sum(const double* x, double shift, double* y, size_t n); \
  double sum(const double* x, size_t n);                                    \
  double max_value(const double* x, size_t n);                              \
  double centered_sumsq(const double* x, double mean, size_t n);            \
  double weighted_diff_sum(const double* w, const double* x, double x0,     \
                           size_t n);                                       \
  void add_inplace(double* a, const double* b, size_t n);                   \
  void scale(double* x, double c, size_t n);                                \
  void u01_blocks(uint64_t key, uint64_t prefix, uint64_t block0,           \
                  double* out, size_t n);                                   \
  void u01_open_blocks(uint64_t key, uint64_t prefix, uint64_t block0,      \
                       double* out, size_t n);                              \
  void sym_noise_blocks(uint64_t key, uint64_t prefix, uint64_t block0,     \
                        double bound, double* out, size_t n);

namespace scalar {
WLSIM_KERNEL_DECLS
}

#if WLSIM_HAVE_AVX2
namespace avx2 {
WLSIM_KERNEL_DECLS
}
#endif

#undef WLSIM_KERNEL_DECLS

}  // namespace wlsim::kernels

#include <cstdlib>
#include <cstring>

#include "kernels_backends.hpp"
#include "wlsim/kernels.hpp"

namespace wlsim::kernels {

namespace {

struct Table {
  double (*exp_shift_sum)(const double*, double, double*, size_t);
  double (*sum)(const double*, size_t);
  double (*max_value)(const double*, size_t);
  double (*centered_sumsq)(const double*, double, size_t);
  double (*weighted_diff_sum)(const double*, const double*, double, size_t);
  void (*add_inplace)(double*, const double*, size_t);
  void (*scale)(double*, double, size_t);
  void (*u01_blocks)(uint64_t, uint64_t, uint64_t, double*, size_t);
  void (*u01_open_blocks)(uint64_t, uint64_t, uint64_t, double*, size_t);
  void (*sym_noise_blocks)(uint64_t, uint64_t, uint64_t, double, double*,
                           size_t);
};

constexpr Table kScalar = {
    scalar::exp_shift_sum,    scalar::sum,
    scalar::max_value,        scalar::centered_sumsq,
    scalar::weighted_diff_sum, scalar::add_inplace,
    scalar::scale,            scalar::u01_blocks,
    scalar::u01_open_blocks,  scalar::sym_noise_blocks,
};

#if WLSIM_HAVE_AVX2
constexpr Table kAvx2 = {
    avx2::exp_shift_sum,    avx2::sum,
    avx2::max_value,        avx2::centered_sumsq,
    avx2::weighted_diff_sum, avx2::add_inplace,
    avx2::scale,            avx2::u01_blocks,
    avx2::u01_open_blocks,  avx2::sym_noise_blocks,
};
#endif

Backend g_backend = Backend::scalar;
const Table* g_table = &kScalar;

bool apply(Backend b) {
  if (b == Backend::avx2) {
#if WLSIM_HAVE_AVX2
    if (!cpu_has_avx2()) return false;
    g_backend = Backend::avx2;
    g_table = &kAvx2;
    return true;
#else
    return false;
#endif
  }
  g_backend = Backend::scalar;
  g_table = &kScalar;
  return true;
}

bool init_from_env() {
  const char* env = std::getenv("WLSIM_KERNELS");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return apply(Backend::scalar);
    if (std::strcmp(env, "avx2") == 0 && apply(Backend::avx2)) return true;
    // "auto" or anything unrecognized falls through to detection.
  }
  if (cpu_has_avx2() && apply(Backend::avx2)) return true;
  return apply(Backend::scalar);
}

const bool g_initialized = init_from_env();

}  // namespace

bool cpu_has_avx2() {
#if WLSIM_HAVE_AVX2
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active() {
  (void)g_initialized;
  return g_backend;
}

bool set_backend(Backend b) { return apply(b); }

const char* backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

double exp_shift_sum(const double* x, double shift, double* y, size_t n) {
  return g_table->exp_shift_sum(x, shift, y, n);
}
double sum(const double* x, size_t n) { return g_table->sum(x, n); }
double max_value(const double* x, size_t n) { return g_table->max_value(x, n); }
double centered_sumsq(const double* x, double mean, size_t n) {
  return g_table->centered_sumsq(x, mean, n);
}
double weighted_diff_sum(const double* w, const double* x, double x0,
                         size_t n) {
  return g_table->weighted_diff_sum(w, x, x0, n);
}
void add_inplace(double* a, const double* b, size_t n) {
  g_table->add_inplace(a, b, n);
}
void scale(double* x, double c, size_t n) { g_table->scale(x, c, n); }
void u01_blocks(uint64_t key, uint64_t prefix, uint64_t block0, double* out,
                size_t n) {
  g_table->u01_blocks(key, prefix, block0, out, n);
}
void u01_open_blocks(uint64_t key, uint64_t prefix, uint64_t block0,
                     double* out, size_t n) {
  g_table->u01_open_blocks(key, prefix, block0, out, n);
}
void sym_noise_blocks(uint64_t key, uint64_t prefix, uint64_t block0,
                      double bound, double* out, size_t n) {
  g_table->sym_noise_blocks(key, prefix, block0, bound, out, n);
}

}  // namespace wlsim::kernels

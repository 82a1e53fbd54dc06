#pragma once
// Data-parallel inner-loop kernels: scalar reference implementations plus an
// AVX2 variant selected at runtime. The two backends are bit-identical by
// construction (same per-element operation sequence, shared fixed 4-lane
// accumulation order for reductions, fused multiply-adds on both sides), so a
// run produces the same bytes whichever backend executes it. Equivalence is
// enforced in tests/test_kernels.cpp.
//
// Reduction order, pinned for both backends (W = 4 lanes of double):
//   acc[l] (l = 0..3) accumulates elements 4*b + l over full blocks, the tail
//   element with in-tail offset t goes to acc[t], and the final combine is
//   (acc[0] + acc[2]) + (acc[1] + acc[3]).

#include <cstddef>
#include <cstdint>

namespace wlsim::kernels {

enum class Backend { scalar, avx2 };

// Backend in effect. Defaults to the best supported one; the WLSIM_KERNELS
// environment variable ("scalar" | "avx2" | "auto") overrides at startup.
Backend active();
// Returns false (and leaves the backend unchanged) if unsupported on this CPU.
bool set_backend(Backend b);
const char* backend_name(Backend b);
bool cpu_has_avx2();

// y[i] = exp(x[i] - shift); returns the sum of y in the pinned lane order.
// Results underflow to exactly 0 below about -708.4; arguments are expected
// to be <= 0 after the shift (softmax use).
double exp_shift_sum(const double* x, double shift, double* y, size_t n);

double sum(const double* x, size_t n);
double max_value(const double* x, size_t n);  // n >= 1
double centered_sumsq(const double* x, double mean, size_t n);
// Sum of w[i] * (x[i] - x0).
double weighted_diff_sum(const double* w, const double* x, double x0,
                         size_t n);
void add_inplace(double* a, const double* b, size_t n);  // a[i] += b[i]
void scale(double* x, double c, size_t n);

// n uniform doubles from consecutive Philox blocks block0 .. block0+n-1 of
// the substream identified by (key, prefix).
void u01_blocks(uint64_t key, uint64_t prefix, uint64_t block0, double* out,
                size_t n);                                       // [0, 1)
void u01_open_blocks(uint64_t key, uint64_t prefix, uint64_t block0,
                     double* out, size_t n);                     // (0, 1)
// out[i] = bound * (2*u - 1) with u drawn open, so |out[i]| < bound strictly.
void sym_noise_blocks(uint64_t key, uint64_t prefix, uint64_t block0,
                      double bound, double* out, size_t n);

// Scalar element function of the shared exp kernel (exposed for tests).
double exp_reference(double x);

}  // namespace wlsim::kernels

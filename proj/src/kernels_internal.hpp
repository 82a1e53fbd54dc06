#pragma once
// Shared pieces of the kernel backends. The exp constants and the scalar
// element functions here define the reference semantics; the AVX2 translation
// mirrors them operation for operation.

#include <cmath>
#include <cstdint>
#include <cstring>

namespace wlsim::kernels::detail {

// exp via a Cephes-style rational approximation on the reduced argument
// r = x - n*ln2, result scaled by 2^n. About 1 ulp over the supported range.
constexpr double kLog2E = 1.4426950408889634073599;
constexpr double kLn2Hi = 6.93145751953125e-1;
constexpr double kLn2Lo = 1.42860682030941723212e-6;
constexpr double kExpP0 = 1.26177193074810590878e-4;
constexpr double kExpP1 = 3.02994407707441961300e-2;
constexpr double kExpP2 = 9.99999999999999999910e-1;
constexpr double kExpQ0 = 3.00198505138664455042e-6;
constexpr double kExpQ1 = 2.52448340349684104192e-3;
constexpr double kExpQ2 = 2.27265548208155028766e-1;
constexpr double kExpQ3 = 2.00000000000000000005e0;
// ln(2^-1022): below this the result is flushed to 0 so the 2^n scaling
// never leaves the normal exponent range.
constexpr double kExpUnderflow = -708.396418532264106224;

inline double exp_elem(double x) {
  if (x < kExpUnderflow) return 0.0;
  const double n = std::nearbyint(x * kLog2E);
  double r = std::fma(n, -kLn2Hi, x);
  r = std::fma(n, -kLn2Lo, r);
  const double rr = r * r;
  const double p = r * std::fma(std::fma(kExpP0, rr, kExpP1), rr, kExpP2);
  const double q =
      std::fma(std::fma(std::fma(kExpQ0, rr, kExpQ1), rr, kExpQ2), rr, kExpQ3);
  const double e = p / (q - p);
  const double y = std::fma(2.0, e, 1.0);
  const int64_t ni = static_cast<int64_t>(n);
  uint64_t scale_bits = static_cast<uint64_t>(ni + 1023) << 52;
  double scale;
  std::memcpy(&scale, &scale_bits, sizeof scale);
  return y * scale;
}

// Combine in the pinned lane order; see kernels.hpp.
inline double combine_lanes(const double acc[4]) {
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

inline double combine_lanes_max(const double acc[4]) {
  const double a = acc[0] > acc[2] ? acc[0] : acc[2];
  const double b = acc[1] > acc[3] ? acc[1] : acc[3];
  return a > b ? a : b;
}

}  // namespace wlsim::kernels::detail

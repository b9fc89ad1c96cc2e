#pragma once

#include <cstdint>

#include "steinlab/errors.hpp"

namespace steinlab {

// Exact counts of y-smooth and y-rough integers in [1, x]. By vacuity 1 is
// both, so psi + phi <= x + 1 with equality iff no n <= x mixes factors from
// both sides of y.
struct CountTable {
  uint64_t x = 0;
  uint64_t y = 0;
  uint64_t psi = 0;  // y-smooth count
  uint64_t phi = 0;  // y-rough count
};

CountTable count_smooth_rough(uint64_t x, uint64_t y);
inline CountTable count_smooth(uint64_t x, uint64_t y) { return count_smooth_rough(x, y); }
inline CountTable count_rough(uint64_t x, uint64_t y) { return count_smooth_rough(x, y); }

// Rankin's bound: psi(x, y) <= x^alpha Prod_{p<=y} (1 - p^-alpha)^-1 for any
// alpha > 0, an unconditional inequality with no hidden constants, so
// slack >= 0 on every input or the sieve is wrong.
struct RankinCertificate {
  uint64_t x = 0;
  uint64_t y = 0;
  double alpha = 0.0;
  double bound = 0.0;
  uint64_t psi = 0;
  double slack = 0.0;
};

RankinCertificate rankin_certificate(uint64_t x, uint64_t y, double alpha);

// Short-interval rough count scaled the way Brun's sieve bounds it:
//   (phi(x+H, y) - phi(x, y)) * min(log y, log H) / H.
struct BrunRatio {
  uint64_t x = 0;
  uint64_t h = 0;
  uint64_t y = 0;
  uint64_t window_count = 0;
  double ratio = 0.0;
};

BrunRatio brun_ratio(uint64_t x, uint64_t h, uint64_t y);

// Sum_{p<=y} 1/p by direct summation; drifts from log log y by Mertens'
// constant.
double mertens_prime_sum(uint64_t y);

inline constexpr double kMertensConstant = 0.26149721284764278;

}  // namespace steinlab

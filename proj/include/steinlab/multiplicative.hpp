#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "steinlab/errors.hpp"
#include "steinlab/rng.hpp"

namespace steinlab {

// Sieve-backed table of the completely multiplicative unit-circle values
// alpha(1..N) for one phase assignment, with blocked prefix sums.
//
// alpha(n) = alpha(n / spf(n)) * alpha(spf(n)) by construction, so complete
// multiplicativity holds exactly up to the accumulated rounding of at most
// Omega(n) complex products. Prefix sums are kept as per-block partial sums
// formed pairwise; a query re-sums at most one block, keeping the error of
// Sum_{k<=n} alpha(k) at O(log N) ulps.
class MultiplicativeTable {
 public:
  static constexpr uint64_t kDefaultMemoryCap = 3ull << 30;
  static constexpr uint64_t kBlock = 1024;

  MultiplicativeTable(const PhaseAssignment& phases, uint64_t n_max,
                      uint64_t memory_cap_bytes = kDefaultMemoryCap);

  uint64_t size() const { return n_max_; }
  const PhaseAssignment& phases() const { return phases_; }
  const PrimeTable& primes() const { return phases_.primes(); }

  std::complex<double> alpha(uint64_t n) const { return alpha_[n]; }
  std::span<const std::complex<double>> values() const {
    return {alpha_.data() + 1, n_max_};
  }

  // Sum_{k<=n} alpha(k); n in [0, N].
  std::complex<double> sum_upto(uint64_t n) const;

 private:
  uint64_t n_max_;
  PhaseAssignment phases_;
  std::vector<std::complex<double>> alpha_;         // [0..N], [0] unused
  std::vector<std::complex<double>> block_prefix_;  // sums of whole blocks before block j
};

// Bitset over 1..N marking the y-smooth integers of a table (all prime
// factors <= y; 1 is vacuously smooth), with its own blocked prefix sums of
// the masked alpha values.
class SmoothMask {
 public:
  SmoothMask(const MultiplicativeTable& table, double y);

  double y() const { return y_; }
  uint64_t table_size() const { return n_max_; }
  bool is_smooth(uint64_t n) const {
    return (bits_[n >> 6] >> (n & 63)) & 1;
  }
  uint64_t smooth_count() const { return smooth_count_; }

  // Sum of alpha(k) over smooth k <= n.
  std::complex<double> sum_upto(const MultiplicativeTable& table, uint64_t n) const;

 private:
  double y_;
  uint64_t n_max_;
  uint64_t smooth_count_;
  std::vector<uint64_t> bits_;
  std::vector<std::complex<double>> block_prefix_;
};

// Normalized partial sum (1/sqrt(x)) Sum_{n<=x} alpha(n), optionally
// restricted to the y-smooth integers. For non-integer x the sum runs over
// n <= floor(x) while the normalization keeps the real x, so the record is a
// function of floor(x) rescaled by sqrt(floor(x)/x).
struct SumRecord {
  double x = 0.0;
  std::optional<double> y;
  std::complex<double> value;
  double normalization = 0.0;  // 1/sqrt(x)
};

SumRecord partial_sum(const MultiplicativeTable& table, double x);
SumRecord partial_sum(const MultiplicativeTable& table, double x, const SmoothMask& mask);

// Monte Carlo mean of a complex observable with per-coordinate standard
// errors, reduced in fixed replica order.
struct OrthogonalityEstimate {
  std::complex<double> mean;
  double se_re = 0.0;
  double se_im = 0.0;
  size_t replicas = 0;
};

// Estimates E[alpha(n) conj(alpha(m))] over independent phase assignments
// seeded {seed.master, seed.replica + k}.
OrthogonalityEstimate check_orthogonality(Seed seed,
                                          const std::shared_ptr<const PrimeTable>& primes,
                                          uint64_t n, uint64_t m, size_t replicas,
                                          unsigned workers = 0);

// Same expectation conditioned on the phases of primes <= y: n and m must be
// y-rough (no prime factor <= y), the phases of primes <= y stay pinned to
// smooth_seed and only the rough primes are resampled per replica.
OrthogonalityEstimate check_conditional_orthogonality(
    Seed smooth_seed, const std::shared_ptr<const PrimeTable>& primes, uint64_t n,
    uint64_t m, double y, size_t rough_replicas, unsigned workers = 0);

// Residual of the smooth/rough factorization of the partial sum:
//   S_x - Sum_{m<=x, m y-rough} alpha(m)/sqrt(m) * S_{x/m,y}
// where m = 1 counts as y-rough. An exact algebraic identity per sample; the
// residual only measures floating-point accumulation.
double check_splitting_identity(const MultiplicativeTable& table, const SmoothMask& mask,
                                double x);

// Second moment of S_x conditioned on the smooth phases: the left side is
// estimated by resampling the rough primes with the smooth phases frozen,
// the right side |S_{x,y}|^2 + Sum_{y<m<=x rough} m^{-1} |S_{x/m,y}|^2 is
// computed deterministically from the frozen phases.
struct ConditionalSecondMoment {
  double lhs_estimate = 0.0;
  double lhs_se = 0.0;
  double rhs_exact = 0.0;
  double relative_error = 0.0;
  size_t replicas = 0;
};

ConditionalSecondMoment check_conditional_second_moment(
    Seed smooth_seed, const std::shared_ptr<const PrimeTable>& primes, double x, double y,
    size_t rough_replicas, unsigned workers = 0);

}  // namespace steinlab

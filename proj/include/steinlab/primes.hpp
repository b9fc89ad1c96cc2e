#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace steinlab {

// Smallest-prime-factor table over [2, limit] plus the ordered prime list.
// Built once with a linear sieve and shared (immutable, thread-safe reads)
// between phase assignments, multiplicative tables and field evaluators.
class PrimeTable {
 public:
  explicit PrimeTable(uint64_t limit);

  uint64_t limit() const { return limit_; }

  bool is_prime(uint64_t n) const { return n >= 2 && n <= limit_ && spf_[n] == n; }

  // Smallest prime factor of n, 2 <= n <= limit.
  uint32_t spf(uint64_t n) const {
    check_range(n);
    return spf_[n];
  }

  uint64_t largest_prime_factor(uint64_t n) const;

  // 1-based position of p in the ordered prime sequence (2 -> 1, 3 -> 2, ...).
  uint64_t index_of(uint64_t p) const;

  const std::vector<uint32_t>& primes() const { return primes_; }
  size_t prime_count() const { return primes_.size(); }

  // Number of primes <= y (y may exceed limit only if y >= limit).
  size_t count_upto(double y) const;

  // Prime factorization (p, exponent), p ascending. n in [1, limit].
  void factorize(uint64_t n, std::vector<std::pair<uint64_t, uint32_t>>& out) const;

 private:
  void check_range(uint64_t n) const {
    if (n < 2 || n > limit_) throw std::out_of_range("PrimeTable: n outside [2, limit]");
  }

  uint64_t limit_;
  std::vector<uint32_t> spf_;
  std::vector<uint32_t> primes_;
};

std::shared_ptr<const PrimeTable> make_prime_table(uint64_t limit);

// Streams every prime <= limit through fn without retaining memory
// proportional to limit. Used for one-off constant evaluations whose
// truncation point exceeds any table we want to keep around.
template <typename Fn>
void for_each_prime(uint64_t limit, Fn&& fn) {
  if (limit < 2) return;
  // base primes up to sqrt(limit)
  uint64_t root = 1;
  while ((root + 1) * (root + 1) <= limit) ++root;
  std::vector<uint64_t> base;
  {
    std::vector<uint8_t> comp(root + 1, 0);
    for (uint64_t i = 2; i <= root; ++i) {
      if (comp[i]) continue;
      base.push_back(i);
      for (uint64_t j = i * i; j <= root; j += i) comp[j] = 1;
    }
  }
  for (uint64_t p : base) fn(p);
  const uint64_t seg = 1u << 20;
  std::vector<uint8_t> mark;
  for (uint64_t lo = root + 1; lo <= limit; lo += seg) {
    uint64_t hi = std::min(limit, lo + seg - 1);
    mark.assign(hi - lo + 1, 0);
    for (uint64_t p : base) {
      uint64_t start = ((lo + p - 1) / p) * p;
      if (start < p * p) start = p * p;
      for (uint64_t j = start; j <= hi; j += p) mark[j - lo] = 1;
    }
    for (uint64_t n = lo; n <= hi; ++n)
      if (!mark[n - lo]) fn(n);
  }
}

}  // namespace steinlab

#include "steinlab/primes.hpp"

#include <algorithm>
#include <cmath>

#include "steinlab/errors.hpp"

namespace steinlab {

PrimeTable::PrimeTable(uint64_t limit) : limit_(limit) {
  if (limit < 1) throw std::domain_error("PrimeTable: limit must be >= 1");
  if (limit > (1ull << 32)) throw resource_error("PrimeTable: limit above 2^32 not supported");
  spf_.assign(limit_ + 1, 0);
  // Linear sieve: each composite is struck exactly once, by its smallest
  // prime factor, so construction is O(limit).
  for (uint64_t n = 2; n <= limit_; ++n) {
    if (spf_[n] == 0) {
      spf_[n] = static_cast<uint32_t>(n);
      primes_.push_back(static_cast<uint32_t>(n));
    }
    for (uint32_t p : primes_) {
      if (p > spf_[n] || p > limit_ / n) break;
      spf_[n * p] = p;
    }
  }
}

uint64_t PrimeTable::largest_prime_factor(uint64_t n) const {
  check_range(n);
  uint64_t lpf = 1;
  while (n > 1) {
    uint64_t p = spf_[n];
    lpf = std::max(lpf, p);
    n /= p;
  }
  return lpf;
}

uint64_t PrimeTable::index_of(uint64_t p) const {
  if (!is_prime(p)) {
    if (p > limit_) throw std::out_of_range("PrimeTable::index_of: p beyond table limit");
    throw std::domain_error("PrimeTable::index_of: argument is not prime");
  }
  auto it = std::lower_bound(primes_.begin(), primes_.end(), static_cast<uint32_t>(p));
  return static_cast<uint64_t>(it - primes_.begin()) + 1;
}

size_t PrimeTable::count_upto(double y) const {
  if (y < 2) return 0;
  if (y >= static_cast<double>(limit_)) return primes_.size();
  auto it = std::upper_bound(primes_.begin(), primes_.end(),
                             static_cast<uint32_t>(std::floor(y)));
  return static_cast<size_t>(it - primes_.begin());
}

void PrimeTable::factorize(uint64_t n, std::vector<std::pair<uint64_t, uint32_t>>& out) const {
  out.clear();
  if (n == 1) return;
  check_range(n);
  while (n > 1) {
    uint64_t p = spf_[n];
    uint32_t e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
}

std::shared_ptr<const PrimeTable> make_prime_table(uint64_t limit) {
  return std::make_shared<const PrimeTable>(limit);
}

}  // namespace steinlab

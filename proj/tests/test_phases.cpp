#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "steinlab/rng.hpp"
#include "steinlab/stats.hpp"

using namespace steinlab;

namespace {
const auto kSmallTable = make_prime_table(2000);
}

TEST_CASE("phases are deterministic per (seed, prime)") {
  PhaseAssignment a({42, 7}, kSmallTable);
  CHECK(a.phase(2) == a.phase(2));
  PhaseAssignment b({42, 7}, kSmallTable);
  for (uint64_t p : {2, 3, 5, 997}) CHECK(a.phase(p) == b.phase(p));
  PhaseAssignment c({42, 8}, kSmallTable);
  CHECK(a.phase(2) != c.phase(2));
}

TEST_CASE("phases land in [0, 2pi) and alpha has unit modulus") {
  PhaseAssignment a({1, 0}, kSmallTable);
  for (uint64_t p : kSmallTable->primes()) {
    double th = a.phase(p);
    CHECK(th >= 0.0);
    CHECK(th < 2.0 * std::numbers::pi);
    CHECK(std::abs(std::abs(a.alpha(p)) - 1.0) <= 1e-15);
  }
}

TEST_CASE("lazy consistency: value independent of table size and query order") {
  auto big = make_prime_table(2'000'000);
  PhaseAssignment small_a({9, 1}, kSmallTable);
  PhaseAssignment big_a({9, 1}, big);
  std::vector<uint64_t> ps(kSmallTable->primes().begin(), kSmallTable->primes().end());
  std::mt19937_64 shuffle_rng(3);
  std::shuffle(ps.begin(), ps.end(), shuffle_rng);
  for (uint64_t p : ps) CHECK(small_a.phase(p) == big_a.phase(p));
  CHECK(big_a.phase(1'999'993) >= 0.0);  // prime near the big limit resolves
}

TEST_CASE("non-prime and out-of-range arguments are rejected") {
  PhaseAssignment a({0, 0}, kSmallTable);
  CHECK_THROWS_AS(a.phase(1), std::domain_error);
  CHECK_THROWS_AS(a.phase(4), std::domain_error);
  CHECK_THROWS_AS(a.phase(0), std::domain_error);
  CHECK_THROWS_AS(a.phase(1'000'003), std::out_of_range);
}

TEST_CASE("phase override pins one prime and leaves the rest") {
  PhaseAssignment a({5, 5}, kSmallTable);
  PhaseAssignment b = a.with_phase(2, 0.0);
  CHECK(b.phase(2) == 0.0);
  CHECK(b.phase(3) == a.phase(3));
  CHECK(a.phase(2) != 0.0);
}

TEST_CASE("theta_2 is uniform: chi-square over 32 bins at the 0.1% level") {
  const size_t n = 1'000'000;
  std::vector<uint64_t> counts(32, 0);
  PhaseAssignment base({2024, 0}, kSmallTable);
  for (size_t k = 0; k < n; ++k) {
    double th = base.with_seed({2024, k}).phase(2);
    auto bin = static_cast<size_t>(th / (2.0 * std::numbers::pi) * 32.0);
    ++counts[std::min<size_t>(bin, 31)];
  }
  CHECK(chi_square_uniform(counts) < oracles::kChi2Crit31At999);
}

TEST_CASE("mean of alpha(p) over seeds vanishes at the CLT scale") {
  const size_t n = 1'000'000;
  for (uint64_t p : {2ull, 101ull}) {
    std::vector<double> re(n), im(n);
    PhaseAssignment base({77, 0}, kSmallTable);
    for (size_t k = 0; k < n; ++k) {
      auto z = base.with_seed({77, k}).alpha(p);
      re[k] = z.real();
      im[k] = z.imag();
    }
    CHECK(std::abs(pairwise_sum(re) / n) < 4e-3);
    CHECK(std::abs(pairwise_sum(im) / n) < 4e-3);
  }
}

TEST_CASE("phases of distinct primes are empirically uncorrelated") {
  const size_t n = 100'000;
  std::vector<double> c2(n), c3(n);
  PhaseAssignment base({31337, 0}, kSmallTable);
  for (size_t k = 0; k < n; ++k) {
    PhaseAssignment a = base.with_seed({31337, k});
    c2[k] = std::cos(a.phase(2));
    c3[k] = std::cos(a.phase(3));
  }
  CHECK(std::abs(sample_correlation(c2, c3)) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("splittability: replica streams behave like fresh masters") {
  const size_t n = 100'000;
  std::vector<double> r1(n), r2(n);
  std::vector<uint64_t> counts(32, 0);
  PhaseAssignment base({555, 0}, kSmallTable);
  for (size_t k = 0; k < n; ++k) {
    r1[k] = std::cos(base.with_seed({555, 2 * k}).phase(2));
    r2[k] = std::cos(base.with_seed({555, 2 * k + 1}).phase(2));
    double th = base.with_seed({555, k}).phase(3);
    auto bin = static_cast<size_t>(th / (2.0 * std::numbers::pi) * 32.0);
    ++counts[std::min<size_t>(bin, 31)];
  }
  CHECK(std::abs(sample_correlation(r1, r2)) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(chi_square_uniform(counts) < oracles::kChi2Crit31At999);
}

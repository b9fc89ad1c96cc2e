#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "steinlab/counting.hpp"

using namespace steinlab;

namespace {
// Fixture constant: maximum of the short-interval ratio over the grid
// x in {1e4, 1e5}, H in {100, 316, 1000, 3162, 10000}, y in {10, 31, 100,
// 316, 1000}, measured by the brute-force sweep below before the build was
// frozen. The sweep is deterministic, so the re-run must reproduce it.
constexpr double kBrunEnvelope = 0.73403093;
}  // namespace

TEST_CASE("enumerated base cases") {
  CountTable t = count_smooth_rough(10, 2);
  CHECK(t.psi == 4);  // 1, 2, 4, 8
  CHECK(t.phi == 5);  // 1, 3, 5, 7, 9
  CountTable big_y = count_smooth_rough(1234, 5000);
  CHECK(big_y.psi == 1234);
  CHECK(big_y.phi == 1);
}

TEST_CASE("argument guards") {
  CHECK_THROWS_AS(count_smooth_rough(0, 10), std::domain_error);
  CHECK_THROWS_AS(count_smooth_rough(10, 1), std::domain_error);
  CHECK_THROWS_AS(count_smooth_rough(2'000'000'000ull, 10), resource_error);
  CHECK_THROWS_AS(rankin_certificate(100, 10, 0.0), std::domain_error);
  CHECK_THROWS_AS(rankin_certificate(100, 10, -0.5), std::domain_error);
  CHECK_THROWS_AS(brun_ratio(10, 1, 10), std::domain_error);
}

TEST_CASE("sieve counts agree exactly with the recursion oracle") {
  oracles::BuchstabPsi psi;
  CHECK(count_smooth_rough(100, 5).psi == psi(100, 5));
  std::mt19937_64 gen(41);
  std::uniform_int_distribution<uint64_t> px(10, 1'000'000);
  std::uniform_int_distribution<uint64_t> py(2, 500);
  for (int i = 0; i < 25; ++i) {
    uint64_t x = px(gen), y = py(gen);
    CHECK(count_smooth_rough(x, y).psi == psi(x, y));
  }
}

TEST_CASE("rough counts agree exactly with inclusion-exclusion") {
  std::mt19937_64 gen(43);
  std::uniform_int_distribution<uint64_t> px(10, 10'000);
  for (uint64_t y : {2ull, 3ull, 7ull, 13ull}) {
    for (int i = 0; i < 10; ++i) {
      uint64_t x = px(gen);
      CHECK(count_smooth_rough(x, y).phi == oracles::legendre_phi(x, y));
    }
  }
}

TEST_CASE("smooth and rough counts overlap only at 1") {
  std::mt19937_64 gen(47);
  std::uniform_int_distribution<uint64_t> px(2, 5000);
  std::uniform_int_distribution<uint64_t> py(2, 100);
  for (int i = 0; i < 50; ++i) {
    uint64_t x = px(gen), y = py(gen);
    CountTable t = count_smooth_rough(x, y);
    CHECK(t.psi + t.phi <= x + 1);
    // equality iff nothing <= x mixes a factor <= y with one > y
    uint64_t p_next = y + 1;
    while (oracles::trial_division(p_next).size() != 1 ||
           oracles::trial_division(p_next)[0].second != 1)
      ++p_next;
    CHECK((t.psi + t.phi == x + 1) == (x < 2 * p_next));
  }
}

TEST_CASE("monotonicity of the counting functions") {
  for (uint64_t y : {5ull, 20ull, 97ull}) {
    uint64_t prev_psi = 0, prev_phi = 0;
    for (uint64_t x : {10ull, 100ull, 1000ull, 10000ull}) {
      CountTable t = count_smooth_rough(x, y);
      CHECK(t.psi >= prev_psi);
      CHECK(t.phi >= prev_phi);
      prev_psi = t.psi;
      prev_phi = t.phi;
    }
  }
  for (uint64_t x : {500ull, 5000ull}) {
    uint64_t prev_psi = 0;
    uint64_t prev_phi = UINT64_MAX;
    for (uint64_t y : {2ull, 5ull, 17ull, 101ull, 997ull}) {
      CountTable t = count_smooth_rough(x, y);
      CHECK(t.psi >= prev_psi);
      CHECK(t.phi <= prev_phi);
      prev_psi = t.psi;
      prev_phi = t.phi;
    }
  }
}

TEST_CASE("count certificate slack is nonnegative on the full grid") {
  RankinCertificate c = rankin_certificate(1'000'000, 100, 1.0 - 1.0 / std::log(100.0));
  CHECK(c.slack >= 0.0);

  // x = y with alpha = 1: everything <= x is x-smooth and the bound still caps it
  RankinCertificate diag = rankin_certificate(1000, 1000, 1.0);
  CHECK(diag.psi == 1000);
  CHECK(diag.slack >= 0.0);

  for (uint64_t x : {1'000ull, 10'000ull, 100'000ull, 1'000'000ull, 10'000'000ull}) {
    for (uint64_t y : {10ull, 100ull, 1000ull}) {
      for (double alpha : {0.5, 0.8, 1.0 - 1.0 / std::log(static_cast<double>(y))}) {
        RankinCertificate cert = rankin_certificate(x, y, alpha);
        CHECK(cert.slack >= 0.0);
      }
    }
  }
}

TEST_CASE("short-interval rough ratio: parity case and boundary consistency") {
  BrunRatio parity = brun_ratio(0, 10'000, 2);
  CHECK(parity.window_count == 5000);
  CHECK(parity.ratio == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-3));

  for (uint64_t h : {10ull, 50ull}) {
    BrunRatio b = brun_ratio(0, h, 100);
    CHECK(b.window_count == count_rough(h, 100).phi);
  }
}

TEST_CASE("short-interval ratio stays below the measured envelope") {
  double best = 0.0;
  for (uint64_t x : {10'000ull, 100'000ull})
    for (uint64_t h : {100ull, 316ull, 1000ull, 3162ull, 10'000ull})
      for (uint64_t y : {10ull, 31ull, 100ull, 316ull, 1000ull})
        best = std::max(best, brun_ratio(x, h, y).ratio);
  CHECK(best <= kBrunEnvelope);
  CHECK(best >= 0.7);  // the envelope is tight, not vacuous
}

TEST_CASE("prime harmonic sum drifts from log log y by the Mertens constant") {
  for (uint64_t y : {1'000ull, 10'000ull, 100'000ull}) {
    double dev = mertens_prime_sum(y) - std::log(std::log(static_cast<double>(y))) -
                 kMertensConstant;
    CHECK(std::abs(dev) <= 0.05);
  }
}

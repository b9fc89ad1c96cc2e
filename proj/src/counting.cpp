#include "steinlab/counting.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "steinlab/primes.hpp"

namespace steinlab {

namespace {

constexpr uint64_t kMaxX = 1'000'000'000ull;  // counting-only cap
constexpr uint64_t kMaxY = 10'000'000ull;
constexpr uint64_t kSegment = 1ull << 22;

std::vector<uint64_t> primes_upto(uint64_t y) {
  std::vector<uint64_t> out;
  for_each_prime(y, [&](uint64_t p) { out.push_back(p); });
  return out;
}

// One sweep over [lo, hi]: divides every entry by its prime factors <= y.
// n is smooth iff the residual collapses to 1, rough iff nothing divided it.
void count_window(uint64_t lo, uint64_t hi, const std::vector<uint64_t>& primes,
                  uint64_t& psi, uint64_t& phi) {
  size_t len = static_cast<size_t>(hi - lo + 1);
  std::vector<uint64_t> residual(len);
  std::vector<uint8_t> touched(len, 0);
  for (size_t i = 0; i < len; ++i) residual[i] = lo + static_cast<uint64_t>(i);
  for (uint64_t p : primes) {
    uint64_t start = ((lo + p - 1) / p) * p;
    for (uint64_t n = start; n <= hi; n += p) {
      size_t i = static_cast<size_t>(n - lo);
      touched[i] = 1;
      while (residual[i] % p == 0) residual[i] /= p;
    }
  }
  for (size_t i = 0; i < len; ++i) {
    uint64_t n = lo + static_cast<uint64_t>(i);
    if (n == 0) continue;
    if (residual[i] == 1) ++psi;            // includes n = 1
    if (!touched[i]) ++phi;                 // includes n = 1
  }
}

}  // namespace

CountTable count_smooth_rough(uint64_t x, uint64_t y) {
  if (x < 1) throw std::domain_error("count_smooth_rough: x must be >= 1");
  if (y < 2) throw std::domain_error("count_smooth_rough: y must be >= 2");
  if (x > kMaxX) throw resource_error("count_smooth_rough: x above counting cap");
  CountTable out{x, y, 0, 0};
  if (y >= x) {
    out.psi = x;
    out.phi = 1;
    return out;
  }
  if (y > kMaxY) throw resource_error("count_smooth_rough: y above sieve cap");
  std::vector<uint64_t> primes = primes_upto(y);
  for (uint64_t lo = 1; lo <= x; lo += kSegment) {
    uint64_t hi = std::min(x, lo + kSegment - 1);
    count_window(lo, hi, primes, out.psi, out.phi);
  }
  return out;
}

RankinCertificate rankin_certificate(uint64_t x, uint64_t y, double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::domain_error("rankin_certificate: alpha must lie in (0, 1]");
  CountTable counts = count_smooth_rough(x, y);
  double log_bound = alpha * std::log(static_cast<double>(x));
  for_each_prime(std::min(y, x), [&](uint64_t p) {
    log_bound -= std::log1p(-std::pow(static_cast<double>(p), -alpha));
  });
  RankinCertificate cert;
  cert.x = x;
  cert.y = y;
  cert.alpha = alpha;
  cert.bound = std::exp(log_bound);
  cert.psi = counts.psi;
  cert.slack = cert.bound - static_cast<double>(counts.psi);
  return cert;
}

BrunRatio brun_ratio(uint64_t x, uint64_t h, uint64_t y) {
  if (h < 2 || y < 2) throw std::domain_error("brun_ratio: H and y must be >= 2");
  if (x + h > kMaxX) throw resource_error("brun_ratio: window above counting cap");
  if (y > kMaxY) throw resource_error("brun_ratio: y above sieve cap");
  uint64_t lo = x + 1, hi = x + h;
  std::vector<uint64_t> primes = primes_upto(std::min(y, hi));
  size_t len = static_cast<size_t>(hi - lo + 1);
  std::vector<uint8_t> touched(len, 0);
  for (uint64_t p : primes) {
    uint64_t start = ((lo + p - 1) / p) * p;
    for (uint64_t n = start; n <= hi; n += p) touched[n - lo] = 1;
  }
  BrunRatio out;
  out.x = x;
  out.h = h;
  out.y = y;
  for (size_t i = 0; i < len; ++i)
    if (!touched[i]) ++out.window_count;  // counts 1 as rough when x = 0
  double scale = std::min(std::log(static_cast<double>(y)), std::log(static_cast<double>(h)));
  out.ratio = static_cast<double>(out.window_count) * scale / static_cast<double>(h);
  return out;
}

double mertens_prime_sum(uint64_t y) {
  double acc = 0.0;
  for_each_prime(y, [&](uint64_t p) { acc += 1.0 / static_cast<double>(p); });
  return acc;
}

}  // namespace steinlab

#include "steinlab/multiplicative.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "steinlab/parallel.hpp"
#include "steinlab/stats.hpp"

namespace steinlab {

namespace {

// Exponent vector of alpha(n) conj(alpha(m)) over the union of prime factors.
struct PhaseCombination {
  std::vector<uint64_t> prime_index;  // 1-based positions
  std::vector<int64_t> exponent;
  bool trivial = true;  // all exponents zero, i.e. the product is 1 a.s.
};

PhaseCombination combine_factorizations(const PrimeTable& primes, uint64_t n, uint64_t m) {
  std::vector<std::pair<uint64_t, uint32_t>> fn, fm;
  primes.factorize(n, fn);
  primes.factorize(m, fm);
  PhaseCombination out;
  size_t i = 0, j = 0;
  auto push = [&](uint64_t p, int64_t e) {
    if (e == 0) return;
    out.prime_index.push_back(primes.index_of(p));
    out.exponent.push_back(e);
    out.trivial = false;
  };
  while (i < fn.size() || j < fm.size()) {
    if (j == fm.size() || (i < fn.size() && fn[i].first < fm[j].first)) {
      push(fn[i].first, static_cast<int64_t>(fn[i].second));
      ++i;
    } else if (i == fn.size() || fm[j].first < fn[i].first) {
      push(fm[j].first, -static_cast<int64_t>(fm[j].second));
      ++j;
    } else {
      push(fn[i].first, static_cast<int64_t>(fn[i].second) - static_cast<int64_t>(fm[j].second));
      ++i;
      ++j;
    }
  }
  return out;
}

OrthogonalityEstimate reduce_complex(const std::vector<std::complex<double>>& values) {
  ComplexMeanEstimate m = mean_estimate(values);
  return {m.mean, m.se_re, m.se_im, m.n};
}

}  // namespace

MultiplicativeTable::MultiplicativeTable(const PhaseAssignment& phases, uint64_t n_max,
                                         uint64_t memory_cap_bytes)
    : n_max_(n_max), phases_(phases) {
  if (n_max == 0) throw std::domain_error("MultiplicativeTable: N must be >= 1");
  if (phases.primes().limit() < n_max)
    throw std::out_of_range("MultiplicativeTable: prime table smaller than N");
  uint64_t estimate = (n_max + 1) * sizeof(std::complex<double>) +
                      (n_max / kBlock + 2) * sizeof(std::complex<double>);
  if (estimate > memory_cap_bytes)
    throw resource_error("MultiplicativeTable: memory estimate exceeds cap");

  alpha_.assign(n_max_ + 1, {0.0, 0.0});
  alpha_[1] = {1.0, 0.0};
  const PrimeTable& pt = phases_.primes();
  for (uint32_t p : pt.primes()) {
    if (p > n_max_) break;
    alpha_[p] = phases_.alpha(p);
  }
  for (uint64_t n = 2; n <= n_max_; ++n) {
    uint64_t p = pt.spf(n);
    if (p != n) alpha_[n] = alpha_[n / p] * alpha_[p];
  }

  size_t blocks = static_cast<size_t>(n_max_ / kBlock) + 1;
  block_prefix_.assign(blocks + 1, {0.0, 0.0});
  std::complex<double> running{0.0, 0.0};
  for (size_t b = 0; b < blocks; ++b) {
    block_prefix_[b] = running;
    uint64_t lo = b * kBlock + (b == 0 ? 1 : 0);
    uint64_t hi = std::min(n_max_ + 1, (b + 1) * kBlock);
    if (lo < hi)
      running += pairwise_sum(std::span<const std::complex<double>>(alpha_.data() + lo, hi - lo));
  }
  block_prefix_[blocks] = running;
}

std::complex<double> MultiplicativeTable::sum_upto(uint64_t n) const {
  if (n > n_max_) throw std::out_of_range("MultiplicativeTable::sum_upto: n > N");
  if (n == 0) return {0.0, 0.0};
  uint64_t b = n / kBlock;
  uint64_t lo = b * kBlock + (b == 0 ? 1 : 0);
  std::complex<double> tail{0.0, 0.0};
  if (lo <= n)
    tail = pairwise_sum(std::span<const std::complex<double>>(alpha_.data() + lo, n - lo + 1));
  return block_prefix_[b] + tail;
}

SmoothMask::SmoothMask(const MultiplicativeTable& table, double y)
    : y_(y), n_max_(table.size()), smooth_count_(0) {
  if (y < 2.0) throw std::domain_error("SmoothMask: y must be >= 2");
  bits_.assign(n_max_ / 64 + 1, 0);
  const PrimeTable& pt = table.primes();
  std::vector<uint8_t> smooth(n_max_ + 1, 0);
  smooth[1] = 1;
  for (uint64_t n = 2; n <= n_max_; ++n) {
    uint64_t p = pt.spf(n);
    smooth[n] = (static_cast<double>(p) <= y) && smooth[n / p];
  }
  for (uint64_t n = 1; n <= n_max_; ++n) {
    if (smooth[n]) {
      bits_[n >> 6] |= (1ull << (n & 63));
      ++smooth_count_;
    }
  }

  size_t blocks = static_cast<size_t>(n_max_ / MultiplicativeTable::kBlock) + 1;
  block_prefix_.assign(blocks + 1, {0.0, 0.0});
  std::complex<double> running{0.0, 0.0};
  std::vector<std::complex<double>> buf;
  buf.reserve(MultiplicativeTable::kBlock);
  for (size_t b = 0; b < blocks; ++b) {
    block_prefix_[b] = running;
    uint64_t lo = b * MultiplicativeTable::kBlock + (b == 0 ? 1 : 0);
    uint64_t hi = std::min(n_max_ + 1, (b + 1) * MultiplicativeTable::kBlock);
    buf.clear();
    for (uint64_t n = lo; n < hi; ++n)
      if (smooth[n]) buf.push_back(table.alpha(n));
    running += pairwise_sum(std::span<const std::complex<double>>(buf));
  }
  block_prefix_[blocks] = running;
}

std::complex<double> SmoothMask::sum_upto(const MultiplicativeTable& table, uint64_t n) const {
  if (table.size() != n_max_) throw std::invalid_argument("SmoothMask: mask built for another table");
  if (n > n_max_) throw std::out_of_range("SmoothMask::sum_upto: n > N");
  if (n == 0) return {0.0, 0.0};
  uint64_t b = n / MultiplicativeTable::kBlock;
  uint64_t lo = b * MultiplicativeTable::kBlock + (b == 0 ? 1 : 0);
  std::complex<double> tail{0.0, 0.0};
  std::vector<std::complex<double>> buf;
  for (uint64_t k = lo; k <= n; ++k)
    if (is_smooth(k)) buf.push_back(table.alpha(k));
  if (!buf.empty()) tail = pairwise_sum(std::span<const std::complex<double>>(buf));
  return block_prefix_[b] + tail;
}

namespace {

void check_x(const MultiplicativeTable& table, double x) {
  if (!(x >= 1.0)) throw std::domain_error("partial_sum: x must be >= 1");
  if (x > static_cast<double>(table.size()))
    throw std::out_of_range("partial_sum: x exceeds table size");
}

}  // namespace

SumRecord partial_sum(const MultiplicativeTable& table, double x) {
  check_x(table, x);
  auto n = static_cast<uint64_t>(std::floor(x));
  double norm = 1.0 / std::sqrt(x);
  return {x, std::nullopt, table.sum_upto(n) * norm, norm};
}

SumRecord partial_sum(const MultiplicativeTable& table, double x, const SmoothMask& mask) {
  check_x(table, x);
  auto n = static_cast<uint64_t>(std::floor(x));
  double norm = 1.0 / std::sqrt(x);
  return {x, mask.y(), mask.sum_upto(table, n) * norm, norm};
}

OrthogonalityEstimate check_orthogonality(Seed seed,
                                          const std::shared_ptr<const PrimeTable>& primes,
                                          uint64_t n, uint64_t m, size_t replicas,
                                          unsigned workers) {
  if (n < 1 || m < 1) throw std::domain_error("check_orthogonality: n, m must be >= 1");
  PhaseCombination comb = combine_factorizations(*primes, n, m);
  if (comb.trivial) return {{1.0, 0.0}, 0.0, 0.0, replicas};

  PhaseAssignment base(seed, primes);
  auto values = replica_map<std::complex<double>>(replicas, workers, [&](size_t k) {
    PhaseAssignment a = base.with_seed(replica_seed(seed, k));
    double angle = 0.0;
    for (size_t i = 0; i < comb.prime_index.size(); ++i)
      angle += static_cast<double>(comb.exponent[i]) * a.phase_at_index(comb.prime_index[i]);
    return std::polar(1.0, angle);
  });
  return reduce_complex(values);
}

OrthogonalityEstimate check_conditional_orthogonality(
    Seed smooth_seed, const std::shared_ptr<const PrimeTable>& primes, uint64_t n,
    uint64_t m, double y, size_t rough_replicas, unsigned workers) {
  if (n < 1 || m < 1) throw std::domain_error("check_conditional_orthogonality: n, m >= 1");
  std::vector<std::pair<uint64_t, uint32_t>> f;
  for (uint64_t v : {n, m}) {
    primes->factorize(v, f);
    for (auto& [p, e] : f)
      if (static_cast<double>(p) <= y)
        throw std::domain_error("check_conditional_orthogonality: argument is not y-rough");
  }
  PhaseCombination comb = combine_factorizations(*primes, n, m);
  if (comb.trivial) return {{1.0, 0.0}, 0.0, 0.0, rough_replicas};

  // All primes involved are rough, so conditioning on the smooth phases only
  // fixes which streams are *not* resampled; the observable itself depends on
  // the rough streams alone.
  Seed rough_base{smooth_seed.master, smooth_seed.replica + 1};
  PhaseAssignment base(smooth_seed, primes);
  auto values = replica_map<std::complex<double>>(rough_replicas, workers, [&](size_t k) {
    PhaseAssignment a = base.with_seed(replica_seed(rough_base, k));
    double angle = 0.0;
    for (size_t i = 0; i < comb.prime_index.size(); ++i)
      angle += static_cast<double>(comb.exponent[i]) * a.phase_at_index(comb.prime_index[i]);
    return std::polar(1.0, angle);
  });
  return reduce_complex(values);
}

double check_splitting_identity(const MultiplicativeTable& table, const SmoothMask& mask,
                                double x) {
  check_x(table, x);
  double y = mask.y();
  auto xi = static_cast<uint64_t>(std::floor(x));
  const PrimeTable& pt = table.primes();

  std::vector<std::complex<double>> terms;
  for (uint64_t m = 1; m <= xi; ++m) {
    bool rough = (m == 1) || (static_cast<double>(pt.spf(m)) > y);
    if (!rough) continue;
    SumRecord s = partial_sum(table, x / static_cast<double>(m), mask);
    terms.push_back(table.alpha(m) / std::sqrt(static_cast<double>(m)) * s.value);
  }
  std::complex<double> rhs = pairwise_sum(std::span<const std::complex<double>>(terms));
  std::complex<double> lhs = partial_sum(table, x).value;
  return std::abs(lhs - rhs);
}

ConditionalSecondMoment check_conditional_second_moment(
    Seed smooth_seed, const std::shared_ptr<const PrimeTable>& primes, double x, double y,
    size_t rough_replicas, unsigned workers) {
  PhaseAssignment smooth(smooth_seed, primes);
  auto xi = static_cast<uint64_t>(std::floor(x));
  MultiplicativeTable table(smooth, xi);
  SmoothMask mask(table, y);
  const PrimeTable& pt = *primes;

  // Rough integers m <= x ascending (1 counts as rough). Every rough m > 1
  // exceeds y, so the deterministic side is Sum_m |d_m|^2 with
  // d_m = S_{x/m,y} / sqrt(m).
  std::vector<uint64_t> rough;
  std::vector<uint32_t> pos(xi + 1, 0);
  for (uint64_t m = 1; m <= xi; ++m) {
    if (m == 1 || static_cast<double>(pt.spf(m)) > y) {
      pos[m] = static_cast<uint32_t>(rough.size());
      rough.push_back(m);
    }
  }
  std::vector<std::complex<double>> d(rough.size());
  std::vector<double> d_sq(rough.size());
  for (size_t i = 0; i < rough.size(); ++i) {
    double m = static_cast<double>(rough[i]);
    d[i] = partial_sum(table, x / m, mask).value / std::sqrt(m);
    d_sq[i] = std::norm(d[i]);
  }
  double rhs = pairwise_sum(std::span<const double>(d_sq));

  Seed rough_base{smooth_seed.master, smooth_seed.replica + 1};
  auto values = replica_map<double>(rough_replicas, workers, [&](size_t k) {
    PhaseAssignment a = smooth.with_seed(replica_seed(rough_base, k));
    std::complex<double> acc{0.0, 0.0};
    std::vector<std::complex<double>> alpha_rough(rough.size());
    for (size_t i = 0; i < rough.size(); ++i) {
      uint64_t m = rough[i];
      std::complex<double> am;
      if (m == 1) {
        am = {1.0, 0.0};
      } else {
        uint64_t p = pt.spf(m);
        am = (p == m) ? a.alpha(p) : alpha_rough[pos[m / p]] * alpha_rough[pos[p]];
      }
      alpha_rough[i] = am;
      acc += am * d[i];
    }
    return std::norm(acc);
  });
  MeanEstimate lhs = mean_estimate(values);

  ConditionalSecondMoment out;
  out.lhs_estimate = lhs.mean;
  out.lhs_se = lhs.se;
  out.rhs_exact = rhs;
  out.relative_error = std::abs(lhs.mean - rhs) / rhs;
  out.replicas = rough_replicas;
  return out;
}

}  // namespace steinlab

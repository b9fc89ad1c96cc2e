#include "steinlab/euler_field.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "steinlab/parallel.hpp"
#include "steinlab/stats.hpp"

namespace steinlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCubicCut = 1e-18;
constexpr size_t kReanchor = 4096;  // rotation recurrences re-anchor to keep drift in check

void check_field_args(const PhaseAssignment& phases, double y, double sigma) {
  if (!(sigma >= 0.5))
    throw std::domain_error("evaluate_field: sigma must be >= 1/2 for the log expansion");
  if (!(y >= 2.0)) throw std::domain_error("evaluate_field: y must be >= 2");
  if (y > static_cast<double>(phases.primes().limit()))
    throw std::out_of_range("evaluate_field: y beyond prime table");
}

// Evaluates 1/A (the product of the Euler factors) on a uniform grid; the
// caller inverts. Optionally accumulates the log-term prime sums.
struct FieldAccumulator {
  std::vector<std::complex<double>> denom;
  std::vector<std::complex<double>> linear, quadratic, cubic;
  bool with_terms = false;

  void init(size_t n, bool terms) {
    with_terms = terms;
    denom.assign(n, {1.0, 0.0});
    if (terms) {
      linear.assign(n, {0.0, 0.0});
      quadratic.assign(n, {0.0, 0.0});
      cubic.assign(n, {0.0, 0.0});
    }
  }

  void add_prime(uint64_t p, std::complex<double> alpha_p, double sigma, double t0, double h) {
    double logp = std::log(static_cast<double>(p));
    double amp = std::pow(static_cast<double>(p), -sigma);
    std::complex<double> w = std::polar(1.0, -h * logp);
    std::complex<double> z{};
    size_t n = denom.size();
    int cubic_terms = 0;
    if (with_terms) {
      double a = amp * amp * amp;
      while (a >= kCubicCut && cubic_terms < 256) {
        ++cubic_terms;
        a *= amp;
      }
    }
    for (size_t j = 0; j < n; ++j) {
      if (j % kReanchor == 0)
        z = alpha_p * std::polar(amp, -(t0 + h * static_cast<double>(j)) * logp);
      denom[j] *= (1.0 - z);
      if (with_terms) {
        linear[j] += z;
        std::complex<double> z2 = z * z;
        quadratic[j] += z2;
        std::complex<double> zk = z2 * z;
        for (int k = 0; k < cubic_terms; ++k) {
          cubic[j] += zk / static_cast<double>(k + 3);
          zk *= z;
        }
      }
      z *= w;
    }
  }
};

EulerFieldSample run_field(const PhaseAssignment& phases, double y, double sigma,
                           std::vector<double> grid_points, double t0, double h,
                           bool uniform) {
  check_field_args(phases, y, sigma);
  EulerFieldSample out;
  out.y = y;
  out.sigma = sigma;
  out.grid = std::move(grid_points);
  size_t n = out.grid.size();
  FieldAccumulator acc;
  acc.init(n, true);
  const auto& primes = phases.primes().primes();
  size_t np = phases.primes().count_upto(y);
  for (size_t i = 0; i < np; ++i) {
    uint64_t p = primes[i];
    std::complex<double> ap = phases.alpha(p);
    if (uniform) {
      acc.add_prime(p, ap, sigma, t0, h);
    } else {
      // general grid: direct evaluation per point
      double logp = std::log(static_cast<double>(p));
      double amp = std::pow(static_cast<double>(p), -sigma);
      for (size_t j = 0; j < n; ++j) {
        std::complex<double> z = ap * std::polar(amp, -out.grid[j] * logp);
        acc.denom[j] *= (1.0 - z);
        acc.linear[j] += z;
        std::complex<double> z2 = z * z;
        acc.quadratic[j] += z2;
        double a = amp * amp * amp;
        std::complex<double> zk = z2 * z;
        for (int k = 3; a >= kCubicCut && k < 260; ++k) {
          acc.cubic[j] += zk / static_cast<double>(k);
          zk *= z;
          a *= amp;
        }
      }
    }
  }
  out.product.resize(n);
  for (size_t j = 0; j < n; ++j) out.product[j] = 1.0 / acc.denom[j];
  out.linear = std::move(acc.linear);
  out.quadratic = std::move(acc.quadratic);
  out.cubic_tail = std::move(acc.cubic);
  return out;
}

}  // namespace

EulerFieldSample evaluate_field(const PhaseAssignment& phases, double y, double sigma,
                                std::span<const double> grid) {
  return run_field(phases, y, sigma, {grid.begin(), grid.end()}, 0.0, 0.0, false);
}

EulerFieldSample evaluate_field(const PhaseAssignment& phases, double y, double sigma,
                                const UniformGrid& grid) {
  std::vector<double> pts(grid.count);
  for (size_t i = 0; i < grid.count; ++i) pts[i] = grid.at(i);
  return run_field(phases, y, sigma, std::move(pts), grid.t0, grid.h, true);
}

double cubic_tail_bound() {
  static std::once_flag flag;
  static double value = 0.0;
  std::call_once(flag, [] {
    const double cut = 1e7;
    double acc = 0.0;
    for_each_prime(static_cast<uint64_t>(cut), [&](uint64_t p) {
      double rs = 1.0 / std::sqrt(static_cast<double>(p));
      acc += rs * rs * rs / (1.0 - rs);
    });
    // Sum_{n>P} n^{-3/2} <= 2/sqrt(P); the geometric factor is <= 1/(1-P^{-1/2}).
    double tail = 2.0 / ((1.0 - 1.0 / std::sqrt(cut)) * std::sqrt(cut));
    value = acc + tail;
  });
  return value;
}

double prime_power_sum(double e, double y) {
  double acc = 0.0;
  for_each_prime(static_cast<uint64_t>(std::floor(y)),
                 [&](uint64_t p) { acc += std::pow(static_cast<double>(p), -e); });
  return acc;
}

double log_sq_prime_sum() {
  static std::once_flag flag;
  static double value = 0.0;
  std::call_once(flag, [] {
    const double cut = 1e7;
    double acc = 0.0;
    for_each_prime(static_cast<uint64_t>(cut), [&](uint64_t p) {
      double lp = std::log(static_cast<double>(p));
      acc += lp * lp / (static_cast<double>(p) * static_cast<double>(p));
    });
    // Int_P^inf x^-2 log x dx = (log P + 1)/P dominates the prime tail.
    value = acc + (std::log(cut) + 1.0) / cut;
  });
  return value;
}

namespace {

// Composite Simpson of |W(t)|^2 / (1/4 + t^2) over [a, b], where W is a sum
// of rotating terms supplied by eval_grid(a, h, n) -> vector<complex>.
template <typename EvalGrid>
void simpson_shell(EvalGrid&& eval_grid, double a, double b, double h, double& integral,
                   double& sum_sq, size_t& count) {
  size_t steps = std::max<size_t>(2, static_cast<size_t>(std::ceil((b - a) / h)));
  if (steps % 2 == 1) ++steps;
  double he = (b - a) / static_cast<double>(steps);
  std::vector<std::complex<double>> w = eval_grid(a, he, steps + 1);
  std::vector<double> weighted(steps + 1);
  for (size_t j = 0; j <= steps; ++j) {
    double t = a + he * static_cast<double>(j);
    double f = std::norm(w[j]) / (0.25 + t * t);
    double simpson_w = (j == 0 || j == steps) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    weighted[j] = f * simpson_w;
    sum_sq += std::norm(w[j]);
  }
  count += steps + 1;
  integral += pairwise_sum(std::span<const double>(weighted)) * he / 3.0;
}

// Shared shell-doubling driver: integrates |W|^2/|1/2+it|^2 over [-T, T],
// doubling T until the analytic tail completion (local mean of |W|^2 times
// the exact envelope tail) is below eps * total, or the budget is hit.
template <typename EvalGrid>
void shell_quadrature(EvalGrid&& eval_grid, double t_initial, double h, double eps,
                      double t_budget, double& value, double& t_max, double& tail,
                      bool& tail_ok) {
  double integral = 0.0, sum_sq = 0.0;
  size_t count = 0;
  double t = t_initial;
  simpson_shell(eval_grid, -t, t, h, integral, sum_sq, count);
  for (;;) {
    double mean_sq = sum_sq / static_cast<double>(count);
    tail = mean_sq * 2.0 * (std::numbers::pi - 2.0 * std::atan(2.0 * t));
    tail_ok = tail <= eps * (integral + tail);
    if (tail_ok || 2.0 * t > t_budget) break;
    double sq = 0.0;
    size_t c = 0;
    simpson_shell(eval_grid, t, 2.0 * t, h, integral, sq, c);
    simpson_shell(eval_grid, -2.0 * t, -t, h, integral, sq, c);
    sum_sq = sq;  // tail mean tracks the outermost shells only
    count = c;
    t *= 2.0;
  }
  value = integral + tail;
  t_max = t;
}

}  // namespace

IntegralFunctional integral_functional(const PhaseAssignment& phases, double y,
                                       const IntegralOptions& opts) {
  check_field_args(phases, y, 0.5);
  if (!(opts.t_initial >= 1.0)) throw std::domain_error("integral_functional: t_initial >= 1");
  double logy = std::log(y);
  double h = opts.h > 0.0 ? opts.h : std::numbers::pi / (8.0 * logy);
  if (opts.h > 0.0 && opts.h > std::numbers::pi / (8.0 * logy) + 1e-12)
    throw std::domain_error("integral_functional: h too coarse for the oscillation scale");

  const auto& primes = phases.primes().primes();
  size_t np = phases.primes().count_upto(y);
  std::vector<std::complex<double>> alphas(np);
  for (size_t i = 0; i < np; ++i) alphas[i] = phases.alpha(primes[i]);

  auto eval_grid = [&](double a, double he, size_t n) {
    FieldAccumulator acc;
    acc.init(n, false);
    for (size_t i = 0; i < np; ++i) acc.add_prime(primes[i], alphas[i], 0.5, a, he);
    std::vector<std::complex<double>> out(n);
    for (size_t j = 0; j < n; ++j) out[j] = 1.0 / acc.denom[j];
    return out;
  };

  IntegralFunctional out;
  out.y = y;
  out.h = h;
  double value_raw = 0.0, tail_raw = 0.0;
  shell_quadrature(eval_grid, opts.t_initial, h, opts.eps, opts.t_budget, value_raw,
                   out.t_max, tail_raw, out.tail_ok);
  out.value = value_raw / logy;
  out.tail_estimate = tail_raw / logy;
  return out;
}

ParsevalCheck parseval_check(const PhaseAssignment& phases, double y, uint64_t n_trunc,
                             double t_max, double h, double eps) {
  if (n_trunc < 1) throw std::domain_error("parseval_check: n_trunc must be >= 1");
  MultiplicativeTable table(phases, n_trunc);
  SmoothMask mask(table, std::max(y, 2.0));

  // Exact left side: the prefix of f is constant between integers, so the
  // integral is a weighted sum of |prefix|^2 over unit steps plus the exact
  // tail |prefix(n_trunc)|^2 / n_trunc.
  std::vector<double> terms;
  std::complex<double> prefix{0.0, 0.0};
  for (uint64_t r = 1; r <= n_trunc; ++r) {
    if (mask.is_smooth(r)) prefix += table.alpha(r);
    double w = (r < n_trunc)
                   ? (1.0 / static_cast<double>(r) - 1.0 / static_cast<double>(r + 1))
                   : 1.0 / static_cast<double>(r);
    terms.push_back(std::norm(prefix) * w);
  }
  double lhs = kTwoPi * pairwise_sum(std::span<const double>(terms));

  // Truncated Dirichlet polynomial F(1/2 + it).
  std::vector<double> freq, coef_amp;
  std::vector<std::complex<double>> coef;
  for (uint64_t n = 1; n <= n_trunc; ++n) {
    if (!mask.is_smooth(n)) continue;
    coef.push_back(table.alpha(n) / std::sqrt(static_cast<double>(n)));
    freq.push_back(std::log(static_cast<double>(n)));
  }
  double max_freq = freq.empty() ? 1.0 : freq.back();
  double hq = h > 0.0 ? h : std::numbers::pi / (16.0 * std::max(1.0, max_freq));

  auto eval_grid = [&](double a, double he, size_t n) {
    std::vector<std::complex<double>> out(n, {0.0, 0.0});
    for (size_t i = 0; i < coef.size(); ++i) {
      std::complex<double> w = std::polar(1.0, -he * freq[i]);
      std::complex<double> z{};
      for (size_t j = 0; j < n; ++j) {
        if (j % kReanchor == 0)
          z = coef[i] * std::polar(1.0, -(a + he * static_cast<double>(j)) * freq[i]);
        out[j] += z;
        z *= w;
      }
    }
    return out;
  };

  ParsevalCheck out;
  out.h = hq;
  double rhs = 0.0, tail = 0.0;
  shell_quadrature(eval_grid, std::min(16.0, t_max), hq, eps, t_max, rhs, out.t_max, tail,
                   out.tail_ok);
  out.lhs = lhs;
  out.rhs = rhs;
  out.tail_estimate = tail;
  out.relative_error = std::abs(lhs - rhs) / std::abs(lhs);
  return out;
}

double quadratic_term_real(const PhaseAssignment& phases, double y, double sigma, double t) {
  check_field_args(phases, y, sigma);
  const auto& primes = phases.primes().primes();
  size_t np = phases.primes().count_upto(y);
  std::vector<double> terms(np);
  for (size_t i = 0; i < np; ++i) {
    double p = static_cast<double>(primes[i]);
    terms[i] = std::pow(p, -2.0 * sigma) * std::cos(2.0 * phases.phase(primes[i]) -
                                                    2.0 * t * std::log(p));
  }
  return pairwise_sum(std::span<const double>(terms));
}

MeanEstimate g2_exponential_moment(Seed seed, const std::shared_ptr<const PrimeTable>& primes,
                                   double lambda, double y, double sigma, int window,
                                   size_t replicas, unsigned workers, size_t subgrid) {
  if (std::abs(lambda) > 4.0)
    throw std::domain_error("g2_exponential_moment: lambda outside configured [-4, 4]");
  PhaseAssignment base(seed, primes);
  check_field_args(base, y, sigma);
  const auto& plist = primes->primes();
  size_t np = primes->count_upto(y);
  double t0 = static_cast<double>(window);
  double h = 1.0 / static_cast<double>(subgrid);

  auto values = replica_map<double>(replicas, workers, [&](size_t k) {
    PhaseAssignment a = base.with_seed(replica_seed(seed, k));
    std::vector<double> g(subgrid, 0.0);
    for (size_t i = 0; i < np; ++i) {
      double p = static_cast<double>(plist[i]);
      double logp = std::log(p);
      double amp = std::pow(p, -2.0 * sigma);
      std::complex<double> z = std::polar(amp, 2.0 * a.phase(plist[i]) - 2.0 * t0 * logp);
      std::complex<double> w = std::polar(1.0, -2.0 * h * logp);
      for (size_t j = 0; j < subgrid; ++j) {
        g[j] += z.real();
        z *= w;
      }
    }
    double extreme = lambda >= 0.0 ? *std::max_element(g.begin(), g.end())
                                   : *std::min_element(g.begin(), g.end());
    return std::exp(lambda * extreme);
  });
  return mean_estimate(values);
}

std::vector<TailPoint> g2_increment_tail(Seed seed,
                                         const std::shared_ptr<const PrimeTable>& primes,
                                         double y, double sigma, double s, double t,
                                         std::span<const double> u_grid, size_t replicas,
                                         unsigned workers) {
  if (s == t) throw std::domain_error("g2_increment_tail: s and t must differ");
  PhaseAssignment base(seed, primes);
  check_field_args(base, y, sigma);
  size_t np = primes->count_upto(y);
  const auto& plist = primes->primes();
  std::vector<double> amp(np), freq_s(np), freq_t(np);
  for (size_t i = 0; i < np; ++i) {
    double p = static_cast<double>(plist[i]);
    amp[i] = std::pow(p, -2.0 * sigma);
    freq_s[i] = 2.0 * s * std::log(p);
    freq_t[i] = 2.0 * t * std::log(p);
  }
  auto diffs = replica_map<double>(replicas, workers, [&](size_t k) {
    PhaseAssignment a = base.with_seed(replica_seed(seed, k));
    double acc = 0.0;
    for (size_t i = 0; i < np; ++i) {
      double two_theta = 2.0 * a.phase_at_index(i + 1);
      acc += amp[i] * (std::cos(two_theta - freq_s[i]) - std::cos(two_theta - freq_t[i]));
    }
    return std::abs(acc);
  });
  std::vector<TailPoint> out;
  double d2 = (s - t) * (s - t);
  for (double u : u_grid) {
    size_t hits = 0;
    for (double v : diffs)
      if (v >= u) ++hits;
    TailPoint pt;
    pt.u = u;
    pt.empirical = static_cast<double>(hits) / static_cast<double>(replicas);
    pt.se = std::sqrt(std::max(pt.empirical * (1.0 - pt.empirical),
                               1.0 / static_cast<double>(replicas)) /
                      static_cast<double>(replicas));
    pt.bound = 2.0 * std::exp(-u * u / (16.0 * d2));
    out.push_back(pt);
  }
  return out;
}

}  // namespace steinlab

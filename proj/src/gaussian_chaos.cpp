#include "steinlab/gaussian_chaos.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

#include "steinlab/errors.hpp"
#include "steinlab/parallel.hpp"

namespace steinlab {

namespace {

void check_grid_unit(std::span<const double> grid) {
  for (double t : grid)
    if (t < 0.0 || t > 1.0)
      throw std::domain_error("gaussian field: grid must lie in [0, 1]");
}

// G(t) accumulated per prime. Contribution of p with draws (g0, g1):
//   [g0 cos(t log p) + g1 sin(t log p)] / sqrt(2 p).
void accumulate_field(uint64_t key, const PrimeTable& primes, double y,
                      std::span<const double> grid, std::span<double> out) {
  const auto& plist = primes.primes();
  size_t np = primes.count_upto(y);
  std::fill(out.begin(), out.end(), 0.0);
  for (size_t i = 0; i < np; ++i) {
    double p = static_cast<double>(plist[i]);
    double logp = std::log(p);
    double scale = 1.0 / std::sqrt(2.0 * p);
    double g0, g1;
    rng::normal_pair(key, i + 1, g0, g1);
    for (size_t j = 0; j < grid.size(); ++j) {
      double a = grid[j] * logp;
      out[j] += scale * (g0 * std::cos(a) + g1 * std::sin(a));
    }
  }
}

// Same field on a uniform grid via per-prime rotation recurrences.
void accumulate_field_uniform(uint64_t key, const PrimeTable& primes, double y, double t0,
                              double h, std::span<double> out) {
  const auto& plist = primes.primes();
  size_t np = primes.count_upto(y);
  std::fill(out.begin(), out.end(), 0.0);
  for (size_t i = 0; i < np; ++i) {
    double p = static_cast<double>(plist[i]);
    double logp = std::log(p);
    double scale = 1.0 / std::sqrt(2.0 * p);
    double g0, g1;
    rng::normal_pair(key, i + 1, g0, g1);
    // g0 cos + g1 sin = Re((g0 - i g1) e^{i t log p})
    std::complex<double> z = std::complex<double>(g0 * scale, -g1 * scale) *
                             std::polar(1.0, t0 * logp);
    std::complex<double> w = std::polar(1.0, h * logp);
    for (size_t j = 0; j < out.size(); ++j) {
      out[j] += z.real();
      z *= w;
    }
  }
}

}  // namespace

GaussianFieldSample sample_gaussian_field(Seed seed, const PrimeTable& primes, double y,
                                          std::span<const double> grid) {
  if (!(y >= 2.0)) throw std::domain_error("sample_gaussian_field: y must be >= 2");
  if (y > static_cast<double>(primes.limit()))
    throw std::out_of_range("sample_gaussian_field: y beyond prime table");
  check_grid_unit(grid);
  GaussianFieldSample out;
  out.y = y;
  out.grid.assign(grid.begin(), grid.end());
  out.values.assign(grid.size(), 0.0);
  accumulate_field(rng::stream_key(seed), primes, y, grid, out.values);
  return out;
}

double gaussian_cov_exact(const PrimeTable& primes, double y, double lag) {
  const auto& plist = primes.primes();
  size_t np = primes.count_upto(y);
  std::vector<double> terms(np);
  for (size_t i = 0; i < np; ++i) {
    double p = static_cast<double>(plist[i]);
    terms[i] = std::cos(lag * std::log(p)) / p;
  }
  return 0.5 * pairwise_sum(std::span<const double>(terms));
}

CovarianceGap covariance_gap(const PrimeTable& primes, double y, std::span<const double> lags) {
  if (!(y >= 3.0)) throw std::domain_error("covariance_gap: y must be >= 3");
  CovarianceGap out;
  double logy = std::log(y);
  for (double lag : lags) {
    double target = std::abs(lag) > 0.0 ? std::min(1.0 / std::abs(lag), logy) : logy;
    double gap = std::abs(gaussian_cov_exact(primes, y, lag) - 0.5 * std::log(target));
    if (gap > out.sup_gap) {
      out.sup_gap = gap;
      out.arg_lag = lag;
    }
  }
  return out;
}

GMCMeasureEstimate gmc_moment(Seed seed, const PrimeTable& primes, double y, double q,
                              size_t replicas, size_t grid_resolution, size_t batches,
                              unsigned workers) {
  if (!(q >= 0.0) || q >= 1.0)
    throw std::domain_error("gmc_moment: q must lie in [0, 1)");
  if (!(y >= 3.0)) throw std::domain_error("gmc_moment: y must be >= 3");
  double logy = std::log(y);
  if (static_cast<double>(grid_resolution) < 4.0 * logy)
    throw std::domain_error("gmc_moment: grid resolution below 4 log y");

  double norm = std::sqrt(std::log(logy)) / logy;
  size_t fine = 2 * grid_resolution;
  double hf = 1.0 / static_cast<double>(fine);

  struct Pair {
    double fine_v, coarse_v;
  };
  auto values = replica_map<Pair>(replicas, workers, [&](size_t k) {
    uint64_t key = rng::stream_key(replica_seed(seed, k));
    std::vector<double> g(fine);
    accumulate_field_uniform(key, primes, y, 0.0, hf, g);
    double sf = 0.0, sc = 0.0;
    for (size_t j = 0; j < fine; ++j) {
      double e = std::exp(2.0 * g[j]);
      sf += e;
      if (j % 2 == 0) sc += e;
    }
    double mass_fine = norm * sf / static_cast<double>(fine);
    double mass_coarse = norm * sc / static_cast<double>(grid_resolution);
    return Pair{std::pow(mass_fine, q), std::pow(mass_coarse, q)};
  });

  std::vector<double> vf(replicas), vc(replicas);
  for (size_t i = 0; i < replicas; ++i) {
    vf[i] = values[i].fine_v;
    vc[i] = values[i].coarse_v;
  }
  BatchMedianEstimate ef = median_of_batch_means(vf, batches);
  BatchMedianEstimate ec = median_of_batch_means(vc, batches);

  GMCMeasureEstimate out;
  out.y = y;
  out.q = q;
  out.estimate = ef.estimate;
  out.ci_lo = ef.ci_lo;
  out.ci_hi = ef.ci_hi;
  out.replicas = replicas;
  out.batches = batches;
  out.resolution = grid_resolution;
  out.coarse_estimate = ec.estimate;
  out.resolution_stable =
      std::abs(ef.estimate - ec.estimate) <= 0.05 * std::max(ef.estimate, 1e-300);
  return out;
}

KahaneComparison kahane_compare(const Eigen::MatrixXd& kernel_y,
                                const Eigen::MatrixXd& kernel_z, double q, size_t replicas,
                                Seed seed, std::span<const double> weights, unsigned workers) {
  if (!(q > 0.0) || q >= 1.0) throw std::domain_error("kahane_compare: q must lie in (0, 1)");
  auto n = kernel_y.rows();
  if (kernel_y.cols() != n || kernel_z.rows() != n || kernel_z.cols() != n)
    throw std::invalid_argument("kahane_compare: kernels must be square and equal size");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (kernel_y(i, j) > kernel_z(i, j) + 1e-12)
        throw std::domain_error("kahane_compare: kernel domination violated");

  std::vector<double> w(weights.begin(), weights.end());
  if (w.empty()) w.assign(static_cast<size_t>(n), 1.0 / static_cast<double>(n));
  if (w.size() != static_cast<size_t>(n))
    throw std::invalid_argument("kahane_compare: weight count mismatch");

  auto factor = [&](const Eigen::MatrixXd& k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    if (es.info() != Eigen::Success)
      throw factorization_error("kahane_compare: eigendecomposition failed");
    double floor = -1e-10 * std::max(k.trace(), 1e-300);
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (ev(i) < floor) throw factorization_error("kahane_compare: kernel not PSD");
      ev(i) = std::max(ev(i), 0.0);
    }
    Eigen::MatrixXd l = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
    Eigen::VectorXd var = l.rowwise().squaredNorm();
    return std::make_pair(l, var);
  };
  auto [ly, var_y] = factor(kernel_y);
  auto [lz, var_z] = factor(kernel_z);

  struct Pair {
    double vy, vz;
  };
  auto values = replica_map<Pair>(replicas, workers, [&, ly = ly, lz = lz, var_y = var_y,
                                                      var_z = var_z](size_t k) {
    uint64_t key = rng::stream_key(replica_seed(seed, k));
    Eigen::VectorXd xi(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      double g0, g1;
      rng::normal_pair(key, static_cast<uint64_t>(j) + 1, g0, g1);
      xi(j) = g0;
    }
    Eigen::VectorXd fy = ly * xi, fz = lz * xi;  // common driving noise
    double my = 0.0, mz = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      my += w[static_cast<size_t>(j)] * std::exp(fy(j) - 0.5 * var_y(j));
      mz += w[static_cast<size_t>(j)] * std::exp(fz(j) - 0.5 * var_z(j));
    }
    return Pair{std::pow(my, q), std::pow(mz, q)};
  });

  std::vector<double> vy(replicas), vz(replicas), diff(replicas);
  for (size_t i = 0; i < replicas; ++i) {
    vy[i] = values[i].vy;
    vz[i] = values[i].vz;
    diff[i] = values[i].vy - values[i].vz;
  }
  MeanEstimate ey = mean_estimate(vy);
  MeanEstimate ez = mean_estimate(vz);
  MeanEstimate ed = mean_estimate(diff);

  KahaneComparison out;
  out.moment_lower_kernel = ey.mean;
  out.moment_upper_kernel = ez.mean;
  out.gap = ed.mean;
  out.gap_se = ed.se;
  out.replicas = replicas;
  return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> random_dominated_kernels(Seed seed, size_t n,
                                                                     size_t rank) {
  uint64_t key = rng::stream_key(seed);
  auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd b(ni, ni);
  uint64_t ctr = 1;
  auto next_normal = [&] {
    double g0, g1;
    rng::normal_pair(key, ctr++, g0, g1);
    return g0;
  };
  for (Eigen::Index i = 0; i < ni; ++i)
    for (Eigen::Index j = 0; j < ni; ++j) b(i, j) = next_normal();
  Eigen::MatrixXd ky = b * b.transpose() / static_cast<double>(n);
  Eigen::MatrixXd kz = ky;
  for (size_t r = 0; r < rank; ++r) {
    Eigen::VectorXd v(ni);
    for (Eigen::Index i = 0; i < ni; ++i) v(i) = std::abs(next_normal());
    kz += v * v.transpose() / static_cast<double>(rank);
  }
  return {ky, kz};
}

double hoeffding_exp_moment_bound(std::span<const double> c, double lambda) {
  double s = 0.0;
  for (double v : c) {
    if (v < 0.0) throw std::domain_error("hoeffding bounds: c_i must be >= 0");
    s += v * v;
  }
  return std::exp(0.5 * lambda * lambda * s);
}

double hoeffding_tail_bound(std::span<const double> c, double u) {
  double s = 0.0;
  for (double v : c) {
    if (v < 0.0) throw std::domain_error("hoeffding bounds: c_i must be >= 0");
    s += v * v;
  }
  if (u == 0.0) return 2.0;
  if (s == 0.0) return 0.0;
  return 2.0 * std::exp(-u * u / (2.0 * s));
}

double cover_number_bound(double interval_len, double r) {
  if (!(interval_len > 0.0) || !(r > 0.0))
    throw std::domain_error("cover_number_bound: need positive length and radius");
  return 1.0 + std::floor(2.0 * std::numbers::sqrt2 * interval_len / r);
}

namespace {

// The integrand sqrt(log(1 + floor(2 sqrt2 L / r))) is piecewise constant in
// r with breakpoints at 2 sqrt2 L / k, so the integral is an exact series:
//   2 sqrt2 L * Sum_{k>=1} (1/k - 1/(k+1)) sqrt(log(k+1)).
double dudley_series() {
  static std::once_flag flag;
  static double value = 0.0;
  std::call_once(flag, [] {
    const int64_t cut = 2'000'000;
    double acc = 0.0;
    for (int64_t k = cut; k >= 1; --k) {
      double kk = static_cast<double>(k);
      acc += (1.0 / kk - 1.0 / (kk + 1.0)) * std::sqrt(std::log(kk + 1.0));
    }
    // Remaining terms bracketed by integrals of sqrt(log x)/x^2; midpoint
    // correction leaves an error below 1e-11.
    double k1 = static_cast<double>(cut + 1);
    double tail = std::sqrt(std::log(k1 + 1.0)) / k1 +
                  1.0 / (2.0 * k1 * std::sqrt(std::log(k1 + 1.0)));
    value = acc + tail;
  });
  return value;
}

}  // namespace

double dudley_universal_constant() { return dudley_series(); }

double dudley_entropy_integral(double interval_len) {
  if (!(interval_len > 0.0))
    throw std::domain_error("dudley_entropy_integral: length must be positive");
  return 2.0 * std::numbers::sqrt2 * interval_len * dudley_series();
}

ChainingBudget chaining_budget(double interval_len) {
  ChainingBudget out;
  out.interval_len = interval_len;
  out.metric_scale = 2.0 * std::numbers::sqrt2;
  out.dudley_integral = dudley_entropy_integral(interval_len);
  return out;
}

}  // namespace steinlab

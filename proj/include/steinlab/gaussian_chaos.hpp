#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "steinlab/primes.hpp"
#include "steinlab/rng.hpp"
#include "steinlab/stats.hpp"

namespace steinlab {

// One realization of the Gaussian analogue of the log of the Euler product on
// the critical line:
//   G(t) = Re Sum_{p<=y} Z_p p^{-1/2-it},
// with Z_p independent standard complex Gaussians (E Z = 0, E Z^2 = 0,
// E |Z|^2 = 1). Sampled by summing per-prime contributions, so the cost is
// #primes * #grid and the covariance is exactly
//   E[G(s) G(t)] = (1/2) Sum_{p<=y} cos((s-t) log p) / p.
struct GaussianFieldSample {
  double y = 0.0;
  std::vector<double> grid;
  std::vector<double> values;
};

GaussianFieldSample sample_gaussian_field(Seed seed, const PrimeTable& primes, double y,
                                          std::span<const double> grid);

// Closed-form covariance kernel at lag s - t.
double gaussian_cov_exact(const PrimeTable& primes, double y, double lag);

// Deterministic sup over the given lags of
//   | exact_cov(lag) - (1/2) log( min(1/|lag|, log y) ) |.
struct CovarianceGap {
  double sup_gap = 0.0;
  double arg_lag = 0.0;
};

CovarianceGap covariance_gap(const PrimeTable& primes, double y, std::span<const double> lags);

// Fractional moment of the renormalized chaos mass
//   mass = (sqrt(log log y) / log y) Int_0^1 exp(2 G(t)) dt
// estimated by a Riemann sum on a uniform grid and aggregated as a median of
// batch means. The same replicas are re-summed at half the step to flag
// resolution-driven drift (common random numbers, so the comparison isolates
// discretization).
struct GMCMeasureEstimate {
  double y = 0.0;
  double q = 0.0;
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  size_t replicas = 0;
  size_t batches = 0;
  size_t resolution = 0;
  double coarse_estimate = 0.0;
  bool resolution_stable = false;
};

GMCMeasureEstimate gmc_moment(Seed seed, const PrimeTable& primes, double y, double q,
                              size_t replicas, size_t grid_resolution, size_t batches = 32,
                              unsigned workers = 0);

// Monte Carlo comparison of fractional chaos moments under two covariance
// kernels with kernel_y <= kernel_z pointwise: the dominated kernel must give
// the larger moment. Fields are sampled by eigenfactorization on the grid;
// weights default to the uniform spacing 1/n.
struct KahaneComparison {
  double moment_lower_kernel = 0.0;  // kernel_y, pointwise smaller
  double moment_upper_kernel = 0.0;  // kernel_z
  double gap = 0.0;                  // lower-kernel moment minus upper-kernel moment
  double gap_se = 0.0;               // paired standard error of the gap
  size_t replicas = 0;
  bool holds(double n_sigmas = 4.0) const { return gap >= -n_sigmas * gap_se; }
};

KahaneComparison kahane_compare(const Eigen::MatrixXd& kernel_y,
                                const Eigen::MatrixXd& kernel_z, double q, size_t replicas,
                                Seed seed, std::span<const double> weights = {},
                                unsigned workers = 0);

// Random pair (kernel_y, kernel_z) on an n-point grid with kernel_y PSD and
// kernel_z = kernel_y plus entrywise-nonnegative PSD bumps, so kernel_y is
// dominated pointwise and both sides factorize.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> random_dominated_kernels(Seed seed, size_t n,
                                                                     size_t rank = 3);

// Bounds for sums S = Sum X_i of independent zero-mean X_i with |X_i| <= c_i:
//   E[exp(lambda S)] <= exp(lambda^2/2 Sum c_i^2)
//   P(|S| >= u)      <= 2 exp(-u^2 / (2 Sum c_i^2)).
double hoeffding_exp_moment_bound(std::span<const double> c, double lambda);
double hoeffding_tail_bound(std::span<const double> c, double u);

// Covering-number bound and entropy integral for an interval of length
// interval_len under the metric d(s, t) = 2 sqrt(2) |s - t|:
//   N(r) <= 1 + floor(2 sqrt(2) interval_len / r),
//   Int_0^inf sqrt(log N(r)) dr  (exactly linear in interval_len).
double cover_number_bound(double interval_len, double r);
double dudley_entropy_integral(double interval_len);
// The scale-free factor Int_0^1 sqrt(log(1 + floor(1/u))) du.
double dudley_universal_constant();

struct ChainingBudget {
  double interval_len = 0.0;
  double metric_scale = 0.0;     // 2 sqrt(2)
  double dudley_integral = 0.0;  // constant-free entropy integral
  double cover_bound(double r) const { return cover_number_bound(interval_len, r); }
};

ChainingBudget chaining_budget(double interval_len);

}  // namespace steinlab

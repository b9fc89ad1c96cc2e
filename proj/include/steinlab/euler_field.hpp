#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "steinlab/multiplicative.hpp"
#include "steinlab/rng.hpp"
#include "steinlab/stats.hpp"

namespace steinlab {

struct UniformGrid {
  double t0 = 0.0;
  double h = 0.0;
  size_t count = 0;
  double at(size_t i) const { return t0 + h * static_cast<double>(i); }
};

// One realization of the truncated random Euler product
//   A(sigma + it) = Prod_{p<=y} (1 - alpha(p) p^{-sigma-it})^{-1}
// on a t-grid, together with the terms of its logarithm split by order:
//   log A = linear + quadratic/2 + cubic_tail,
// linear    = Sum_p alpha(p) p^{-s},
// quadratic = Sum_p (alpha(p) p^{-s})^2,
// cubic_tail = Sum_p Sum_{j>=3} (alpha(p) p^{-s})^j / j.
// The product is evaluated directly, the terms by their prime sums, so
// exp(linear + quadratic/2 + cubic_tail) == product is a nontrivial
// consistency check per grid point.
struct EulerFieldSample {
  double y = 0.0;
  double sigma = 0.0;
  std::vector<double> grid;
  std::vector<std::complex<double>> product;
  std::vector<std::complex<double>> linear;
  std::vector<std::complex<double>> quadratic;
  std::vector<std::complex<double>> cubic_tail;
};

// sigma >= 1/2 (the expansion above needs it); y >= 2. The inner j-sum of
// cubic_tail is truncated once p^{-j/2} < 1e-18.
EulerFieldSample evaluate_field(const PhaseAssignment& phases, double y, double sigma,
                                std::span<const double> grid);
EulerFieldSample evaluate_field(const PhaseAssignment& phases, double y, double sigma,
                                const UniformGrid& grid);

// Uniform bound for |cubic_tail|: Sum_p Sum_{j>=3} p^{-j/2}, summed directly
// over p <= 10^7 with the analytic tail of the remaining primes added on top.
double cubic_tail_bound();

// Sum_{p<=y} p^{-e} by direct summation.
double prime_power_sum(double e, double y);

// Sum over all primes of p^{-2} log^2 p (tail beyond the summation cutoff
// bounded analytically and added), dominated by the integral value 2.
double log_sq_prime_sum();

// Critical-line integral functional
//   (1/log y) Int_R |A(1/2+it)|^2 / |1/2+it|^2 dt
// by composite Simpson quadrature over symmetric shells [-T, T] that double
// until the estimated remaining tail drops below eps * value (the |t|^-2
// envelope makes the tail deterministic up to the local mean of |A|^2).
// The reported value includes the analytic tail completion; tail_ok records
// whether the stopping criterion was met within the t_budget.
struct IntegralOptions {
  double t_initial = 16.0;
  double h = 0.0;         // 0 -> pi / (8 log y): 16+ points per oscillation
  double eps = 1e-4;
  double t_budget = 1e5;
};

struct IntegralFunctional {
  double y = 0.0;
  double value = 0.0;
  double t_max = 0.0;
  double h = 0.0;
  double tail_estimate = 0.0;
  bool tail_ok = false;
};

IntegralFunctional integral_functional(const PhaseAssignment& phases, double y,
                                       const IntegralOptions& opts = {});

// Both sides of the Plancherel identity for truncated coefficients
// f(n) = alpha(n) [n y-smooth] [n <= n_trunc]:
//   lhs = 2 pi Int_0^inf |Sum_{n<=t} f(n)|^2 dt/t^2        (computed exactly)
//   rhs = Int_R |F(1/2+it)|^2 / |1/2+it|^2 dt              (by quadrature)
// with F the truncated Dirichlet polynomial of f.
struct ParsevalCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_error = 0.0;
  double t_max = 0.0;
  double h = 0.0;
  double tail_estimate = 0.0;
  bool tail_ok = false;
};

ParsevalCheck parseval_check(const PhaseAssignment& phases, double y, uint64_t n_trunc,
                             double t_max, double h = 0.0, double eps = 1e-4);

// Re of the second-order term at one point.
double quadratic_term_real(const PhaseAssignment& phases, double y, double sigma, double t);

// E[ sup_{s in [n, n+1]} exp(lambda * Re quadratic(s)) ] by Monte Carlo, with
// the sup taken over a fixed subgrid of the window.
MeanEstimate g2_exponential_moment(Seed seed, const std::shared_ptr<const PrimeTable>& primes,
                                   double lambda, double y, double sigma, int window,
                                   size_t replicas, unsigned workers = 0,
                                   size_t subgrid = 256);

// Empirical tail of |Re quadratic(s) - Re quadratic(t)| against the
// sub-Gaussian bound 2 exp(-u^2 / (16 |s-t|^2)).
struct TailPoint {
  double u = 0.0;
  double empirical = 0.0;
  double se = 0.0;
  double bound = 0.0;
};

std::vector<TailPoint> g2_increment_tail(Seed seed,
                                         const std::shared_ptr<const PrimeTable>& primes,
                                         double y, double sigma, double s, double t,
                                         std::span<const double> u_grid, size_t replicas,
                                         unsigned workers = 0);

}  // namespace steinlab

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace steinlab {

// Pairwise (tree) summation; rounding error grows like O(log n) ulps instead
// of O(n) for the sequential loop.
double pairwise_sum(std::span<const double> v);
std::complex<double> pairwise_sum(std::span<const std::complex<double>> v);

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
  size_t n = 0;
  double ci_lo() const { return mean - 1.96 * se; }
  double ci_hi() const { return mean + 1.96 * se; }
};

MeanEstimate mean_estimate(std::span<const double> v);

struct ComplexMeanEstimate {
  std::complex<double> mean;
  double se_re = 0.0;
  double se_im = 0.0;
  size_t n = 0;
};

ComplexMeanEstimate mean_estimate(std::span<const std::complex<double>> v);

// Median of batch means. Robust against the heavy upper tail of chaos-mass
// samples, where the plain mean has huge variance. The confidence interval
// comes from the order statistics of the batch means (sign-test interval,
// normal approximation), so it needs no moment assumptions.
struct BatchMedianEstimate {
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  size_t batches = 0;
  size_t n = 0;
};

BatchMedianEstimate median_of_batch_means(std::span<const double> v, size_t batches);

struct MomentsSummary {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  size_t n = 0;
};

MomentsSummary sample_moments(std::span<const double> v);

// Chi-square statistic against the uniform distribution over the bins.
double chi_square_uniform(std::span<const uint64_t> counts);

double sample_correlation(std::span<const double> a, std::span<const double> b);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double sse = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y);
double sse_constant_fit(std::span<const double> y);

}  // namespace steinlab

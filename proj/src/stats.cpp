#include "steinlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace steinlab {

namespace {

template <typename T>
T pairwise_sum_impl(std::span<const T> v) {
  if (v.size() <= 32) {
    T acc{};
    for (const T& x : v) acc += x;
    return acc;
  }
  size_t half = v.size() / 2;
  return pairwise_sum_impl(v.first(half)) + pairwise_sum_impl(v.subspan(half));
}

}  // namespace

double pairwise_sum(std::span<const double> v) { return pairwise_sum_impl(v); }

std::complex<double> pairwise_sum(std::span<const std::complex<double>> v) {
  return pairwise_sum_impl(v);
}

MeanEstimate mean_estimate(std::span<const double> v) {
  MeanEstimate out;
  out.n = v.size();
  if (v.empty()) return out;
  out.mean = pairwise_sum(v) / static_cast<double>(v.size());
  if (v.size() < 2) return out;
  std::vector<double> sq(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    double d = v[i] - out.mean;
    sq[i] = d * d;
  }
  double var = pairwise_sum(sq) / static_cast<double>(v.size() - 1);
  out.se = std::sqrt(var / static_cast<double>(v.size()));
  return out;
}

ComplexMeanEstimate mean_estimate(std::span<const std::complex<double>> v) {
  ComplexMeanEstimate out;
  out.n = v.size();
  if (v.empty()) return out;
  std::vector<double> re(v.size()), im(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    re[i] = v[i].real();
    im[i] = v[i].imag();
  }
  MeanEstimate mr = mean_estimate(re);
  MeanEstimate mi = mean_estimate(im);
  out.mean = {mr.mean, mi.mean};
  out.se_re = mr.se;
  out.se_im = mi.se;
  return out;
}

BatchMedianEstimate median_of_batch_means(std::span<const double> v, size_t batches) {
  if (batches < 2) throw std::domain_error("median_of_batch_means: need at least 2 batches");
  if (v.size() < batches) throw std::domain_error("median_of_batch_means: fewer samples than batches");
  BatchMedianEstimate out;
  out.batches = batches;
  out.n = v.size();
  std::vector<double> means(batches);
  size_t base = v.size() / batches, extra = v.size() % batches, pos = 0;
  for (size_t b = 0; b < batches; ++b) {
    size_t len = base + (b < extra ? 1 : 0);
    means[b] = pairwise_sum(v.subspan(pos, len)) / static_cast<double>(len);
    pos += len;
  }
  std::sort(means.begin(), means.end());
  size_t m = batches / 2;
  out.estimate = (batches % 2 == 1) ? means[m] : 0.5 * (means[m - 1] + means[m]);
  // sign-test interval at ~95%
  auto d = static_cast<size_t>(std::ceil(0.98 * std::sqrt(static_cast<double>(batches))));
  size_t lo = (m >= d + 1) ? m - d - 1 : 0;
  size_t hi = std::min(batches - 1, m + d);
  out.ci_lo = means[lo];
  out.ci_hi = means[hi];
  return out;
}

MomentsSummary sample_moments(std::span<const double> v) {
  MomentsSummary out;
  out.n = v.size();
  if (v.size() < 2) return out;
  double n = static_cast<double>(v.size());
  out.mean = pairwise_sum(v) / n;
  std::vector<double> p2(v.size()), p3(v.size()), p4(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    double d = v[i] - out.mean;
    p2[i] = d * d;
    p3[i] = d * d * d;
    p4[i] = d * d * d * d;
  }
  double m2 = pairwise_sum(p2) / n;
  double m3 = pairwise_sum(p3) / n;
  double m4 = pairwise_sum(p4) / n;
  out.variance = m2 * n / (n - 1.0);
  out.skewness = m3 / std::pow(m2, 1.5);
  out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  return out;
}

double chi_square_uniform(std::span<const uint64_t> counts) {
  if (counts.empty()) throw std::domain_error("chi_square_uniform: no bins");
  uint64_t total = 0;
  for (uint64_t c : counts) total += c;
  double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0.0;
  for (uint64_t c : counts) {
    double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  return stat;
}

double sample_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::domain_error("sample_correlation: mismatched or too short inputs");
  double n = static_cast<double>(a.size());
  double ma = pairwise_sum(a) / n, mb = pairwise_sum(b) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  return sab / std::sqrt(saa * sbb);
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::domain_error("least_squares: mismatched or too short inputs");
  double n = static_cast<double>(x.size());
  double mx = pairwise_sum(x) / n, my = pairwise_sum(y) / n;
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (fit.intercept + fit.slope * x[i]);
    fit.sse += r * r;
  }
  return fit;
}

double sse_constant_fit(std::span<const double> y) {
  if (y.empty()) return 0.0;
  double mean = pairwise_sum(y) / static_cast<double>(y.size());
  double sse = 0.0;
  for (double v : y) sse += (v - mean) * (v - mean);
  return sse;
}

}  // namespace steinlab

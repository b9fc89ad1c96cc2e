// Acceptance suite: runs the project-level criteria end to end and prints
// one PASS/FAIL line per criterion. With no arguments every criterion runs;
// with an argument in 1..8 only that criterion runs. Exit code is the number
// of failed criteria.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "steinlab/counting.hpp"
#include "steinlab/euler_field.hpp"
#include "steinlab/experiments.hpp"
#include "steinlab/gaussian_chaos.hpp"
#include "steinlab/multiplicative.hpp"
#include "steinlab/parallel.hpp"
#include "steinlab/stats.hpp"

using namespace steinlab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

// --- 1. exact identities -----------------------------------------------

Outcome criterion1() {
  Outcome out;
  auto primes = make_prime_table(10'000);

  double max_residual = 0.0;
  for (uint64_t s = 0; s < 100; ++s) {
    PhaseAssignment a({9000 + s, 0}, primes);
    MultiplicativeTable table(a, 10'000);
    SmoothMask mask(table, 31.0);
    max_residual = std::max(max_residual, check_splitting_identity(table, mask, 10'000.0));
  }
  out.require(max_residual <= 1e-8, "splitting residual " + fmt(max_residual));

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> pick(-20.0, 20.0);
  std::vector<double> grid(1000);
  for (auto& t : grid) t = pick(gen);
  auto sample = evaluate_field(PhaseAssignment({9100, 0}, primes), 10'000.0, 0.5,
                               std::span<const double>(grid));
  double max_rel = 0.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    auto rebuilt =
        std::exp(sample.linear[i] + 0.5 * sample.quadratic[i] + sample.cubic_tail[i]);
    max_rel = std::max(max_rel,
                       std::abs(rebuilt - sample.product[i]) / std::abs(sample.product[i]));
  }
  out.require(max_rel <= 1e-9, "log-split reconstruction " + fmt(max_rel));

  double ratio = dudley_entropy_integral(2.0) / dudley_entropy_integral(1.0);
  out.require(std::abs(ratio - 2.0) <= 1e-9, "entropy-integral homogeneity " + fmt(ratio));

  out.detail = "max splitting residual " + fmt(max_residual) + ", max reconstruction rel err " +
               fmt(max_rel) + ", homogeneity dev " + fmt(std::abs(ratio - 2.0));
  return out;
}

// --- 2. oracle equivalences ---------------------------------------------

Outcome criterion2() {
  Outcome out;

  oracles::BuchstabPsi psi;
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<uint64_t> px(100, 1'000'000);
  std::uniform_int_distribution<uint64_t> py(2, 400);
  size_t agreements = 0;
  for (int i = 0; i < 50; ++i) {
    uint64_t x = px(gen), y = py(gen);
    if (count_smooth_rough(x, y).psi == psi(x, y)) ++agreements;
  }
  out.require(agreements == 50, "smooth-count recursion agreements " + fmt(agreements));

  auto primes = make_prime_table(1'000'000);
  PhaseAssignment a({9200, 0}, primes);
  MultiplicativeTable table(a, 1'000'000);
  std::uniform_int_distribution<uint64_t> pn(1, 1'000'000);
  double max_alpha_err = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    uint64_t n = pn(gen);
    max_alpha_err =
        std::max(max_alpha_err, std::abs(table.alpha(n) - oracles::alpha_by_trial_division(a, n)));
  }
  out.require(max_alpha_err <= 1e-10, "alpha vs trial division " + fmt(max_alpha_err));

  auto p = parseval_check(PhaseAssignment({9300, 0}, make_prime_table(10'001)), 31.0, 10'000,
                          8192);
  out.require(p.tail_ok && p.relative_error <= 1e-3,
              "prefix/polynomial identity rel err " + fmt(p.relative_error));

  out.detail = "50/50 count agreements, alpha err " + fmt(max_alpha_err) +
               ", identity rel err " + fmt(p.relative_error);
  return out;
}

// --- 3. statistical identities at 4 standard errors ---------------------

Outcome criterion3() {
  Outcome out;
  auto primes = make_prime_table(100'000);

  size_t grid_ok = 0;
  for (uint64_t n = 1; n <= 10; ++n) {
    for (uint64_t m = 1; m <= 10; ++m) {
      auto est = check_orthogonality({9400, 0}, primes, n, m, 100'000, 0);
      bool ok;
      if (n == m) {
        ok = est.mean == std::complex<double>(1.0, 0.0) && est.se_re == 0.0;
      } else {
        ok = std::abs(est.mean.real()) <= 4.0 * est.se_re &&
             std::abs(est.mean.imag()) <= 4.0 * est.se_im;
      }
      if (ok) ++grid_ok;
    }
  }
  out.require(grid_ok == 100, "orthogonality grid cells ok " + fmt(grid_ok));

  const std::pair<uint64_t, uint64_t> rough_pairs[5] = {
      {11, 13}, {121, 11}, {13, 17}, {169, 13}, {11, 19}};
  size_t cond_ok = 0;
  for (auto [n, m] : rough_pairs) {
    auto est = check_conditional_orthogonality({9500, 0}, primes, n, m, 10.0, 100'000, 0);
    if (std::abs(est.mean.real()) <= 4.0 * est.se_re &&
        std::abs(est.mean.imag()) <= 4.0 * est.se_im)
      ++cond_ok;
  }
  out.require(cond_ok == 5, "conditional pairs ok " + fmt(cond_ok));

  auto moment = check_conditional_second_moment({9600, 0}, primes, 10'000.0, 31.0, 100'000, 0);
  out.require(moment.relative_error <= 0.02,
              "conditional second moment rel err " + fmt(moment.relative_error));

  for (double x : {1000.0, 100'000.0}) {
    auto n_max = static_cast<uint64_t>(x);
    PhaseAssignment base({9700, 0}, primes);
    std::vector<double> v(2000);
    parallel_for(v.size(), 0, [&](size_t k) {
      MultiplicativeTable t(base.with_seed({9700, k}), n_max);
      v[k] = std::norm(partial_sum(t, x).value);
    });
    MeanEstimate e = mean_estimate(v);
    out.require(std::abs(e.mean - 1.0) <= 3.0 * e.se,
                "second moment at x=" + fmt(x) + " dev " + fmt(std::abs(e.mean - 1.0)));
  }

  out.detail = "grid 100/100, conditional 5/5, nested-MC rel err " + fmt(moment.relative_error);
  return out;
}

// --- 4. concentration bounds --------------------------------------------

Outcome criterion4() {
  Outcome out;
  auto primes = make_prime_table(10'000);

  std::vector<double> us{0.0, 0.2, 0.4, 0.8, 1.2};
  size_t points_ok = 0, points = 0;
  for (double gap : {0.05, 0.1, 0.2}) {
    auto tails = g2_increment_tail({9800, 0}, primes, 10'000.0, 0.5, 0.4, 0.4 + gap,
                                   std::span<const double>(us), 100'000, 0);
    for (const auto& t : tails) {
      ++points;
      if (t.empirical <= t.bound + 4.0 * t.se) ++points_ok;
    }
  }
  out.require(points_ok == points, "tail grid points ok " + fmt(points_ok));

  PhaseAssignment base({9900, 0}, primes);
  for (double lambda : {1.0, 2.0}) {
    std::vector<double> v(20'000);
    parallel_for(v.size(), 0, [&](size_t k) {
      v[k] = std::exp(lambda *
                      quadratic_term_real(base.with_seed({9900, k}), 10'000.0, 0.5, 0.3));
    });
    MeanEstimate e = mean_estimate(v);
    double cap = std::exp(lambda * lambda / 4.0);
    out.require(e.mean <= cap + 4.0 * e.se,
                "exp moment at lambda=" + fmt(lambda) + ": " + fmt(e.mean) + " vs " + fmt(cap));
  }

  double proxy = log_sq_prime_sum();
  out.require(proxy <= 2.0, "log-sq prime sum " + fmt(proxy));
  double p4 = prime_power_sum(2.0, 1'000'000.0);
  out.require(p4 <= 0.5, "p^-2 partial sum " + fmt(p4));

  out.detail = "tail grid " + fmt(points_ok) + "/" + fmt(points) + ", proxies " + fmt(proxy) +
               " <= 2 and " + fmt(p4) + " <= 1/2";
  return out;
}

// --- 5. covariance approximation ----------------------------------------

Outcome criterion5() {
  Outcome out;
  auto primes = make_prime_table(1'000'000);

  std::vector<double> lags{0.0, 1.0};
  for (double lag = 1e-4; lag <= 1.0; lag *= 1.05) lags.push_back(lag);
  double envelope = 0.0;
  for (double y : {100.0, 1000.0, 10'000.0, 100'000.0, 1'000'000.0})
    envelope = std::max(envelope, covariance_gap(*primes, y, lags).sup_gap);
  out.require(envelope <= 0.198, "kernel gap envelope " + fmt(envelope));

  const double y = 997.0;
  std::vector<double> grid(10);
  for (size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(i) / 9.0;
  const size_t replicas = 100'000;
  std::vector<std::pair<size_t, size_t>> pairs;
  for (size_t i = 0; i < grid.size() && pairs.size() < 20; ++i)
    for (size_t j = i + 1; j < grid.size() && pairs.size() < 20; j += 2) pairs.emplace_back(i, j);
  std::vector<std::vector<double>> products(pairs.size(), std::vector<double>(replicas));
  parallel_for(replicas, 0, [&](size_t k) {
    auto s = sample_gaussian_field(replica_seed({9950, 0}, k), *primes, y,
                                   std::span<const double>(grid));
    for (size_t p = 0; p < pairs.size(); ++p)
      products[p][k] = s.values[pairs[p].first] * s.values[pairs[p].second];
  });
  size_t pairs_ok = 0;
  for (size_t p = 0; p < pairs.size(); ++p) {
    MeanEstimate e = mean_estimate(products[p]);
    double exact = gaussian_cov_exact(*primes, y, grid[pairs[p].first] - grid[pairs[p].second]);
    if (std::abs(e.mean - exact) <= 4.0 * e.se) ++pairs_ok;
  }
  out.require(pairs_ok == pairs.size(), "sampler covariance pairs ok " + fmt(pairs_ok));

  out.detail = "gap envelope " + fmt(envelope) + " <= 0.198, sampler pairs " + fmt(pairs_ok) +
               "/" + fmt(pairs.size());
  return out;
}

// --- 6. chaos moments and kernel comparison ------------------------------

Outcome criterion6() {
  Outcome out;
  auto primes = make_prime_table(100'000);

  double lo = 1e300, hi = 0.0;
  bool stable = true;
  for (double y : {100.0, 1000.0, 10'000.0, 100'000.0}) {
    auto e = gmc_moment({7, 0}, *primes, y, 0.75, 2048, 64, 32, 0);
    stable = stable && e.resolution_stable;
    lo = std::min(lo, e.estimate);
    hi = std::max(hi, e.estimate);
  }
  out.require(stable, "resolution stability");
  out.require(hi <= 2.0 * lo, "chaos moment band ratio " + fmt(hi / lo));

  size_t held = 0;
  for (uint64_t t = 0; t < 100; ++t) {
    auto [ky, kz] = random_dominated_kernels({10'000, t}, 8);
    auto cmp = kahane_compare(ky, kz, 0.5, 20'000, {10'100, t});
    if (cmp.holds()) ++held;
  }
  out.require(held == 100, "dominated-kernel trials held " + fmt(held));

  out.detail = "band ratio " + fmt(hi / lo) + " <= 2, trials " + fmt(held) + "/100";
  return out;
}

// --- 7. headline trend ----------------------------------------------------

Outcome criterion7() {
  Outcome out;

  ExperimentConfig cfg;
  cfg.experiment = "moment-decay";
  cfg.x_grid = {1000.0, 10'000.0, 100'000.0, 1'000'000.0};
  cfg.q_list = {0.5};
  cfg.replicas = 8000;
  cfg.seed = {20'240, 0};
  MomentDecayResult res = run_moment_decay(cfg);

  bool decreasing = true;
  for (size_t i = 1; i < res.estimates.size(); ++i)
    if (!(res.estimates[i].estimate < res.estimates[i - 1].estimate)) decreasing = false;
  out.require(decreasing, "estimates not strictly decreasing");
  out.require(res.estimates.front().ci_lo > res.estimates.back().ci_hi,
              "first/last confidence intervals overlap");

  std::vector<double> xs, ys;
  for (const auto& r : res.estimates) {
    xs.push_back(std::log(std::log(std::log(r.x_or_y))));
    ys.push_back(std::log(r.estimate));
  }
  LineFit fit = least_squares(xs, ys);
  double const_sse = sse_constant_fit(ys);
  out.require(fit.sse < const_sse && fit.slope < 0.0,
              "triple-log fit not preferred (slope " + fmt(fit.slope) + ")");

  ExperimentConfig l13;
  l13.experiment = "lemma13";
  l13.y_grid = {100.0, 1000.0, 10'000.0};
  l13.q_list = {0.5};
  l13.replicas = 1000;
  l13.quad_eps = 1e-3;
  l13.seed = {20'241, 0};
  Lemma13Result scaled = run_lemma13(l13);
  out.require(all_pass(scaled.checks), "scaled integral moment checks");

  out.detail = "slope " + fmt(fit.slope) + ", decay " + fmt(res.estimates.front().estimate) +
               " -> " + fmt(res.estimates.back().estimate);
  return out;
}

// --- 8. determinism across worker counts ----------------------------------

Outcome criterion8() {
  Outcome out;
  ExperimentConfig cfg;
  cfg.experiment = "moment-decay";
  cfg.x_grid = {1000.0, 10'000.0};
  cfg.q_list = {0.5};
  cfg.replicas = 300;
  cfg.seed = {31'415, 0};

  std::string reference;
  for (unsigned workers : {1u, 4u, 8u}) {
    cfg.workers = workers;
    MomentDecayResult res = run_moment_decay(cfg);
    std::string csv = to_csv(res.estimates);
    if (reference.empty())
      reference = csv;
    else
      out.require(csv == reference, "workers=" + fmt(workers) + " differ");
  }
  out.detail = "byte-identical CSV for 1, 4, 8 workers";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"exact identities (splitting, log-split reconstruction, entropy homogeneity)", criterion1},
      {"oracle equivalences (recursion counts, trial division, prefix/polynomial identity)",
       criterion2},
      {"statistical identities at 4 standard errors", criterion3},
      {"concentration bounds with Monte Carlo slack", criterion4},
      {"covariance approximation of the analogue field", criterion5},
      {"chaos moment band and dominated-kernel comparison", criterion6},
      {"headline decay trend and scaled integral moments", criterion7},
      {"worker-count determinism", criterion8},
  };

  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  int failures = 0;
  for (int i = 0; i < 8; ++i) {
    if (only != 0 && only != i + 1) continue;
    Outcome o = criteria[i].second();
    std::printf("[%s] criterion %d: %s — %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures;
}

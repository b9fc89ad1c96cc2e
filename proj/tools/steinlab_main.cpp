// Command-line front end: experiments, identity checks, counting and field
// evaluation, with reproducible seeds and table/plot-ready output.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "steinlab/counting.hpp"
#include "steinlab/euler_field.hpp"
#include "steinlab/experiments.hpp"
#include "steinlab/gaussian_chaos.hpp"
#include "steinlab/io.hpp"
#include "steinlab/multiplicative.hpp"
#include "steinlab/parallel.hpp"

using namespace steinlab;
using nlohmann::json;

namespace {

struct CommonOpts {
  uint64_t seed_master = 1;
  uint64_t seed_replica = 0;
  unsigned workers = 0;
  std::string out;
  std::string config_path;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--seed-master", c.seed_master, "master seed (decimal 64-bit)");
  cmd->add_option("--seed-replica", c.seed_replica, "replica seed (decimal 64-bit)");
  cmd->add_option("--workers", c.workers, "worker threads (0 = STEINLAB_WORKERS or hardware)");
  cmd->add_option("--out", c.out, "output path stem");
}

ExperimentConfig load_config(const CommonOpts& c) {
  ExperimentConfig cfg;
  if (!c.config_path.empty()) cfg = ExperimentConfig::from_json(json::parse(read_text_file(c.config_path)));
  if (c.seed_master != 1 || c.seed_replica != 0 || c.config_path.empty())
    cfg.seed = {c.seed_master, c.seed_replica};
  if (c.workers) cfg.workers = c.workers;
  if (!c.out.empty()) cfg.out_path = c.out;
  return cfg;
}

int report_checks(const std::vector<CheckResult>& checks) {
  bool ok = true;
  for (const auto& c : checks) {
    std::printf("%s %s (%s)\n", c.pass ? "[PASS]" : "[FAIL]", c.name.c_str(), c.detail.c_str());
    ok = ok && c.pass;
  }
  return ok ? 0 : 1;
}

void print_rows(const ExperimentConfig& cfg, const std::vector<MomentEstimate>& rows) {
  if (cfg.format == "json")
    std::printf("%s\n", to_json(std::span<const MomentEstimate>(rows)).dump(2).c_str());
  else
    std::printf("%s", to_csv(rows).c_str());
  if (!cfg.out_path.empty())
    for (const auto& f : emit(cfg, rows)) std::fprintf(stderr, "wrote %s\n", f.c_str());
}

int cmd_moment_decay(const CommonOpts& c, std::vector<double> xs, std::vector<double> qs,
                     size_t replicas) {
  ExperimentConfig cfg = load_config(c);
  cfg.experiment = "moment-decay";
  if (!xs.empty()) cfg.x_grid = xs;
  if (!qs.empty()) cfg.q_list = qs;
  if (replicas) cfg.replicas = replicas;
  MomentDecayResult res = run_moment_decay(cfg);
  print_rows(cfg, res.estimates);
  return report_checks(res.checks);
}

int cmd_lemma_budget(const CommonOpts& c, std::vector<double> xs, std::vector<double> qs,
                     size_t replicas) {
  ExperimentConfig cfg = load_config(c);
  cfg.experiment = "lemma-budget";
  if (!xs.empty()) cfg.x_grid = xs;
  if (!qs.empty()) cfg.q_list = qs;
  if (replicas) cfg.replicas = replicas;
  LemmaBudgetResult res = run_lemma_budget(cfg);
  for (const auto& r : res.records)
    std::printf("x=%g y=%.4g q=%g lhs=%.6g rhs_integral=%.6g rhs_remainder=%.6g ratio=%.6g "
                "split_head=%.6g split_tail=%.6g\n",
                r.x, r.y, r.q, r.lhs, r.rhs_integral, r.rhs_remainder, r.ratio, r.split_head,
                r.split_tail);
  print_rows(cfg, res.estimates);
  return report_checks(res.checks);
}

int cmd_lemma13(const CommonOpts& c, std::vector<double> ys, std::vector<double> qs,
                size_t replicas, double eps) {
  ExperimentConfig cfg = load_config(c);
  cfg.experiment = "lemma13";
  if (!ys.empty()) cfg.y_grid = ys;
  if (!qs.empty()) cfg.q_list = qs;
  if (replicas) cfg.replicas = replicas;
  if (eps > 0) cfg.quad_eps = eps;
  Lemma13Result res = run_lemma13(cfg);
  print_rows(cfg, res.estimates);
  return report_checks(res.checks);
}

int cmd_identities(const CommonOpts& c, double x, double y, size_t replicas) {
  Seed seed{c.seed_master, c.seed_replica};
  auto primes = make_prime_table(static_cast<uint64_t>(x));
  PhaseAssignment a(seed, primes);
  MultiplicativeTable table(a, static_cast<uint64_t>(x));
  SmoothMask mask(table, y);
  std::vector<CheckResult> checks;
  json records = json::array();

  {
    double res = check_splitting_identity(table, mask, x);
    bool ok = res <= 1e-8;
    checks.push_back({"splitting_identity_residual", ok, format_double(res)});
    records.push_back(op_record("splitting_identity", {{"x", x}, {"y", y}}, seed, res, 0.0, 1));
  }
  {
    auto est = check_orthogonality(seed, primes, 2, 3, replicas, c.workers);
    double dev = std::abs(est.mean);
    double se = std::hypot(est.se_re, est.se_im);
    bool ok = dev <= 4.0 * se;
    checks.push_back({"orthogonality_offdiag", ok, format_double(dev)});
    records.push_back(op_record("orthogonality", {{"n", 2}, {"m", 3}}, seed,
                                json{est.mean.real(), est.mean.imag()}, se, replicas));
  }
  {
    auto est = check_conditional_orthogonality(seed, primes, 11, 13, 10.0, replicas, c.workers);
    double dev = std::abs(est.mean);
    double se = std::hypot(est.se_re, est.se_im);
    bool ok = dev <= 4.0 * se;
    checks.push_back({"conditional_orthogonality_offdiag", ok, format_double(dev)});
    records.push_back(op_record("conditional_orthogonality",
                                {{"n", 11}, {"m", 13}, {"y", 10.0}}, seed,
                                json{est.mean.real(), est.mean.imag()}, se, replicas));
  }
  {
    auto r = check_conditional_second_moment(seed, primes, x, y, replicas, c.workers);
    bool ok = std::abs(r.lhs_estimate - r.rhs_exact) <= 4.0 * r.lhs_se;
    checks.push_back({"conditional_second_moment", ok, format_double(r.relative_error)});
    records.push_back(op_record("conditional_second_moment", {{"x", x}, {"y", y}}, seed,
                                r.lhs_estimate, r.lhs_se, replicas));
  }
  if (!c.out.empty()) write_text_file(c.out, records.dump(2) + "\n");
  return report_checks(checks);
}

int cmd_count(const CommonOpts& c, uint64_t x, uint64_t y, double alpha, uint64_t window) {
  CountTable t = count_smooth_rough(x, y);
  std::string csv = "x,y,psi,phi,bound,slack\n";
  csv += std::to_string(t.x) + "," + std::to_string(t.y) + "," + std::to_string(t.psi) + "," +
         std::to_string(t.phi);
  if (alpha > 0.0) {
    RankinCertificate cert = rankin_certificate(x, y, alpha);
    csv += "," + format_double(cert.bound) + "," + format_double(cert.slack);
  } else {
    csv += ",,";
  }
  csv += "\n";
  if (window) {
    BrunRatio b = brun_ratio(x, window, y);
    csv += "x,H,y,window_count,ratio\n";
    csv += std::to_string(b.x) + "," + std::to_string(b.h) + "," + std::to_string(b.y) + "," +
           std::to_string(b.window_count) + "," + format_double(b.ratio) + "\n";
  }
  std::printf("%s", csv.c_str());
  if (!c.out.empty()) write_text_file(c.out, csv);
  return 0;
}

int cmd_field(const CommonOpts& c, double y, double sigma, double tmin, double tmax,
              double step) {
  auto primes = make_prime_table(static_cast<uint64_t>(std::ceil(y)) + 1);
  PhaseAssignment a({c.seed_master, c.seed_replica}, primes);
  UniformGrid grid{tmin, step, static_cast<size_t>(std::floor((tmax - tmin) / step)) + 1};
  EulerFieldSample s = evaluate_field(a, y, sigma, grid);
  std::string csv = "t,re,im,abs\n";
  for (size_t i = 0; i < s.grid.size(); ++i)
    csv += format_double(s.grid[i]) + "," + format_double(s.product[i].real()) + "," +
           format_double(s.product[i].imag()) + "," + format_double(std::abs(s.product[i])) +
           "\n";
  std::printf("%s", csv.c_str());
  if (!c.out.empty()) write_text_file(c.out, csv);
  return 0;
}

int cmd_sums(const CommonOpts& c, uint64_t n, double y) {
  auto primes = make_prime_table(n);
  PhaseAssignment a({c.seed_master, c.seed_replica}, primes);
  MultiplicativeTable table(a, n);
  std::string csv = "x,re,im,abs\n";
  if (y >= 2.0) {
    SmoothMask mask(table, y);
    for (uint64_t x = 1; x <= n; ++x) {
      auto v = partial_sum(table, static_cast<double>(x), mask).value;
      csv += std::to_string(x) + "," + format_double(v.real()) + "," + format_double(v.imag()) +
             "," + format_double(std::abs(v)) + "\n";
    }
  } else {
    for (uint64_t x = 1; x <= n; ++x) {
      auto v = partial_sum(table, static_cast<double>(x)).value;
      csv += std::to_string(x) + "," + format_double(v.real()) + "," + format_double(v.imag()) +
             "," + format_double(std::abs(v)) + "\n";
    }
  }
  std::printf("%s", csv.c_str());
  if (!c.out.empty()) write_text_file(c.out, csv);
  return 0;
}

int cmd_integral(const CommonOpts& c, double y, double eps) {
  auto primes = make_prime_table(static_cast<uint64_t>(std::ceil(y)) + 1);
  PhaseAssignment a({c.seed_master, c.seed_replica}, primes);
  IntegralOptions opts;
  if (eps > 0) opts.eps = eps;
  IntegralFunctional f = integral_functional(a, y, opts);
  json rec{{"op", "integral_functional"}, {"y", f.y},
           {"value", f.value},            {"t_max", f.t_max},
           {"h", f.h},                    {"tail_estimate", f.tail_estimate},
           {"tail_ok", f.tail_ok},
           {"seed", {{"master", c.seed_master}, {"replica", c.seed_replica}}}};
  std::printf("%s\n", rec.dump(2).c_str());
  if (!c.out.empty()) write_text_file(c.out, rec.dump(2) + "\n");
  return f.tail_ok ? 0 : 1;
}

int cmd_parseval(const CommonOpts& c, double y, uint64_t ntrunc, double tmax) {
  auto primes = make_prime_table(ntrunc + 1);
  PhaseAssignment a({c.seed_master, c.seed_replica}, primes);
  ParsevalCheck p = parseval_check(a, y, ntrunc, tmax);
  json rec{{"op", "parseval"},
           {"y", y},
           {"n_trunc", ntrunc},
           {"lhs", p.lhs},
           {"rhs", p.rhs},
           {"relative_error", p.relative_error},
           {"t_max", p.t_max},
           {"h", p.h},
           {"tail_estimate", p.tail_estimate},
           {"tail_ok", p.tail_ok},
           {"seed", {{"master", c.seed_master}, {"replica", c.seed_replica}}}};
  std::printf("%s\n", rec.dump(2).c_str());
  if (!c.out.empty()) write_text_file(c.out, rec.dump(2) + "\n");
  return (p.tail_ok && p.relative_error <= 1e-3) ? 0 : 1;
}

int cmd_gmc(const CommonOpts& c, double y, double q, size_t replicas, size_t resolution) {
  auto primes = make_prime_table(static_cast<uint64_t>(std::ceil(y)) + 1);
  if (resolution == 0) {
    resolution = 64;
    while (static_cast<double>(resolution) < 4.0 * std::log(y)) resolution *= 2;
  }
  GMCMeasureEstimate e =
      gmc_moment({c.seed_master, c.seed_replica}, *primes, y, q, replicas, resolution, 32,
                 c.workers);
  json rec{{"op", "gmc_moment"},
           {"y", e.y},
           {"q", e.q},
           {"estimate", e.estimate},
           {"ci_lo", e.ci_lo},
           {"ci_hi", e.ci_hi},
           {"replicas", e.replicas},
           {"batches", e.batches},
           {"resolution", e.resolution},
           {"coarse_estimate", e.coarse_estimate},
           {"resolution_stable", e.resolution_stable},
           {"seed", {{"master", c.seed_master}, {"replica", c.seed_replica}}}};
  std::printf("%s\n", rec.dump(2).c_str());
  if (!c.out.empty()) write_text_file(c.out, rec.dump(2) + "\n");
  return e.resolution_stable ? 0 : 1;
}

int cmd_cov_gap(const CommonOpts& c, double y) {
  auto primes = make_prime_table(static_cast<uint64_t>(std::ceil(y)) + 1);
  std::vector<double> lags;
  for (double lag = 1.0 / (4.0 * std::log(y)); lag <= 1.0; lag *= 1.15) lags.push_back(lag);
  lags.push_back(1.0);
  lags.push_back(0.0);
  CovarianceGap g = covariance_gap(*primes, y, lags);
  json rec{{"op", "cov_gap"}, {"y", y}, {"sup_gap", g.sup_gap}, {"arg_lag", g.arg_lag}};
  std::printf("%s\n", rec.dump(2).c_str());
  if (!c.out.empty()) write_text_file(c.out, rec.dump(2) + "\n");
  return 0;
}

int cmd_kahane(const CommonOpts& c, size_t gridsize, double q, size_t replicas, size_t trials) {
  Seed seed{c.seed_master, c.seed_replica};
  size_t held = 0;
  json arr = json::array();
  for (size_t t = 0; t < trials; ++t) {
    auto [ky, kz] = random_dominated_kernels(replica_seed(seed, 1'000'000 + t), gridsize);
    KahaneComparison cmp =
        kahane_compare(ky, kz, q, replicas, replica_seed(seed, t), {}, c.workers);
    if (cmp.holds()) ++held;
    arr.push_back(json{{"trial", t},
                       {"moment_lower_kernel", cmp.moment_lower_kernel},
                       {"moment_upper_kernel", cmp.moment_upper_kernel},
                       {"gap", cmp.gap},
                       {"gap_se", cmp.gap_se}});
  }
  json rec{{"op", "kahane"}, {"gridsize", gridsize}, {"q", q},
           {"trials", trials}, {"held", held},       {"records", arr}};
  std::printf("kahane: %zu/%zu trials hold\n", held, trials);
  if (!c.out.empty()) write_text_file(c.out, rec.dump(2) + "\n");
  return held == trials ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo laboratory for random multiplicative functions"};
  app.require_subcommand(1);
  CommonOpts c;

  std::vector<double> xs, ys, qs;
  size_t replicas = 0;
  double eps = 0, x = 1e4, y = 31, alpha = 0, sigma = 0.5, tmin = 0, tmax = 1, step = 0.01,
         q = 0.5;
  uint64_t xi = 1000, yi = 31, window = 0, n = 1000, ntrunc = 10000;
  size_t gridsize = 8, trials = 100, resolution = 0;

  auto* md = app.add_subcommand("moment-decay", "moments of normalized partial sums over x");
  add_common(md, c);
  md->add_option("--config", c.config_path, "JSON config file");
  md->add_option("--x", xs, "x grid")->delimiter(',');
  md->add_option("--q", qs, "q list")->delimiter(',');
  md->add_option("--replicas", replicas);

  auto* lb = app.add_subcommand("lemma-budget", "partial-sum moment vs integral + remainder");
  add_common(lb, c);
  lb->add_option("--config", c.config_path, "JSON config file");
  lb->add_option("--x", xs, "x grid")->delimiter(',');
  lb->add_option("--q", qs, "q list")->delimiter(',');
  lb->add_option("--replicas", replicas);

  auto* l13 = app.add_subcommand("lemma13", "scaled integral-functional moments over y");
  add_common(l13, c);
  l13->add_option("--config", c.config_path, "JSON config file");
  l13->add_option("--y", ys, "y grid")->delimiter(',');
  l13->add_option("--q", qs, "q list")->delimiter(',');
  l13->add_option("--replicas", replicas);
  l13->add_option("--eps", eps, "quadrature tail criterion");

  auto* id = app.add_subcommand("identities", "orthogonality and splitting identity checks");
  add_common(id, c);
  id->add_option("--x", x);
  id->add_option("--y", y);
  id->add_option("--replicas", replicas);

  auto* ct = app.add_subcommand("count", "smooth/rough counts with optional certificate");
  add_common(ct, c);
  ct->add_option("--x", xi)->required();
  ct->add_option("--y", yi)->required();
  ct->add_option("--alpha", alpha, "exponent for the count certificate");
  ct->add_option("--H", window, "window length for the short-interval ratio");

  auto* fd = app.add_subcommand("field", "Euler product values on a t-grid");
  add_common(fd, c);
  fd->add_option("--y", y)->required();
  fd->add_option("--sigma", sigma);
  fd->add_option("--tmin", tmin);
  fd->add_option("--tmax", tmax);
  fd->add_option("--step", step);

  auto* sm = app.add_subcommand("sums", "normalized partial sums for plotting");
  add_common(sm, c);
  sm->add_option("--n", n)->required();
  sm->add_option("--y", y, "restrict to y-smooth support (optional)");

  auto* ig = app.add_subcommand("integral", "critical-line integral functional");
  add_common(ig, c);
  ig->add_option("--y", y)->required();
  ig->add_option("--eps", eps);

  double pv_tmax = 8192.0;
  auto* pv = app.add_subcommand("parseval", "prefix-sum vs Dirichlet-polynomial identity");
  add_common(pv, c);
  pv->add_option("--y", y)->required();
  pv->add_option("--ntrunc", ntrunc);
  pv->add_option("--tmax", pv_tmax);

  auto* gm = app.add_subcommand("gmc", "fractional moments of the chaos mass");
  add_common(gm, c);
  gm->add_option("--y", y)->required();
  gm->add_option("--q", q);
  gm->add_option("--replicas", replicas);
  gm->add_option("--resolution", resolution);

  auto* cg = app.add_subcommand("cov-gap", "covariance vs log-kernel gap");
  add_common(cg, c);
  cg->add_option("--y", y)->required();

  auto* kh = app.add_subcommand("kahane", "randomized dominated-kernel moment comparison");
  add_common(kh, c);
  kh->add_option("--gridsize", gridsize);
  kh->add_option("--q", q);
  kh->add_option("--replicas", replicas);
  kh->add_option("--trials", trials);

  CLI11_PARSE(app, argc, argv);

  try {
    if (md->parsed()) return cmd_moment_decay(c, xs, qs, replicas);
    if (lb->parsed()) return cmd_lemma_budget(c, xs, qs, replicas);
    if (l13->parsed()) return cmd_lemma13(c, ys, qs, replicas, eps);
    if (id->parsed()) return cmd_identities(c, x, y, replicas ? replicas : 100000);
    if (ct->parsed()) return cmd_count(c, xi, yi, alpha, window);
    if (fd->parsed()) return cmd_field(c, y, sigma, tmin, tmax, step);
    if (sm->parsed()) return cmd_sums(c, n, y);
    if (ig->parsed()) return cmd_integral(c, y, eps);
    if (pv->parsed()) return cmd_parseval(c, y, ntrunc, pv_tmax);
    if (gm->parsed()) return cmd_gmc(c, y, q, replicas ? replicas : 2000, resolution);
    if (cg->parsed()) return cmd_cov_gap(c, y);
    if (kh->parsed()) return cmd_kahane(c, gridsize, q, replicas ? replicas : 20000, trials);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

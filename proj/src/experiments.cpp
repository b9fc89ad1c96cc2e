#include "steinlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "steinlab/euler_field.hpp"
#include "steinlab/multiplicative.hpp"
#include "steinlab/parallel.hpp"
#include "steinlab/stats.hpp"

namespace steinlab {

namespace {

std::string detail(double got, double want, const char* rel) {
  std::ostringstream ss;
  ss << got << ' ' << rel << ' ' << want;
  return ss.str();
}

MomentEstimate make_row(std::string quantity, double x_or_y, double q, const MeanEstimate& e,
                        const ExperimentConfig& cfg) {
  return {std::move(quantity), x_or_y, q, e.mean, e.ci_lo(), e.ci_hi(), e.n, cfg.seed};
}

// E[|S_x|^{2q}]: one table per replica, every grid point read off the same
// table; slot-ordered reduction keeps the result worker-count independent.
std::vector<std::vector<double>> sample_sq_partial_sums(const ExperimentConfig& cfg,
                                                        const std::vector<double>& xs) {
  double x_max = *std::max_element(xs.begin(), xs.end());
  auto primes = make_prime_table(static_cast<uint64_t>(std::floor(x_max)));
  PhaseAssignment base(cfg.seed, primes);
  std::vector<std::vector<double>> sq(xs.size(), std::vector<double>(cfg.replicas));
  parallel_for(cfg.replicas, cfg.workers, [&](size_t k) {
    PhaseAssignment a = base.with_seed(replica_seed(cfg.seed, k));
    MultiplicativeTable table(a, static_cast<uint64_t>(std::floor(x_max)));
    for (size_t i = 0; i < xs.size(); ++i)
      sq[i][k] = std::norm(partial_sum(table, xs[i]).value);
  });
  return sq;
}

MeanEstimate power_moment(const std::vector<double>& sq, double q) {
  std::vector<double> v(sq.size());
  for (size_t i = 0; i < sq.size(); ++i) v[i] = std::pow(sq[i], q);
  return mean_estimate(v);
}

// E[I_y^q]; heavy-tailed for q near 1, so those aggregate as a median of
// batch means instead of a plain average.
MeanEstimate integral_moment(double q, const std::vector<double>& values) {
  std::vector<double> v(values.size());
  for (size_t i = 0; i < values.size(); ++i) v[i] = std::pow(values[i], q);
  if (q >= 0.75 && values.size() >= 64) {
    BatchMedianEstimate b = median_of_batch_means(v, 32);
    MeanEstimate out;
    out.mean = b.estimate;
    out.se = (b.ci_hi - b.ci_lo) / (2.0 * 1.96);
    out.n = b.n;
    return out;
  }
  return mean_estimate(v);
}

std::vector<double> sample_integral_values(const ExperimentConfig& cfg, double y,
                                           size_t& flagged) {
  auto primes = make_prime_table(static_cast<uint64_t>(std::ceil(y)) + 1);
  PhaseAssignment base(cfg.seed, primes);
  IntegralOptions opts;
  opts.eps = cfg.quad_eps;
  std::vector<double> values(cfg.replicas);
  std::vector<uint8_t> flags(cfg.replicas, 0);
  parallel_for(cfg.replicas, cfg.workers, [&](size_t k) {
    PhaseAssignment a = base.with_seed(replica_seed(cfg.seed, k));
    IntegralFunctional f = integral_functional(a, y, opts);
    values[k] = f.value;
    flags[k] = f.tail_ok ? 0 : 1;
  });
  flagged = 0;
  for (uint8_t f : flags) flagged += f;
  return values;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.experiment = j.value("experiment", "");
  cfg.x_grid = j.value("x_grid", std::vector<double>{});
  cfg.y_grid = j.value("y_grid", std::vector<double>{});
  cfg.y_rule = j.value("y_rule", cfg.y_rule);
  cfg.q_list = j.value("q_list", std::vector<double>{});
  cfg.delta = j.value("delta", cfg.delta);
  cfg.replicas = j.value("replicas", cfg.replicas);
  if (j.contains("seed")) {
    cfg.seed.master = j["seed"].value("master", 0ull);
    cfg.seed.replica = j["seed"].value("replica", 0ull);
  }
  cfg.out_path = j.value("out_path", "");
  cfg.format = j.value("format", cfg.format);
  cfg.t_exponent = j.value("t_exponent", cfg.t_exponent);
  cfg.quad_eps = j.value("quad_eps", cfg.quad_eps);
  cfg.remainder_log_power = j.value("remainder_log_power", cfg.remainder_log_power);
  cfg.remainder_decay = j.value("remainder_decay", cfg.remainder_decay);
  cfg.workers = j.value("workers", 0u);
  return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
  return nlohmann::json{{"experiment", experiment},
                        {"x_grid", x_grid},
                        {"y_grid", y_grid},
                        {"y_rule", y_rule},
                        {"q_list", q_list},
                        {"delta", delta},
                        {"replicas", replicas},
                        {"seed", {{"master", seed.master}, {"replica", seed.replica}}},
                        {"out_path", out_path},
                        {"format", format},
                        {"t_exponent", t_exponent},
                        {"quad_eps", quad_eps},
                        {"remainder_log_power", remainder_log_power},
                        {"remainder_decay", remainder_decay},
                        {"workers", workers}};
}

void ExperimentConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("config: delta must lie in (0, 1)");
  for (double q : q_list)
    if (q < 0.0 || q > 1.0 - delta + 1e-12)
      throw std::domain_error("config: q_list must lie within [0, 1 - delta]");
  for (size_t i = 1; i < x_grid.size(); ++i)
    if (!(x_grid[i] > x_grid[i - 1]))
      throw std::domain_error("config: x_grid must be strictly ascending");
  if (replicas < 100) throw std::domain_error("config: replicas must be >= 100");
  if (format != "csv" && format != "json")
    throw std::domain_error("config: format must be csv or json");
}

double ExperimentConfig::y_for_x(double x) const {
  if (y_rule == "logx-over-loglogx-sq") {
    if (!(x >= 3.0)) throw std::domain_error("y rule needs x >= 3");
    double ll = std::log(std::log(x));
    double y = std::exp(std::log(x) / (ll * ll));
    return std::max(2.0, y);
  }
  throw std::domain_error("unknown y rule: " + y_rule);
}

MomentDecayResult run_moment_decay(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.x_grid.empty() || cfg.q_list.empty())
    throw std::domain_error("moment-decay: x_grid and q_list must be nonempty");
  MomentDecayResult out;
  auto sq = sample_sq_partial_sums(cfg, cfg.x_grid);

  std::vector<MeanEstimate> second(cfg.x_grid.size());
  for (size_t i = 0; i < cfg.x_grid.size(); ++i) {
    second[i] = mean_estimate(sq[i]);
    out.second_moment.push_back(make_row("|S_x|^2", cfg.x_grid[i], 1.0, second[i], cfg));
  }

  std::vector<std::vector<MeanEstimate>> by_q(cfg.q_list.size());
  for (size_t qi = 0; qi < cfg.q_list.size(); ++qi) {
    for (size_t i = 0; i < cfg.x_grid.size(); ++i) {
      MeanEstimate e = power_moment(sq[i], cfg.q_list[qi]);
      by_q[qi].push_back(e);
      out.estimates.push_back(make_row("|S_x|^2q", cfg.x_grid[i], cfg.q_list[qi], e, cfg));
    }
  }

  // q = 0 degenerates to the constant 1 with zero variance.
  for (size_t qi = 0; qi < cfg.q_list.size(); ++qi) {
    if (cfg.q_list[qi] != 0.0) continue;
    bool ok = true;
    for (const auto& e : by_q[qi]) ok = ok && e.mean == 1.0 && e.se == 0.0;
    out.checks.push_back({"zeroth_moment_exact", ok, ok ? "all 1 +- 0" : "nonconstant"});
  }

  // The second moment has the exact value floor(x)/x.
  {
    bool ok = true;
    std::string why = "within 3 standard errors";
    for (size_t i = 0; i < cfg.x_grid.size(); ++i) {
      double target = std::floor(cfg.x_grid[i]) / cfg.x_grid[i];
      double dev = std::abs(second[i].mean - target);
      if (dev > 3.0 * std::max(second[i].se, 1e-15)) {
        ok = false;
        why = detail(dev, 3.0 * second[i].se, ">");
      }
    }
    out.checks.push_back({"second_moment_identity", ok, why});
  }

  // Fractional moments cannot exceed the q-th power of the second moment.
  {
    bool ok = true;
    std::string why = "E|S|^2q <= (E|S|^2)^q + 4 se";
    for (size_t qi = 0; qi < cfg.q_list.size(); ++qi) {
      double q = cfg.q_list[qi];
      if (q <= 0.0) continue;
      for (size_t i = 0; i < cfg.x_grid.size(); ++i) {
        double cap = std::pow(second[i].mean, q);
        double slack = 4.0 * (by_q[qi][i].se +
                              q * std::pow(second[i].mean, q - 1.0) * second[i].se);
        if (by_q[qi][i].mean > cap + slack) {
          ok = false;
          why = detail(by_q[qi][i].mean, cap + slack, ">");
        }
      }
    }
    out.checks.push_back({"power_mean_bound", ok, why});
  }

  // log E|S_x|^{2q} is convex in q.
  if (cfg.q_list.size() >= 3) {
    bool ok = true;
    std::string why = "convex within CI slack";
    for (size_t qi = 0; qi + 2 < cfg.q_list.size(); ++qi) {
      double q1 = cfg.q_list[qi], q2 = cfg.q_list[qi + 1], q3 = cfg.q_list[qi + 2];
      if (q1 <= 0.0) continue;  // the q = 0 column is deterministic anyway
      double lam = (q3 - q2) / (q3 - q1);
      for (size_t i = 0; i < cfg.x_grid.size(); ++i) {
        const auto &e1 = by_q[qi][i], &e2 = by_q[qi + 1][i], &e3 = by_q[qi + 2][i];
        double lhs = std::log(e2.mean);
        double rhs = lam * std::log(e1.mean) + (1.0 - lam) * std::log(e3.mean);
        double slack = 4.0 * (e2.se / e2.mean + lam * e1.se / e1.mean +
                              (1.0 - lam) * e3.se / e3.mean);
        if (lhs > rhs + slack) {
          ok = false;
          why = detail(lhs, rhs + slack, ">");
        }
      }
    }
    out.checks.push_back({"log_convex_in_q", ok, why});
  }

  return out;
}

LemmaBudgetResult run_lemma_budget(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.x_grid.empty() || cfg.q_list.empty())
    throw std::domain_error("lemma-budget: x_grid and q_list must be nonempty");
  LemmaBudgetResult out;

  for (size_t xi = 0; xi < cfg.x_grid.size(); ++xi) {
    double x = cfg.x_grid[xi];
    double y = (cfg.y_grid.size() == cfg.x_grid.size()) ? cfg.y_grid[xi] : cfg.y_for_x(x);
    if (!(y >= 2.0) || !(y <= std::sqrt(x)))
      throw std::domain_error("lemma-budget: y must lie in [2, sqrt(x)]");

    std::vector<double> one_x{x};
    auto sq = sample_sq_partial_sums(cfg, one_x);
    size_t flagged = 0;
    auto integrals = sample_integral_values(cfg, y, flagged);

    // Per-sample head/tail split of the rough m-sum at m = x^{t_exponent},
    // evaluated on the base seed: Sum m^{-1} |S_{x/m,y}|^2 = (1/x) Sum
    // |P(floor(x/m))|^2 over rough m, with P the smooth prefix sum.
    double split_head = 0.0, split_tail = 0.0;
    {
      auto xi_int = static_cast<uint64_t>(std::floor(x));
      auto primes = make_prime_table(xi_int);
      PhaseAssignment a(cfg.seed, primes);
      MultiplicativeTable table(a, xi_int);
      SmoothMask mask(table, y);
      double t_split = std::pow(x, cfg.t_exponent);
      uint64_t last_r = 0;
      double last_sq = 0.0;
      for (uint64_t m = 2; m <= xi_int; ++m) {
        if (static_cast<double>(table.primes().spf(m)) <= y) continue;
        uint64_t r = xi_int / m;
        if (r != last_r) {
          last_r = r;
          last_sq = std::norm(mask.sum_upto(table, r));
        }
        if (static_cast<double>(m) <= t_split)
          split_head += last_sq;
        else
          split_tail += last_sq;
      }
      split_head /= x;
      split_tail /= x;
    }

    for (double q : cfg.q_list) {
      LemmaBudgetRecord rec;
      rec.x = x;
      rec.y = y;
      rec.q = q;
      MeanEstimate lhs = power_moment(sq[0], q);
      rec.lhs = lhs.mean;
      rec.lhs_se = lhs.se;
      MeanEstimate im = integral_moment(q, integrals);
      rec.rhs_integral = im.mean;
      rec.rhs_integral_se = im.se;
      rec.rhs_remainder = std::pow(std::pow(std::log(y), cfg.remainder_log_power) *
                                       std::exp(-cfg.remainder_decay * std::log(x) / std::log(y)),
                                   q);
      rec.ratio = rec.lhs / (rec.rhs_integral + rec.rhs_remainder);
      rec.split_head = split_head;
      rec.split_tail = split_tail;
      out.records.push_back(rec);

      out.estimates.push_back(make_row("|S_x|^2q", x, q, lhs, cfg));
      out.estimates.push_back(make_row("I_y^q", y, q, im, cfg));
      MeanEstimate ratio_e;
      ratio_e.mean = rec.ratio;
      ratio_e.se = 0.0;
      ratio_e.n = cfg.replicas;
      out.estimates.push_back(make_row("budget_ratio", x, q, ratio_e, cfg));
    }
  }

  bool finite = true;
  for (const auto& r : out.records)
    if (!std::isfinite(r.ratio) || r.ratio <= 0.0) finite = false;
  out.checks.push_back({"ratio_finite", finite, finite ? "all finite" : "degenerate ratio"});
  return out;
}

Lemma13Result run_lemma13(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.y_grid.empty() || cfg.q_list.empty())
    throw std::domain_error("lemma13: y_grid and q_list must be nonempty");
  Lemma13Result out;
  out.flagged_replicas = 0;

  std::vector<std::vector<double>> normalized_by_q(cfg.q_list.size());
  for (double y : cfg.y_grid) {
    if (!(y >= 3.0)) throw std::domain_error("lemma13: y must be >= 3");
    size_t flagged = 0;
    auto values = sample_integral_values(cfg, y, flagged);
    out.flagged_replicas += flagged;
    for (size_t qi = 0; qi < cfg.q_list.size(); ++qi) {
      double q = cfg.q_list[qi];
      MeanEstimate im = integral_moment(q, values);
      double scale = std::pow(std::log(std::log(y)), 0.5 * q);
      MeanEstimate scaled;
      scaled.mean = im.mean * scale;
      scaled.se = im.se * scale;
      scaled.n = im.n;
      normalized_by_q[qi].push_back(scaled.mean);
      out.estimates.push_back(make_row("I_y^q_scaled", y, q, scaled, cfg));
    }
  }

  for (size_t qi = 0; qi < cfg.q_list.size(); ++qi) {
    if (cfg.q_list[qi] == 0.0) {
      bool ok = true;
      for (double v : normalized_by_q[qi]) ok = ok && v == 1.0;
      out.checks.push_back({"zeroth_moment_exact", ok, ok ? "all 1" : "nonconstant"});
    }
    if (cfg.q_list[qi] == 0.5 && normalized_by_q[qi].size() >= 2) {
      auto [lo, hi] = std::minmax_element(normalized_by_q[qi].begin(), normalized_by_q[qi].end());
      bool ok = *hi <= 3.0 * *lo;
      out.checks.push_back({"factor3_band_q_half", ok, detail(*hi / *lo, 3.0, ok ? "<=" : ">")});
    }
  }
  bool tails = out.flagged_replicas == 0;
  out.checks.push_back({"quadrature_tails_ok", tails,
                        tails ? "no flags" : std::to_string(out.flagged_replicas) + " flagged"});
  return out;
}

std::vector<std::string> emit(const ExperimentConfig& cfg,
                              std::span<const MomentEstimate> rows) {
  if (cfg.out_path.empty()) throw std::domain_error("emit: out_path is empty");
  std::vector<std::string> written;
  std::string csv_path = cfg.out_path + ".csv";
  write_text_file(csv_path, to_csv(rows));
  written.push_back(csv_path);
  std::string json_path = cfg.out_path + ".json";
  nlohmann::json doc{{"config", cfg.to_json()}, {"records", to_json(rows)}};
  write_text_file(json_path, doc.dump(2) + "\n");
  written.push_back(json_path);
  return written;
}

}  // namespace steinlab

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "steinlab/io.hpp"
#include "steinlab/rng.hpp"

namespace steinlab {

// Reproducible description of one experiment run. The y rule ties the Euler
// product cutoff to the partial-sum length; the default is
// log y = log x / (log log x)^2.
struct ExperimentConfig {
  std::string experiment;
  std::vector<double> x_grid;
  std::vector<double> y_grid;               // explicit cutoffs (lemma13, or overrides)
  std::string y_rule = "logx-over-loglogx-sq";
  std::vector<double> q_list;
  double delta = 0.1;                       // q_list must stay within [0, 1 - delta]
  size_t replicas = 1000;
  Seed seed;
  std::string out_path;
  std::string format = "csv";               // stdout format; emit writes both files
  double t_exponent = 0.75;                 // head/tail split point x^t_exponent
  double quad_eps = 1e-3;                   // tail criterion for the integral functional
  double remainder_log_power = 1.0;         // C in ((log y)^C e^{-c log x / log y})^q
  double remainder_decay = 1.0;             // c
  unsigned workers = 0;                     // 0 -> STEINLAB_WORKERS or hardware

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
  double y_for_x(double x) const;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

inline bool all_pass(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

// Moment decay of the normalized partial sums: per x in the grid and q in the
// q-list, E[|S_x|^{2q}] with a 95% CI, plus built-in estimator sanity checks
// (the q = 1 column has the exact value floor(x)/x, fractional moments obey
// the power-mean bound and log-convexity in q within CI slack).
struct MomentDecayResult {
  std::vector<MomentEstimate> estimates;
  std::vector<MomentEstimate> second_moment;  // internal q = 1 column
  std::vector<CheckResult> checks;
};

MomentDecayResult run_moment_decay(const ExperimentConfig& cfg);

// Budget comparison: E[|S_x|^{2q}] against the integral-functional moment
// plus the smooth-remainder term, with the implied-constant ratio
//   lhs / (E[I_y^q] + ((log y)^C e^{-c log x / log y})^q)
// and a per-sample head/tail split of the rough m-sum at m = x^{t_exponent}.
struct LemmaBudgetRecord {
  double x = 0.0;
  double y = 0.0;
  double q = 0.0;
  double lhs = 0.0;
  double lhs_se = 0.0;
  double rhs_integral = 0.0;
  double rhs_integral_se = 0.0;
  double rhs_remainder = 0.0;
  double ratio = 0.0;
  double split_head = 0.0;
  double split_tail = 0.0;
};

struct LemmaBudgetResult {
  std::vector<LemmaBudgetRecord> records;
  std::vector<MomentEstimate> estimates;  // lhs, integral moment and ratio rows
  std::vector<CheckResult> checks;
};

LemmaBudgetResult run_lemma_budget(const ExperimentConfig& cfg);

// Scaled moments of the integral functional across the y grid:
// E[I_y^q] * (log log y)^{q/2}, flagged if any replica missed its quadrature
// tail criterion. Moments with q >= 3/4 aggregate as median of batch means.
struct Lemma13Result {
  std::vector<MomentEstimate> estimates;
  size_t flagged_replicas = 0;
  std::vector<CheckResult> checks;
};

Lemma13Result run_lemma13(const ExperimentConfig& cfg);

// Writes <out_path>.csv and <out_path>.json; byte-stable given identical
// inputs. Returns the written paths.
std::vector<std::string> emit(const ExperimentConfig& cfg,
                              std::span<const MomentEstimate> rows);

}  // namespace steinlab

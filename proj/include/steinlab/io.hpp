#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "steinlab/rng.hpp"

namespace steinlab {

// One estimate row of an experiment table.
struct MomentEstimate {
  std::string quantity;
  double x_or_y = 0.0;
  double q = 0.0;
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  uint64_t replicas = 0;
  Seed seed;
};

// Shortest-round-trip decimal rendering ("%.17g"); identical inputs give
// identical bytes.
std::string format_double(double v);

std::string to_csv(std::span<const MomentEstimate> rows);
std::vector<MomentEstimate> parse_csv(const std::string& text);

nlohmann::json to_json(const MomentEstimate& row);
nlohmann::json to_json(std::span<const MomentEstimate> rows);

// Generic record for identity/bound checks: {op, params, seed, estimate,
// stderr, replicas}.
nlohmann::json op_record(const std::string& op, const nlohmann::json& params, Seed seed,
                         const nlohmann::json& estimate, double standard_error,
                         uint64_t replicas);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace steinlab

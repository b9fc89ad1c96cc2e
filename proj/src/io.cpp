#include "steinlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace steinlab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string to_csv(std::span<const MomentEstimate> rows) {
  std::string out = "quantity,x_or_y,q,estimate,ci_lo,ci_hi,replicas,seed\n";
  for (const auto& r : rows) {
    out += r.quantity;
    out += ',';
    out += format_double(r.x_or_y);
    out += ',';
    out += format_double(r.q);
    out += ',';
    out += format_double(r.estimate);
    out += ',';
    out += format_double(r.ci_lo);
    out += ',';
    out += format_double(r.ci_hi);
    out += ',';
    out += std::to_string(r.replicas);
    out += ',';
    out += std::to_string(r.seed.master) + ":" + std::to_string(r.seed.replica);
    out += '\n';
  }
  return out;
}

std::vector<MomentEstimate> parse_csv(const std::string& text) {
  std::vector<MomentEstimate> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 8) throw std::runtime_error("parse_csv: malformed row: " + line);
    MomentEstimate r;
    r.quantity = fields[0];
    r.x_or_y = std::stod(fields[1]);
    r.q = std::stod(fields[2]);
    r.estimate = std::stod(fields[3]);
    r.ci_lo = std::stod(fields[4]);
    r.ci_hi = std::stod(fields[5]);
    r.replicas = std::stoull(fields[6]);
    auto colon = fields[7].find(':');
    if (colon == std::string::npos) throw std::runtime_error("parse_csv: malformed seed");
    r.seed.master = std::stoull(fields[7].substr(0, colon));
    r.seed.replica = std::stoull(fields[7].substr(colon + 1));
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json to_json(const MomentEstimate& row) {
  return nlohmann::json{{"quantity", row.quantity}, {"x_or_y", row.x_or_y},
                        {"q", row.q},               {"estimate", row.estimate},
                        {"ci_lo", row.ci_lo},       {"ci_hi", row.ci_hi},
                        {"replicas", row.replicas},
                        {"seed", {{"master", row.seed.master}, {"replica", row.seed.replica}}}};
}

nlohmann::json to_json(std::span<const MomentEstimate> rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  return arr;
}

nlohmann::json op_record(const std::string& op, const nlohmann::json& params, Seed seed,
                         const nlohmann::json& estimate, double standard_error,
                         uint64_t replicas) {
  return nlohmann::json{{"op", op},
                        {"params", params},
                        {"seed", {{"master", seed.master}, {"replica", seed.replica}}},
                        {"estimate", estimate},
                        {"stderr", standard_error},
                        {"replicas", replicas}};
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace steinlab

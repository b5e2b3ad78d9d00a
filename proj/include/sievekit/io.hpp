#pragma once

// Serialization shared by the command-line tool and its tests: the
// trade-off CSV format, flat JSON report assembly, seeded filter-code
// specs (the seed regenerates the matrices, so only the shape is stored),
// and whole-file helpers for basis I/O.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sievekit/costmodel.hpp"
#include "sievekit/rpc.hpp"

namespace sievekit::io {

using Json = nlohmann::json;

// Header `M,tau,gamma,mu`, six decimals, LF endings.
inline std::string emit_curve_csv(const std::vector<costmodel::TradeoffRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("emit_curve_csv: no rows");
  std::string out = "M,tau,gamma,mu\n";
  char line[128];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f,%.6f\n", r.m, r.tau, r.gamma, r.mu);
    out += line;
  }
  return out;
}

inline std::vector<costmodel::TradeoffRow> parse_curve_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "M,tau,gamma,mu")
    throw std::invalid_argument("parse_curve_csv: missing header");
  std::vector<costmodel::TradeoffRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    costmodel::TradeoffRow r;
    char trail;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf%c", &r.m, &r.tau, &r.gamma, &r.mu,
                    &trail) != 4)
      throw std::invalid_argument("parse_curve_csv: malformed row: " + line);
    rows.push_back(r);
  }
  if (rows.empty()) throw std::invalid_argument("parse_curve_csv: no rows");
  return rows;
}

inline Json rpc_spec_json(const rpc::RpcSpec& s) {
  return Json{{"d", s.d}, {"m", s.m}, {"B", s.B}, {"alpha_rad", s.alpha_rad}, {"seed", s.seed}};
}

inline rpc::RpcSpec rpc_spec_from_json(const Json& j) {
  rpc::RpcSpec s;
  s.d = j.at("d").get<std::size_t>();
  s.m = j.at("m").get<std::size_t>();
  s.B = j.at("B").get<std::size_t>();
  s.alpha_rad = j.at("alpha_rad").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

// Report envelope. Keys are emitted sorted (Json is map-backed), so a fixed
// command line and seed produce byte-identical text apart from the timing
// subobject.
inline std::string report_text(const std::string& command, Json params, Json results,
                               Json timing) {
  Json r;
  r["schema_version"] = 1;
  r["command"] = command;
  r["params"] = std::move(params);
  r["results"] = std::move(results);
  r["timing"] = std::move(timing);
  return r.dump(2) + "\n";
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace sievekit::io

#pragma once

// Report envelope (JSON) and flat CSV tables. Nothing time-dependent goes
// into either, so equal configs give equal bytes.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lorenz/config.hpp"
#include "lorenz/errors.hpp"
#include "lorenz/model.hpp"
#include "lorenz/pressure.hpp"
#include "lorenz/spectrum.hpp"

namespace lorenz {

using nlohmann::json;

inline constexpr const char* kToolName = "lorenz_cli";
inline constexpr const char* kToolVersion = "0.3.0";

inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// JSON has no infinity; non-finite values are written as strings.
inline json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

inline json make_envelope(const std::string& command, const RunConfig& cfg, json results) {
  const std::string text = to_text(cfg);
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"command", command},
          {"config", {{"hash", "fnv1a64:" + fnv1a_hex(text)}, {"text", text}}},
          {"timestamp", "excluded"},
          {"results", std::move(results)}};
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kMeasureCsvHeader =
    "measure_id,entropy_map,mean_roof,h_flow,integral,pressure,ball_fraction,hypothesis_flag";

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline std::string measure_csv(const std::vector<GapRow>& rows) {
  std::string out = std::string(kMeasureCsvHeader) + "\n";
  for (const auto& r : rows)
    out += csv_field(r.id) + "," + csv_number(r.entropy_map) + "," + csv_number(r.mean_roof) + "," +
           csv_number(r.h_flow) + "," + csv_number(r.integral) + "," + csv_number(r.pressure) + "," +
           csv_number(r.ball_fraction) + "," + (r.hypothesis ? "true" : "false") + "\n";
  return out;
}

inline json row_json(const GapRow& r) {
  return {{"measure_id", r.id},        {"probe", r.probe},          {"entropy_map", number(r.entropy_map)},
          {"mean_roof", number(r.mean_roof)}, {"h_flow", number(r.h_flow)}, {"integral", number(r.integral)},
          {"pressure", number(r.pressure)},   {"ball_fraction", number(r.ball_fraction)},
          {"hypothesis_flag", r.hypothesis}};
}

// ---------------------------------------------------------------------------
// Result documents

inline json to_json(const ModelValidationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"pass", c.pass()},
                      {"analytic_pass", c.analytic_pass},
                      {"grid_pass", c.grid_pass},
                      {"measured", number(c.measured)},
                      {"bound", number(c.bound)},
                      {"detail", c.detail}});
  return {{"alpha", r.alpha},
          {"beta", r.beta},
          {"rho", r.rho},
          {"c_H", r.c_H},
          {"grid_density", r.grid_density},
          {"min_derivative", number(r.min_derivative)},
          {"max_abs_f", number(r.max_abs_f)},
          {"max_fiber_partial", number(r.max_fiber_partial)},
          {"all_pass", r.all_pass()},
          {"checks", std::move(checks)}};
}

inline json to_json(const PressureEstimate& e) {
  json params = json::object();
  for (const auto& [k, v] : e.params) params[k] = number(v);
  return {{"value", number(e.value)}, {"method", e.method}, {"params", std::move(params)}, {"slack", number(e.slack)}};
}

inline json to_json(const GapReport& g) {
  json rows = json::array();
  for (const auto& r : g.rows) rows.push_back(row_json(r));
  return {{"level_L", g.level},
          {"eta", g.eta},
          {"slack", g.slack},
          {"delta_pressure", number(g.delta_pressure)},
          {"sup", number(g.sup)},
          {"sup_id", g.sup_id},
          {"half_L", g.level / 2.0},
          {"gap", number(g.gap)},
          {"violations", g.violations},
          {"verdict", g.verdict()},
          {"rows", std::move(rows)}};
}

inline json to_json(const PressureSpectrumReport& s) {
  json pts = json::array();
  for (const auto& p : s.points) pts.push_back({{"measure_id", p.id}, {"pressure", number(p.pressure)}});
  return {{"P_inf_est", number(s.P_inf_est)},
          {"P_top_est", number(s.P_top_est)},
          {"largest_gap", number(s.gap)},
          {"gap_lo", number(s.gap_lo)},
          {"gap_hi", number(s.gap_hi)},
          {"gap_lo_id", s.gap_lo_id},
          {"gap_hi_id", s.gap_hi_id},
          {"points", std::move(pts)}};
}

// ---------------------------------------------------------------------------
// Emission

/// Output directory: LORENZ_OUTPUT_DIR wins over the config value.
inline std::string output_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("LORENZ_OUTPUT_DIR"); env && *env) return env;
  return cfg.output_dir;
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorKind::Config, "cannot write output file '" + p.string() + "'");
  out << content;
}

struct Emitted {
  std::vector<std::string> files;
};

/// Writes <dir>/<stem>.json and, when a table is given, <dir>/<stem>.csv,
/// honouring output.format. Returns the paths written.
inline Emitted emit(const RunConfig& cfg, const std::string& stem, const json& envelope,
                    const std::optional<std::string>& csv = std::nullopt) {
  Emitted e;
  const std::string dir = output_dir(cfg);
  if (dir.empty()) return e;
  const std::filesystem::path base(dir);
  if (cfg.output_format != "csv") {
    write_file(base / (stem + ".json"), dump(envelope));
    e.files.push_back((base / (stem + ".json")).string());
  }
  if (csv && cfg.output_format != "json") {
    write_file(base / (stem + ".csv"), *csv);
    e.files.push_back((base / (stem + ".csv")).string());
  }
  return e;
}

}  // namespace lorenz

#pragma once

// key = value run configuration. '#' starts a comment, keys are dotted,
// every key is known in advance and anything else is rejected with the
// offending line.

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lorenz/catalog.hpp"
#include "lorenz/errors.hpp"
#include "lorenz/model.hpp"
#include "lorenz/pressure.hpp"
#include "lorenz/spectrum.hpp"

namespace lorenz {

struct RunConfig {
  double alpha = 1.0;
  double beta = 1.7;
  double rho = 0.3;
  double c_H = 0.5;
  double c0 = 1.0;
  double c1 = 1.0;
  double eta0 = 0.05;
  int grid_density = 2000;  // validator sample count

  CatalogRecipe catalog;
  std::string potential = "coord:x";
  Level level = Level::Map;

  int transfer_depth = 12;
  double bounds_slack = 0.02;
  int separated_n = 18;
  double separated_eps = 1e-3;

  double realize_tolerance = 1e-3;
  std::vector<ScheduleEntry> realize_schedule = default_schedule();

  double gap_eta = 0.1;
  double gap_margin = 0.05;
  double gap_slack = kDefaultGapSlack;

  std::string output_dir;     // empty: no files
  std::string output_format = "both";  // json | csv | both

  LorenzMap1D map() const { return {alpha, beta}; }
  SkewProductReturnMap return_map() const { return {map(), rho, c_H}; }
  RoofFunction roof() const { return {c0, c1, eta0}; }
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline double to_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty()) throw std::invalid_argument("expected a number, got '" + s + "'");
  return v;
}

inline int to_int(const std::string& s) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty()) throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

inline bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("expected true/false, got '" + s + "'");
}

// Shortest text that reads back to the same double.
inline std::string exact(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, p) : std::string("nan");
}

inline Tilt to_tilt(const std::string& s) {
  if (s == "coord") return Tilt::Coordinate;
  if (s == "sing") return Tilt::Singular;
  throw std::invalid_argument("tilt must be coord or sing, got '" + s + "'");
}

// "depth, x_gap, tilt, t1 t2 ..." entries separated by ';'
inline std::vector<HorseshoeSpec> to_horseshoes(const std::string& s) {
  std::vector<HorseshoeSpec> out;
  if (trim(s).empty()) return out;
  for (const auto& item : split(s, ';')) {
    if (item.empty()) continue;
    const auto f = split(item, ',');
    if (f.size() != 4) throw std::invalid_argument("horseshoe entry needs 'depth, x_gap, tilt, t-values': '" + item + "'");
    HorseshoeSpec h{to_int(f[0]), to_double(f[1]), {}, to_tilt(f[2])};
    std::istringstream ts(f[3]);
    std::string t;
    while (ts >> t) h.t_values.push_back(to_double(t));
    if (h.t_values.empty()) throw std::invalid_argument("horseshoe entry has no t-values: '" + item + "'");
    out.push_back(std::move(h));
  }
  return out;
}

inline std::string from_horseshoes(const std::vector<HorseshoeSpec>& hs) {
  std::string out;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (i) out += "; ";
    out += std::to_string(hs[i].depth) + ", " + exact(hs[i].x_gap) + ", " + to_string(hs[i].tilt) + ",";
    for (double t : hs[i].t_values) out += " " + exact(t);
  }
  return out;
}

inline std::vector<ScheduleEntry> to_schedule(const std::string& s) {
  std::vector<ScheduleEntry> out;
  for (const auto& item : split(s, ';')) {
    if (item.empty()) continue;
    const auto f = split(item, ',');
    if (f.size() != 2) throw std::invalid_argument("schedule entry needs 'depth, x_gap': '" + item + "'");
    out.push_back({to_int(f[0]), to_double(f[1])});
  }
  if (out.empty()) throw std::invalid_argument("schedule is empty");
  return out;
}

inline std::string from_schedule(const std::vector<ScheduleEntry>& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += "; ";
    out += std::to_string(s[i].depth) + ", " + exact(s[i].x_gap);
  }
  return out;
}

inline std::vector<std::string> to_words(const std::string& s) {
  std::vector<std::string> out;
  for (const auto& w : split(s, ','))
    if (!w.empty()) out.push_back(SymbolWord::parse(w).str());
  return out;
}

inline std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field num(T RunConfig::*p) {
  if constexpr (std::is_same_v<T, int>)
    return {[p](RunConfig& c, const std::string& v) { c.*p = to_int(v); },
            [p](const RunConfig& c) { return std::to_string(c.*p); }};
  else
    return {[p](RunConfig& c, const std::string& v) { c.*p = to_double(v); },
            [p](const RunConfig& c) { return exact(c.*p); }};
}

// Ordered: to_text() walks this table, so the echo is canonical.
inline const std::vector<std::pair<std::string, Field>>& config_fields() {
  static const std::vector<std::pair<std::string, Field>> f = {
      {"model.alpha", num(&RunConfig::alpha)},
      {"model.beta", num(&RunConfig::beta)},
      {"model.rho", num(&RunConfig::rho)},
      {"model.c_H", num(&RunConfig::c_H)},
      {"model.grid_density", num(&RunConfig::grid_density)},
      {"roof.c0", num(&RunConfig::c0)},
      {"roof.c1", num(&RunConfig::c1)},
      {"roof.eta0", num(&RunConfig::eta0)},
      {"catalog.max_period", {[](RunConfig& c, const std::string& v) { c.catalog.max_period = to_int(v); },
                              [](const RunConfig& c) { return std::to_string(c.catalog.max_period); }}},
      {"catalog.words", {[](RunConfig& c, const std::string& v) { c.catalog.extra_words = to_words(v); },
                         [](const RunConfig& c) { return join(c.catalog.extra_words, ", "); }}},
      {"catalog.horseshoes", {[](RunConfig& c, const std::string& v) { c.catalog.horseshoes = to_horseshoes(v); },
                              [](const RunConfig& c) { return from_horseshoes(c.catalog.horseshoes); }}},
      {"catalog.probes", {[](RunConfig& c, const std::string& v) { c.catalog.probes = to_bool(v); },
                          [](const RunConfig& c) { return std::string(c.catalog.probes ? "true" : "false"); }}},
      {"catalog.probe_min_period", {[](RunConfig& c, const std::string& v) { c.catalog.probe_min_period = to_int(v); },
                                    [](const RunConfig& c) { return std::to_string(c.catalog.probe_min_period); }}},
      {"catalog.probe_count", {[](RunConfig& c, const std::string& v) { c.catalog.probe_count = to_int(v); },
                               [](const RunConfig& c) { return std::to_string(c.catalog.probe_count); }}},
      {"catalog.probe_horseshoes",
       {[](RunConfig& c, const std::string& v) { c.catalog.probe_horseshoes = to_horseshoes(v); },
        [](const RunConfig& c) { return from_horseshoes(c.catalog.probe_horseshoes); }}},
      {"catalog.include_delta", {[](RunConfig& c, const std::string& v) { c.catalog.include_delta = to_bool(v); },
                                 [](const RunConfig& c) { return std::string(c.catalog.include_delta ? "true" : "false"); }}},
      {"potential", {[](RunConfig& c, const std::string& v) {
                       parse_potential(v);  // validate now, line-precise
                       c.potential = v;
                     },
                     [](const RunConfig& c) { return c.potential; }}},
      {"level", {[](RunConfig& c, const std::string& v) {
                   if (v == "map") c.level = Level::Map;
                   else if (v == "flow") c.level = Level::Flow;
                   else throw std::invalid_argument("level must be map or flow, got '" + v + "'");
                 },
                 [](const RunConfig& c) { return std::string(to_string(c.level)); }}},
      {"pressure.transfer_depth", num(&RunConfig::transfer_depth)},
      {"pressure.bounds_slack", num(&RunConfig::bounds_slack)},
      {"pressure.separated_n", num(&RunConfig::separated_n)},
      {"pressure.separated_eps", num(&RunConfig::separated_eps)},
      {"realize.tolerance", num(&RunConfig::realize_tolerance)},
      {"realize.schedule", {[](RunConfig& c, const std::string& v) { c.realize_schedule = to_schedule(v); },
                            [](const RunConfig& c) { return from_schedule(c.realize_schedule); }}},
      {"gap.eta", num(&RunConfig::gap_eta)},
      {"gap.margin", num(&RunConfig::gap_margin)},
      {"gap.slack", num(&RunConfig::gap_slack)},
      {"output.dir", {[](RunConfig& c, const std::string& v) { c.output_dir = v; },
                      [](const RunConfig& c) { return c.output_dir; }}},
      {"output.format", {[](RunConfig& c, const std::string& v) {
                           if (v != "json" && v != "csv" && v != "both")
                             throw std::invalid_argument("output.format must be json, csv or both, got '" + v + "'");
                           c.output_format = v;
                         },
                         [](const RunConfig& c) { return c.output_format; }}},
  };
  return f;
}

inline const Field* find_field(const std::string& key) {
  for (const auto& [k, f] : config_fields())
    if (k == key) return &f;
  return nullptr;
}

}  // namespace detail

/// Sets one key. Errors carry `where` (file:line) as a prefix.
inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value,
                             const std::string& where = "config") {
  const detail::Field* f = detail::find_field(key);
  if (!f) fail(ErrorKind::Config, where + ": unknown key '" + key + "'");
  try {
    f->set(c, value);
  } catch (const std::exception& e) {
    fail(ErrorKind::Config, where + ": key '" + key + "': " + e.what());
  }
}

inline RunConfig parse_config(const std::string& text, const std::string& name = "config") {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  std::map<std::string, int> seen;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = name + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Config, where + ": expected 'key = value', got '" + line + "'");
    const std::string key = detail::trim(line.substr(0, eq));
    if (auto it = seen.find(key); it != seen.end())
      fail(ErrorKind::Config, where + ": key '" + key + "' already set on line " + std::to_string(it->second));
    seen[key] = lineno;
    set_config_value(c, key, detail::trim(line.substr(eq + 1)), where);
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

/// Canonical echo: every key in table order. output.* keys only say where
/// files go, so they are left out and the echo (and its hash) is the same
/// wherever a run writes. parse_config(to_text(c)) reproduces every other
/// field.
inline std::string to_text(const RunConfig& c) {
  std::string out;
  for (const auto& [k, f] : detail::config_fields())
    if (k.rfind("output.", 0) != 0) out += k + " = " + f.get(c) + "\n";
  return out;
}

}  // namespace lorenz

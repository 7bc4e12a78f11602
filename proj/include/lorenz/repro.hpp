#pragma once

// Reproduction suites. Every expected value is computed from an oracle at
// run time (lap counts, the transfer estimate, the bump level); only the
// tolerances come from the expectations document.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "lorenz/catalog.hpp"
#include "lorenz/config.hpp"
#include "lorenz/errors.hpp"
#include "lorenz/measures.hpp"
#include "lorenz/parallel.hpp"
#include "lorenz/potential.hpp"
#include "lorenz/pressure.hpp"
#include "lorenz/report.hpp"
#include "lorenz/spectrum.hpp"
#include "lorenz/symbolic.hpp"

namespace lorenz {

using nlohmann::json;

inline const std::vector<std::string>& repro_suites() {
  static const std::vector<std::string> s{"entropy", "variational", "intermediate", "gap"};
  return s;
}

/// Tolerances and run sizes. configs/repro_expected.json carries the same
/// numbers; a test keeps the two in step.
inline json default_expectations() {
  return json::parse(R"({
  "entropy": {"transfer_depth": 12, "transfer_rel": 0.01, "separated_n": 18, "separated_eps": 0.001,
              "separated_rel": 0.05, "lap_max_n": 30, "lap_max_count": 2000000, "lap_window": 4},
  "variational": {"potentials": 20, "seed": 20240601, "knots": 33, "step": 0.15, "transfer_depth": 12,
                  "slack": 0.02, "family_depth": 14, "family_gap": 0.0001},
  "intermediate": {"targets": 9, "map_tol": 0.001, "flow_tol": 0.01},
  "gap": {"margin": 0.05, "eta": 0.1, "sup_slack": 0.01, "gap_slack": 0.02, "h_depth": 12}
})");
}

inline json load_expectations(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open expectations file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, "expectations file '" + path + "': " + e.what());
  }
}

struct Check {
  std::string name;
  std::string relation;  // "<=", ">=", "|d|<=", "=="
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline json to_json(const Check& c) {
  return {{"name", c.name},         {"relation", c.relation},     {"value", number(c.value)},
          {"expected", number(c.expected)}, {"tolerance", number(c.tolerance)}, {"pass", c.pass}};
}

struct SuiteResult {
  std::string suite;
  std::vector<Check> checks;
  json details = json::object();

  bool pass() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (!c.pass) out.push_back(suite + "/" + c.name);
    return out;
  }

  void near(const std::string& name, double value, double expected, double tol) {
    checks.push_back({name, "|d|<=", value, expected, tol, std::abs(value - expected) <= tol});
  }
  void at_most(const std::string& name, double value, double bound) {
    checks.push_back({name, "<=", value, bound, 0.0, value <= bound});
  }
  void at_least(const std::string& name, double value, double bound) {
    checks.push_back({name, ">=", value, bound, 0.0, value >= bound});
  }
  void holds(const std::string& name, bool ok) { checks.push_back({name, "==", ok ? 1.0 : 0.0, 1.0, 0.0, ok}); }
};

inline json to_json(const SuiteResult& s) {
  json checks = json::array();
  for (const auto& c : s.checks) checks.push_back(to_json(c));
  return {{"suite", s.suite}, {"pass", s.pass()}, {"checks", std::move(checks)}, {"details", s.details}};
}

namespace detail {

template <class T>
T expect(const json& e, const char* suite, const char* key) {
  try {
    return e.at(suite).at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::Config, std::string("expectations: missing or malformed ") + suite + "." + key);
  }
}

}  // namespace detail

/// Lap-growth oracle for the topological entropy: lap counts up to the
/// largest n whose count stays under max_count.
inline double lap_oracle(const LorenzMap1D& map, int max_n, long long max_count, int window, int* n_used = nullptr) {
  int n = window + 1;
  while (n < max_n && lap_number(map, n + 1) <= max_count) ++n;
  if (n_used) *n_used = n;
  return lap_entropy(map, n, window);
}

inline SuiteResult repro_entropy(const RunConfig& cfg, const json& ex) {
  SuiteResult r{"entropy", {}, json::object()};
  const LorenzMap1D map = cfg.map();
  int n_lap = 0;
  const double oracle = lap_oracle(map, detail::expect<int>(ex, "entropy", "lap_max_n"),
                                   detail::expect<long long>(ex, "entropy", "lap_max_count"),
                                   detail::expect<int>(ex, "entropy", "lap_window"), &n_lap);
  const Potential zero = Potential::constant(0.0);
  const auto tr = pressure_transfer(map, zero, detail::expect<int>(ex, "entropy", "transfer_depth"));
  const auto sep = pressure_separated(map, zero, detail::expect<int>(ex, "entropy", "separated_n"),
                                      detail::expect<double>(ex, "entropy", "separated_eps"));
  r.near("transfer_vs_lap_oracle", tr.value, oracle, detail::expect<double>(ex, "entropy", "transfer_rel") * oracle);
  r.near("separated_vs_lap_oracle", sep.value, oracle, detail::expect<double>(ex, "entropy", "separated_rel") * oracle);
  r.details = {{"lap_oracle", oracle}, {"lap_n", n_lap}, {"transfer", to_json(tr)}, {"separated", to_json(sep)}};
  return r;
}

/// Seeded random-walk knot values on [-1, 1]; Lipschitz constant at most
/// step * (knots - 1) / 2.
inline Potential random_lipschitz_potential(std::uint64_t seed, int knots, double step) {
  std::mt19937_64 gen(seed);
  auto unit = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };  // [0, 1), platform independent
  std::vector<double> xs(static_cast<std::size_t>(knots)), vs(xs.size());
  double v = 2.0 * unit() - 1.0;
  for (int j = 0; j < knots; ++j) {
    xs[j] = -1.0 + 2.0 * j / (knots - 1);
    if (j) v += step * (2.0 * unit() - 1.0);
    vs[j] = v;
  }
  return Potential(GridPotential::from_knots(std::move(xs), std::move(vs), std::nullopt,
                                             "seed:" + std::to_string(seed)));
}

inline SuiteResult repro_variational(const RunConfig& cfg, const json& ex, int jobs) {
  SuiteResult r{"variational", {}, json::object()};
  const LorenzMap1D map = cfg.map();
  const int count = detail::expect<int>(ex, "variational", "potentials");
  const auto seed = detail::expect<std::uint64_t>(ex, "variational", "seed");
  const int knots = detail::expect<int>(ex, "variational", "knots");
  const double step = detail::expect<double>(ex, "variational", "step");
  const int depth = detail::expect<int>(ex, "variational", "transfer_depth");
  const double slack = detail::expect<double>(ex, "variational", "slack");
  const auto catalog = measures_of(build_catalog(map, cfg.catalog, jobs));
  auto hs = std::make_shared<const SFTHorseshoe>(build_horseshoe(map, detail::expect<int>(ex, "variational", "family_depth"),
                                                                 detail::expect<double>(ex, "variational", "family_gap")));
  struct Row {
    double transfer, catalog_max, family;
  };
  std::vector<Row> rows(static_cast<std::size_t>(count));
  parallel_for(rows.size(), jobs, [&](std::size_t k) {
    const Potential phi = random_lipschitz_potential(seed + k, knots, step);
    const double tr = pressure_transfer(map, phi, depth).value;
    double cmax = -detail::kInf;
    for (const auto& m : catalog) cmax = std::max(cmax, pressure_measure(m, phi, Level::Map));
    std::vector<double> g(static_cast<std::size_t>(hs->size()));
    const Integrand f = phi.section();
    for (int v = 0; v < hs->size(); ++v) g[v] = f.value(section_cylinder(*hs, hs->vertices[v]).midpoint());
    const double fam = pressure_measure(MeasureRep(equilibrium_state(hs, g)), phi, Level::Map);
    rows[k] = {tr, cmax, fam};
  });
  json table = json::array();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::string id = "phi" + std::to_string(k);
    r.at_most(id + ":catalog_max<=transfer+slack", rows[k].catalog_max, rows[k].transfer + slack);
    r.at_least(id + ":family>=transfer-slack", rows[k].family, rows[k].transfer - slack);
    table.push_back({{"seed", seed + k}, {"transfer", rows[k].transfer}, {"catalog_max", rows[k].catalog_max},
                     {"family", rows[k].family}});
  }
  r.details = {{"catalog_size", catalog.size()}, {"family_vertices", hs->size()}, {"potentials", std::move(table)}};
  return r;
}

inline SuiteResult repro_intermediate(const RunConfig& cfg, const json& ex, int jobs) {
  SuiteResult r{"intermediate", {}, json::object()};
  const LorenzMap1D map = cfg.map();
  const RoofFunction roof = cfg.roof();
  const Potential phi = Potential::coordinate();
  const int targets = detail::expect<int>(ex, "intermediate", "targets");
  const auto catalog = measures_of(build_catalog(map, cfg.catalog, jobs));
  for (Level level : {Level::Map, Level::Flow}) {
    const double tol = detail::expect<double>(ex, "intermediate", level == Level::Map ? "map_tol" : "flow_tol");
    const RoofFunction* rp = level == Level::Flow ? &roof : nullptr;
    BoundsOptions bo;
    bo.transfer_depth = 0;
    bo.jobs = jobs;
    const PressureBounds b = estimate_P_bounds(catalog, phi, level, map, rp, bo);
    std::vector<double> goal(static_cast<std::size_t>(targets));
    for (int k = 0; k < targets; ++k) goal[k] = b.P_inf_est + (k + 1) * (b.P_top_est - b.P_inf_est) / (targets + 1);
    std::vector<std::optional<Realization>> got(goal.size());
    std::vector<std::string> errors(goal.size());
    parallel_for(goal.size(), jobs, [&](std::size_t k) {
      TargetRequest req;
      req.potential = phi;
      req.target = goal[k];
      req.tolerance = tol;
      req.level = level;
      req.schedule = cfg.realize_schedule;
      try {
        got[k] = realize_intermediate(map, req, rp);
      } catch (const Error& e) {
        errors[k] = e.what();
      }
    });
    json list = json::array();
    for (std::size_t k = 0; k < goal.size(); ++k) {
      const std::string id = std::string(to_string(level)) + ":target" + std::to_string(k + 1);
      if (!got[k]) {
        r.holds(id + ":realized", false);
        list.push_back({{"target", goal[k]}, {"error", errors[k]}});
        continue;
      }
      const Realization& z = *got[k];
      r.holds(id + ":ergodic_markov", z.measure.is_markov());
      r.near(id + ":replay", z.replay, goal[k], tol);
      list.push_back({{"target", goal[k]},         {"achieved", z.achieved}, {"replay", z.replay},
                      {"replay_depth", z.replay_depth}, {"t", z.t},           {"s", z.s},
                      {"depth", z.entry.depth},     {"x_gap", z.entry.x_gap}});
    }
    r.details[to_string(level)] = {{"P_inf_est", b.P_inf_est}, {"P_top_est", b.P_top_est},
                                   {"argmin", b.argmin},       {"argmax", b.argmax},
                                   {"tolerance", tol},         {"targets", std::move(list)}};
  }
  return r;
}

/// Top entropy estimate used to size the bump: transfer operator at phi = 0.
inline double h_top_estimate(const LorenzMap1D& map, int depth = 12) {
  return pressure_transfer(map, Potential::constant(0.0), depth).value;
}

inline SuiteResult repro_gap(const RunConfig& cfg, const json& ex, int jobs) {
  SuiteResult r{"gap", {}, json::object()};
  const LorenzMap1D map = cfg.map();
  const RoofFunction roof = cfg.roof();
  const double h = h_top_estimate(map, detail::expect<int>(ex, "gap", "h_depth"));
  const double eta = detail::expect<double>(ex, "gap", "eta");
  const double margin = detail::expect<double>(ex, "gap", "margin");
  const auto entries = build_catalog(map, cfg.catalog, jobs);
  const Potential bump = build_gap_potential(h, margin, eta, entries, roof, jobs);
  const GapReport g = verify_gap(roof, bump, entries, detail::expect<double>(ex, "gap", "sup_slack"), jobs);
  const double L = g.level;

  r.near("level_is_4h(1+margin)", L, 4.0 * h * (1.0 + margin), 1e-12 * L);
  r.holds("delta_pressure==L", g.delta_pressure == L);
  r.at_most("sup_hypothesis_rows<=L/2+slack", g.sup, L / 2.0 + g.slack);
  bool probe_flagged = false, regular_flagged = false;
  for (const auto& row : g.rows) {
    if (row.id == "delta_sigma") continue;
    if (!row.hypothesis) (row.probe ? probe_flagged : regular_flagged) = true;
  }
  r.holds("near_singular_probe_flagged", probe_flagged);
  r.holds("no_regular_measure_flagged", !regular_flagged);
  r.holds("gap_certified", g.certified);

  std::vector<CatalogEntry> kept;
  for (const auto& row : g.rows)
    if (row.hypothesis)
      for (const auto& e : entries)
        if (e.id == row.id) kept.push_back(e);
  kept.push_back({"delta_sigma", "singular", false, MeasureRep(SingularDelta{})});
  const PressureSpectrumReport s = spectrum_scan(kept, bump, Level::Flow, &roof, jobs);
  r.at_least("largest_gap>=L/2-slack", s.gap, L / 2.0 - detail::expect<double>(ex, "gap", "gap_slack"));
  r.holds("delta_sigma_alone_above_gap", s.gap_hi_id == "delta_sigma" && s.points.back().id == "delta_sigma");
  r.details = {{"h_top_est", h}, {"report", to_json(g)}, {"spectrum", to_json(s)}};
  return r;
}

struct ReproResult {
  std::vector<SuiteResult> suites;

  bool pass() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.pass(); });
  }
  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& s : suites)
      for (auto& f : s.failures()) out.push_back(std::move(f));
    return out;
  }
};

inline ReproResult run_repro(const std::string& suite, const RunConfig& cfg, const json& ex, int jobs = 1) {
  const bool all = suite == "all";
  if (!all && std::find(repro_suites().begin(), repro_suites().end(), suite) == repro_suites().end())
    fail(ErrorKind::Config, "repro: unknown suite '" + suite + "' (entropy, variational, intermediate, gap, all)");
  ReproResult out;
  if (all || suite == "entropy") out.suites.push_back(repro_entropy(cfg, ex));
  if (all || suite == "variational") out.suites.push_back(repro_variational(cfg, ex, jobs));
  if (all || suite == "intermediate") out.suites.push_back(repro_intermediate(cfg, ex, jobs));
  if (all || suite == "gap") out.suites.push_back(repro_gap(cfg, ex, jobs));
  return out;
}

inline json to_json(const ReproResult& r) {
  json suites = json::array();
  for (const auto& s : r.suites) suites.push_back(to_json(s));
  return {{"pass", r.pass()}, {"failures", r.failures()}, {"suites", std::move(suites)}};
}

}  // namespace lorenz

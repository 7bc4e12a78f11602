// lorenz_cli: command front end for the lorenz library.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lorenz/lorenz.hpp"

namespace {

using namespace lorenz;

struct Globals {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  std::string out_dir;
  int jobs = 1;
};

RunConfig load(const Globals& g) {
  RunConfig cfg = g.config_path.empty() ? RunConfig{} : load_config(g.config_path);
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Config, "--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)), "--set");
  }
  if (!g.out_dir.empty()) cfg.output_dir = g.out_dir;
  return cfg;
}

Level parse_level(const std::string& s) {
  if (s == "map") return Level::Map;
  if (s == "flow") return Level::Flow;
  fail(ErrorKind::Config, "--level must be map or flow, got '" + s + "'");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) { write_file(path, dump(j)); }

int finish(const RunConfig& cfg, const std::string& command, json results, int code,
           const std::optional<std::string>& csv = std::nullopt) {
  const json env = make_envelope(command, cfg, std::move(results));
  std::cout << dump(env);
  for (const auto& f : emit(cfg, command, env, csv).files) std::cerr << "wrote " << f << "\n";
  return code;
}

// Flow and map statistics of one measure as a table row. `integral` and
// `pressure` follow the requested level.
GapRow stats_row(const CatalogEntry& e, const Potential& phi, Level level, const RoofFunction& roof) {
  GapRow r = flow_row(e.id, e.probe, e.measure, roof, phi, default_ball_radius(phi, roof));
  if (level == Level::Map && !e.measure.is_singular()) {
    const MeasurePressure mp = measure_pressure_detail(e.measure, phi, Level::Map);
    r.integral = mp.integral;
    r.pressure = mp.value;
  }
  return r;
}

int cmd_validate(const RunConfig& cfg, int grid) {
  const ModelValidationReport rep = validate_model(cfg.return_map(), cfg.roof(), grid > 0 ? grid : cfg.grid_density);
  for (const auto& c : rep.checks)
    if (!c.pass()) std::cerr << "axiom failed: " << c.name << " (" << c.detail << ")\n";
  return finish(cfg, "validate", to_json(rep), rep.all_pass() ? 0 : 2);
}

int cmd_orbits(const RunConfig& cfg, int max_period) {
  const auto orbits = enumerate_periodic(cfg.map(), max_period);
  json rows = json::array();
  std::string csv = "word,period,point,multiplier\n";
  for (const auto& o : orbits) {
    rows.push_back({{"word", o.word.str()}, {"period", o.period()}, {"point", o.point}, {"multiplier", o.multiplier}});
    csv += o.word.str() + "," + std::to_string(o.period()) + "," + csv_number(o.point) + "," +
           csv_number(o.multiplier) + "\n";
  }
  return finish(cfg, "orbits", {{"max_period", max_period}, {"count", orbits.size()}, {"orbits", std::move(rows)}}, 0,
                csv);
}

int cmd_horseshoe(const RunConfig& cfg, int depth, double gap) {
  const SFTHorseshoe hs = build_horseshoe(cfg.map(), depth, gap);
  const double n = hs.size();
  json verts = json::array();
  for (const auto& v : hs.vertices) verts.push_back(v.str());
  return finish(cfg, "horseshoe",
                {{"depth", depth},
                 {"x_gap", gap},
                 {"candidates", hs.candidate_count},
                 {"vertex_count", hs.size()},
                 {"edge_count", hs.adjacency.edge_count()},
                 {"adjacency_density", hs.adjacency.edge_count() / (n * n)},
                 {"entropy", sft_entropy(hs)},
                 {"vertices", std::move(verts)}},
                0);
}

std::vector<CatalogEntry> read_measures(const std::string& path, const LorenzMap1D& map) {
  const json doc = read_json_file(path);
  if (doc.is_object() && doc.contains("measures")) return catalog_from_json(doc, map);
  if (doc.is_object() && doc.contains("results") && doc["results"].contains("measure"))
    return {{"realized", "file", false, measure_from_json(doc["results"]["measure"], map)}};
  return {{"measure", "file", false, measure_from_json(doc, map)}};
}

int cmd_measure_stats(const RunConfig& cfg, const std::string& in) {
  const LorenzMap1D map = cfg.map();
  const RoofFunction roof = cfg.roof();
  const Potential phi = parse_potential(cfg.potential);
  const auto entries = read_measures(in, map);
  json rows = json::array();
  std::vector<GapRow> table;
  for (const auto& e : entries) {
    GapRow r = stats_row(e, phi, cfg.level, roof);
    json j = row_json(r);
    j["kind"] = e.measure.kind();
    if (!e.measure.is_singular()) {
      const IntegralEstimate i = integrate_map(phi, e.measure, natural_depth(e.measure));
      j["map_integral"] = number(i.value);
      j["map_integral_error"] = number(i.error);
    }
    rows.push_back(std::move(j));
    table.push_back(std::move(r));
  }
  return finish(cfg, "measure-stats",
                {{"input", in}, {"potential", cfg.potential}, {"level", to_string(cfg.level)}, {"measures", rows}}, 0,
                measure_csv(table));
}

int cmd_pressure(const RunConfig& cfg, const std::string& method, int n, double eps, int depth, int jobs) {
  const LorenzMap1D map = cfg.map();
  const RoofFunction roof = cfg.roof();
  const Potential phi = parse_potential(cfg.potential);
  json res = {{"potential", cfg.potential}, {"level", to_string(cfg.level)}};
  if (method == "separated") {
    if (cfg.level != Level::Map) fail(ErrorKind::Precondition, "pressure --method separated is a map-level estimator");
    res["estimate"] = to_json(pressure_separated(map, phi, n > 0 ? n : cfg.separated_n, eps > 0 ? eps : cfg.separated_eps));
  } else if (method == "transfer") {
    const int d = depth > 0 ? depth : cfg.transfer_depth;
    res["estimate"] = to_json(cfg.level == Level::Map ? pressure_transfer(map, phi, d)
                                                      : pressure_transfer_flow(map, roof, phi, d));
  } else if (method == "catalog") {
    const auto entries = build_catalog(map, cfg.catalog, jobs);
    BoundsOptions bo;
    bo.transfer_depth = depth > 0 ? depth : cfg.transfer_depth;
    bo.slack = cfg.bounds_slack;
    bo.jobs = jobs;
    const PressureBounds b = estimate_P_bounds(measures_of(entries), phi, cfg.level, map, &roof, bo);
    json values = json::array();
    for (std::size_t i = 0; i < entries.size(); ++i)
      values.push_back({{"measure_id", entries[i].id}, {"pressure", number(b.values[i])}});
    res["estimate"] = {{"value", b.P_top_est},
                       {"method", "catalog"},
                       {"params", {{"catalog_size", entries.size()}, {"transfer_depth", bo.transfer_depth}}},
                       {"slack", bo.slack}};
    res["P_inf_est"] = b.P_inf_est;
    res["P_top_est"] = b.P_top_est;
    res["argmin"] = entries[b.argmin].id;
    res["argmax"] = entries[b.argmax].id;
    if (b.transfer) res["transfer"] = to_json(*b.transfer);
    res["shortfall"] = b.shortfall;
    res["catalog_insufficient"] = b.catalog_insufficient;
    res["values"] = std::move(values);
    if (b.catalog_insufficient)
      std::cerr << "note: catalog sup falls short of the transfer estimate by " << b.shortfall << "\n";
  } else {
    fail(ErrorKind::Config, "--method must be separated, transfer or catalog");
  }
  return finish(cfg, "pressure", std::move(res), 0);
}

int cmd_realize(const RunConfig& cfg, double target, double tol, const std::string& save, int jobs) {
  const LorenzMap1D map = cfg.map();
  const RoofFunction roof = cfg.roof();
  TargetRequest req;
  req.potential = parse_potential(cfg.potential);
  req.target = target;
  req.tolerance = tol > 0 ? tol : cfg.realize_tolerance;
  req.level = cfg.level;
  req.schedule = cfg.realize_schedule;
  BoundsOptions bo;
  bo.transfer_depth = 0;
  bo.jobs = jobs;
  const PressureBounds b =
      estimate_P_bounds(measures_of(build_catalog(map, cfg.catalog, jobs)), req.potential, cfg.level, map, &roof, bo);
  req.interior = std::make_pair(b.P_inf_est, b.P_top_est);
  const Realization z = realize_intermediate(map, req, cfg.level == Level::Flow ? &roof : nullptr);
  json ranges = json::array();
  for (const auto& r : z.ranges)
    ranges.push_back({{"depth", r.entry.depth}, {"x_gap", r.entry.x_gap}, {"lo", r.lo}, {"hi", r.hi}});
  json res = {{"potential", cfg.potential},
              {"level", to_string(cfg.level)},
              {"target", target},
              {"tolerance", req.tolerance},
              {"P_inf_est", b.P_inf_est},
              {"P_top_est", b.P_top_est},
              {"achieved", z.achieved},
              {"replay", z.replay},
              {"replay_depth", z.replay_depth},
              {"t", z.t},
              {"s", z.s},
              {"depth", z.entry.depth},
              {"x_gap", z.entry.x_gap},
              {"entropy_map", entropy_map(z.measure)},
              {"ranges", std::move(ranges)},
              {"measure", measure_to_json(z.measure)}};
  if (!save.empty()) write_json_file(save, measure_to_json(z.measure));
  return finish(cfg, "realize", std::move(res), 0);
}

int cmd_spectrum(const RunConfig& cfg, int jobs) {
  const LorenzMap1D map = cfg.map();
  const RoofFunction roof = cfg.roof();
  const Potential phi = parse_potential(cfg.potential);
  const auto entries = build_catalog(map, cfg.catalog, jobs);
  const PressureSpectrumReport s = spectrum_scan(entries, phi, cfg.level, &roof, jobs);
  std::vector<GapRow> table(entries.size());
  parallel_for(entries.size(), jobs, [&](std::size_t i) { table[i] = stats_row(entries[i], phi, cfg.level, roof); });
  json res = to_json(s);
  res["potential"] = cfg.potential;
  res["level"] = to_string(cfg.level);
  return finish(cfg, "spectrum", std::move(res), 0, measure_csv(table));
}

int cmd_gap_demo(const RunConfig& cfg, double eta, double margin, const std::string& catalog_file,
                 const std::string& dump_catalog, int jobs) {
  const LorenzMap1D map = cfg.map();
  const RoofFunction roof = cfg.roof();
  const auto entries = catalog_file.empty() ? build_catalog(map, cfg.catalog, jobs) : read_measures(catalog_file, map);
  if (!dump_catalog.empty()) write_json_file(dump_catalog, catalog_to_json(entries));
  const double h = h_top_estimate(map, cfg.transfer_depth);
  const Potential bump = build_gap_potential(h, margin, eta, entries, roof, jobs);
  const GapReport g = verify_gap(roof, bump, entries, cfg.gap_slack, jobs);
  std::vector<CatalogEntry> kept;
  for (const auto& row : g.rows)
    if (row.hypothesis)
      for (const auto& e : entries)
        if (e.id == row.id) kept.push_back(e);
  kept.push_back({"delta_sigma", "singular", false, MeasureRep(SingularDelta{})});
  const PressureSpectrumReport s = spectrum_scan(kept, bump, Level::Flow, &roof, jobs);
  for (const auto& v : g.violations) std::cerr << "flagged: " << v << " spends >= 1/4 of its time near the singularity\n";
  std::cerr << "verdict: " << g.verdict() << "\n";
  json res = {{"h_top_est", h}, {"margin", margin}, {"gap", to_json(g)}, {"spectrum", to_json(s)}};
  return finish(cfg, "gap-demo", std::move(res), g.certified ? 0 : 2, measure_csv(g.rows));
}

int cmd_repro(const RunConfig& cfg, const std::string& suite, const std::string& expected, int jobs) {
  const json ex = expected.empty() ? default_expectations() : load_expectations(expected);
  const ReproResult r = run_repro(suite, cfg, ex, jobs);
  for (const auto& s : r.suites) std::cerr << (s.pass() ? "PASS " : "FAIL ") << s.suite << "\n";
  for (const auto& f : r.failures()) std::cerr << "  failed: " << f << "\n";
  json res = to_json(r);
  res["suite"] = suite;
  res["expectations"] = ex;
  return finish(cfg, "repro-" + suite, std::move(res), r.pass() ? 0 : 2);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric Lorenz model: pressure, equilibrium measures and the singular pressure gap"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "key = value configuration file");
  app.add_option("--set", g.overrides, "override a configuration key (key=value), repeatable");
  app.add_option("--out", g.out_dir, "output directory (LORENZ_OUTPUT_DIR overrides)");
  app.add_option("--jobs", g.jobs, "worker threads; results do not depend on it")->check(CLI::Range(1, 256));
  app.fallthrough();

  std::string potential, level, method = "transfer", in, save, suite, expected, catalog_file, dump_catalog;
  int grid = 0, max_period = 8, depth = 0, n = 0;
  double gap = 0.01, eps = 0.0, target = 0.0, tol = 0.0;
  std::optional<double> eta, margin;

  auto* validate = app.add_subcommand("validate", "check the model inequalities (exit 2 on failure)");
  validate->add_option("--grid", grid, "grid points per branch");

  auto* orbits = app.add_subcommand("orbits", "periodic orbits up to a period");
  orbits->add_option("--max-period", max_period)->check(CLI::Range(1, kMaxEnumeratedPeriod));

  auto* horseshoe = app.add_subcommand("horseshoe", "Markov horseshoe of depth m avoiding the singular line");
  horseshoe->add_option("--depth", depth)->required();
  horseshoe->add_option("--gap", gap);

  auto* stats = app.add_subcommand("measure-stats", "entropy, integrals and flow statistics of stored measures");
  stats->add_option("--in", in)->required();

  auto* pressure = app.add_subcommand("pressure", "topological pressure estimate");
  pressure->add_option("--method", method)->check(CLI::IsMember({"separated", "transfer", "catalog"}));
  pressure->add_option("--n", n);
  pressure->add_option("--eps", eps);
  pressure->add_option("--depth", depth);

  auto* realize = app.add_subcommand("realize", "ergodic measure with a prescribed pressure");
  realize->add_option("--target", target)->required();
  realize->add_option("--tol", tol);
  realize->add_option("--save", save, "write the measure document here");

  auto* spectrum = app.add_subcommand("spectrum", "pressures of the catalog, sorted, with the largest gap");

  auto* gapdemo = app.add_subcommand("gap-demo", "bump potential at the singularity and its pressure gap");
  gapdemo->add_option("--eta", eta);
  gapdemo->add_option("--margin", margin);
  gapdemo->add_option("--catalog", catalog_file, "catalog document to use instead of the built-in recipe");
  gapdemo->add_option("--dump-catalog", dump_catalog, "write the catalog used");

  auto* repro = app.add_subcommand("repro", "reproduction suites: entropy, variational, intermediate, gap, all");
  repro->add_option("suite", suite)->required();
  repro->add_option("--expected", expected, "expectations document (tolerances and run sizes)");

  for (auto* sc : {stats, pressure, realize, spectrum}) {
    sc->add_option("--potential", potential, "const:c | coord:x | bump:L,eta | grid:<path>");
    sc->add_option("--level", level, "map | flow");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code_for(ErrorKind::Config);
  }

  try {
    RunConfig cfg = load(g);
    if (!potential.empty()) set_config_value(cfg, "potential", potential, "--potential");
    if (!level.empty()) cfg.level = parse_level(level);
    if (eta) set_config_value(cfg, "gap.eta", detail::exact(*eta), "--eta");
    if (margin) set_config_value(cfg, "gap.margin", detail::exact(*margin), "--margin");

    if (*validate) return cmd_validate(cfg, grid);
    if (*orbits) return cmd_orbits(cfg, max_period);
    if (*horseshoe) return cmd_horseshoe(cfg, depth, gap);
    if (*stats) return cmd_measure_stats(cfg, in);
    if (*pressure) return cmd_pressure(cfg, method, n, eps, depth, g.jobs);
    if (*realize) return cmd_realize(cfg, target, tol, save, g.jobs);
    if (*spectrum) return cmd_spectrum(cfg, g.jobs);
    if (*gapdemo) return cmd_gap_demo(cfg, cfg.gap_eta, cfg.gap_margin, catalog_file, dump_catalog, g.jobs);
    if (*repro) return cmd_repro(cfg, suite, expected, g.jobs);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return exit_code_for(ErrorKind::Internal);
  }
  return exit_code_for(ErrorKind::Config);
}

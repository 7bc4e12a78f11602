// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned here.
// Exit status is the number of failed criteria.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>

#include "lorenz/lorenz.hpp"

using namespace lorenz;
namespace fs = std::filesystem;

namespace {

// pinned tolerances
constexpr double kTransferRel = 0.01;
constexpr double kSeparatedRel = 0.05;
constexpr double kEntropySeconds = 60.0;
constexpr double kVariationalSlack = 0.02;
constexpr double kLongSeconds = 300.0;
constexpr double kMapTol = 1e-3;
constexpr double kFlowTol = 1e-2;
constexpr double kGapSupSlack = 1e-2;
constexpr double kGapSlack = 2e-2;
constexpr double kGapSeconds = 120.0;
constexpr double kEquivariance = 1e-9;
constexpr double kReduceTol = 1e-3;

const LorenzMap1D kMap(1.0, 1.7);
const RoofFunction kRoof(1.0, 1.0, 0.05);

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += "failed: " + what;
    }
  }
  void note(const std::string& s) {
    if (pass) detail += (detail.empty() ? "" : "; ") + s;
  }
};

std::string fmt(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::vector<CatalogEntry>& entries() {
  static const auto e = build_catalog(kMap, CatalogRecipe{});
  return e;
}

// 1 ---------------------------------------------------------------------------
Outcome entropy_fidelity() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const double log_beta = std::log(1.7);
  int n_used = 0;
  const double laps = lap_oracle(kMap, 30, 2'000'000, 4, &n_used);
  const double tr = pressure_transfer(kMap, Potential::constant(0.0), 12).value;
  const double sep = pressure_separated(kMap, Potential::constant(0.0), 18, 1e-3).value;
  const double secs = seconds_since(t0);
  o.check(std::abs(tr - log_beta) <= kTransferRel * log_beta, "transfer within 1% of log 1.7");
  o.check(std::abs(sep - log_beta) <= kSeparatedRel * log_beta, "separated within 5% of log 1.7");
  o.check(std::abs(tr - laps) <= kTransferRel * laps, "transfer within 1% of lap oracle");
  o.check(std::abs(sep - laps) <= kSeparatedRel * laps, "separated within 5% of lap oracle");
  o.check(secs < kEntropySeconds, "runtime under 60 s");
  o.note("transfer=" + fmt(tr) + " separated=" + fmt(sep) + " laps(n=" + std::to_string(n_used) + ")=" + fmt(laps) +
         " log1.7=" + fmt(log_beta) + " t=" + fmt(secs, 3) + "s");
  return o;
}

// 2 ---------------------------------------------------------------------------
Outcome variational() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto catalog = measures_of(entries());
  auto hs = std::make_shared<const SFTHorseshoe>(build_horseshoe(kMap, 14, 1e-4));
  double worst_above = -INFINITY, worst_below = -INFINITY;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const Potential phi = random_lipschitz_potential(1000 + k, 33, 0.15);
    const double tr = pressure_transfer(kMap, phi, 12).value;
    double cmax = -INFINITY;
    for (const auto& m : catalog) cmax = std::max(cmax, pressure_measure(m, phi, Level::Map));
    std::vector<double> g(static_cast<std::size_t>(hs->size()));
    for (int v = 0; v < hs->size(); ++v) g[v] = phi.section_value(section_cylinder(*hs, hs->vertices[v]).midpoint());
    const double fam = pressure_measure(MeasureRep(equilibrium_state(hs, g)), phi, Level::Map);
    worst_above = std::max(worst_above, cmax - tr);
    worst_below = std::max(worst_below, tr - fam);
    o.check(cmax <= tr + kVariationalSlack, "seed " + std::to_string(1000 + k) + " catalog max above transfer + 0.02");
    o.check(fam >= tr - kVariationalSlack, "seed " + std::to_string(1000 + k) + " family below transfer - 0.02");
  }
  const double secs = seconds_since(t0);
  o.check(secs < kLongSeconds, "runtime under 5 min");
  o.note("max(catalog-transfer)=" + fmt(worst_above) + " max(transfer-family)=" + fmt(worst_below) + " t=" +
         fmt(secs, 3) + "s");
  return o;
}

// 3 ---------------------------------------------------------------------------
Outcome intermediate() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto catalog = measures_of(entries());
  double worst_map = 0.0, worst_flow = 0.0;
  for (Level level : {Level::Map, Level::Flow}) {
    const RoofFunction* roof = level == Level::Flow ? &kRoof : nullptr;
    const double tol = level == Level::Map ? kMapTol : kFlowTol;
    const auto b = estimate_P_bounds(catalog, Potential::coordinate(), level, kMap, roof, {0, 0.02, 1});
    for (int k = 1; k <= 9; ++k) {
      const double target = b.P_inf_est + (b.P_top_est - b.P_inf_est) * k / 10.0;
      TargetRequest req{Potential::coordinate(), target, tol, level, default_schedule(),
                        std::make_pair(b.P_inf_est, b.P_top_est)};
      try {
        const Realization z = realize_intermediate(kMap, req, roof);
        // replay here, two levels beyond the realizer's own replay
        const double replay = pressure_measure(z.measure, Potential::coordinate(), level, roof, z.replay_depth + 2);
        const double err = std::abs(replay - target);
        (level == Level::Map ? worst_map : worst_flow) = std::max(level == Level::Map ? worst_map : worst_flow, err);
        o.check(z.measure.is_markov(), std::string(to_string(level)) + " target " + fmt(target) + " not ergodic Markov");
        o.check(err <= tol, std::string(to_string(level)) + " target " + fmt(target) + " replay off by " + fmt(err));
      } catch (const Error& e) {
        o.check(false, std::string(to_string(level)) + " target " + fmt(target) + ": " + e.what());
      }
    }
  }
  const double secs = seconds_since(t0);
  o.check(secs < kLongSeconds, "runtime under 5 min");
  o.note("worst map err=" + fmt(worst_map) + " worst flow err=" + fmt(worst_flow) + " t=" + fmt(secs, 3) + "s");
  return o;
}

// 4 ---------------------------------------------------------------------------
Outcome gap() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const double h = pressure_transfer(kMap, Potential::constant(0.0), 12).value;
  const Potential bump = build_gap_potential(h, 0.05, 0.1, entries(), kRoof);
  const GapReport g = verify_gap(kRoof, bump, entries(), kGapSupSlack);
  const double L = g.level;
  o.check(std::abs(L - 4.2 * h) <= 1e-12 * L, "L = 4.2 h_top_est");
  o.check(g.delta_pressure == L, "P(delta_sigma) = L exactly");
  o.check(g.sup <= L / 2.0 + kGapSupSlack, "sup over hypothesis rows <= L/2 + 0.01");
  o.check(g.certified, "gap certified");
  int flagged_probes = 0;
  for (const auto& r : g.rows) {
    if (r.id == "delta_sigma") continue;
    if (!r.hypothesis && r.probe) ++flagged_probes;
    o.check(r.hypothesis || r.probe, "regular measure " + r.id + " violates the ball bound");
  }
  o.check(flagged_probes >= 1, "a near-singular measure is flagged");
  std::vector<CatalogEntry> kept;
  for (const auto& e : entries())
    for (const auto& r : g.rows)
      if (r.hypothesis && r.id == e.id) kept.push_back(e);
  kept.push_back({"delta_sigma", "singular", false, MeasureRep(SingularDelta{})});
  const auto s = spectrum_scan(kept, bump, Level::Flow, &kRoof);
  o.check(s.gap >= L / 2.0 - kGapSlack, "largest gap >= L/2 - 0.02");
  o.check(s.gap_hi_id == "delta_sigma" && s.points.back().id == "delta_sigma" &&
              s.points[s.points.size() - 2].pressure == s.gap_lo,
          "delta_sigma alone above the gap");
  const double secs = seconds_since(t0);
  o.check(secs < kGapSeconds, "runtime under 2 min");
  o.note("L=" + fmt(L) + " sup=" + fmt(g.sup) + " (" + g.sup_id + ") gap=" + fmt(s.gap) + " flagged=" +
         std::to_string(g.violations.size()) + " t=" + fmt(secs, 3) + "s");
  return o;
}

// 5 ---------------------------------------------------------------------------
Outcome closed_forms() {
  Outcome o;
  const MeasureRep atom(AtomicMeasure{find_periodic_point(kMap, SymbolWord::parse("LLR"))});
  o.check(entropy_map(atom) == 0.0, "atomic entropy exactly 0");
  const double hb = entropy_map(MeasureRep(bernoulli_measure(0.5)));
  o.check(std::abs(hb - std::log(2.0)) <= 1e-12, "Bernoulli(1/2) entropy log 2");
  auto gm = std::make_shared<const SFTHorseshoe>(golden_mean_shift());
  const double hg = entropy_map(MeasureRep(parry_measure(gm)));
  o.check(std::abs(hg - std::log((1.0 + std::sqrt(5.0)) / 2.0)) <= 1e-10, "golden-mean Parry entropy");
  double worst_abramov = 0.0;
  for (double c0 : {0.5, 1.0, 3.0}) {
    const RoofFunction flat(c0, 0.0, 0.05);
    for (const MeasureRep& m : {MeasureRep(bernoulli_measure(0.5)), MeasureRep(parry_measure(gm)), atom}) {
      const auto s = suspend(m, flat, Potential::constant(0.0), 8);
      worst_abramov = std::max(worst_abramov, std::abs(s.h_flow * c0 - s.h_map));
    }
  }
  o.check(worst_abramov <= 1e-12, "constant-roof Abramov");

  double worst_shift = 0.0;
  const auto catalog = measures_of(entries());
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const Potential phi = random_lipschitz_potential(seed, 17, 0.2);
    const auto* grid = std::get_if<GridPotential>(&phi.variant());
    for (double c : {-1.3, 0.4, 2.2}) {
      std::vector<double> vs = grid->v;
      for (auto& v : vs) v += c;
      const Potential psi(GridPotential::from_knots(grid->x, vs));
      auto d = [&](double a, double b) { worst_shift = std::max(worst_shift, std::abs(b - a - c)); };
      d(pressure_transfer(kMap, phi, 10).value, pressure_transfer(kMap, psi, 10).value);
      d(pressure_separated(kMap, phi, 14, 5e-3).value, pressure_separated(kMap, psi, 14, 5e-3).value);
      d(pressure_transfer_flow(kMap, kRoof, phi, 8).value, pressure_transfer_flow(kMap, kRoof, psi, 8).value);
      const BoundsOptions opt{0, 0.02, 1};
      const auto a = estimate_P_bounds(catalog, phi, Level::Map, kMap, nullptr, opt);
      const auto b = estimate_P_bounds(catalog, psi, Level::Map, kMap, nullptr, opt);
      d(a.P_top_est, b.P_top_est);
      d(a.P_inf_est, b.P_inf_est);
      const auto fa = estimate_P_bounds(catalog, phi, Level::Flow, kMap, &kRoof, opt);
      const auto fb = estimate_P_bounds(catalog, psi, Level::Flow, kMap, &kRoof, opt);
      d(fa.P_top_est, fb.P_top_est);
      d(fa.P_inf_est, fb.P_inf_est);
    }
  }
  o.check(worst_shift <= kEquivariance, "constant-shift equivariance within 1e-9");
  o.note("|h_B-log2|=" + fmt(std::abs(hb - std::log(2.0)), 3) + " abramov=" + fmt(worst_abramov, 3) +
         " shift=" + fmt(worst_shift, 3));
  return o;
}

// 6 ---------------------------------------------------------------------------
// Brute force: every admissible n-cylinder, midpoint orbit, log-sum-exp.
double log_cylinder_sum(const Potential& phi, int n) {
  const auto cyl = admissible_cylinders(kMap, n);
  std::vector<double> s(cyl.size());
  double mx = -INFINITY;
  for (std::size_t i = 0; i < cyl.size(); ++i) {
    double x = cyl[i].interval.midpoint(), acc = 0.0;
    for (int k = 0; k < n; ++k) {
      acc += phi.section_value(x);
      if (k + 1 < n) x = kMap.raw(x);
    }
    s[i] = acc;
    mx = std::max(mx, acc);
  }
  double t = 0.0;
  for (double v : s) t += std::exp(v - mx);
  return mx + std::log(t);
}

Outcome oracle_equivalence() {
  Outcome o;
  double worst_ratio = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Potential phi = random_lipschitz_potential(500 + seed, 17, 0.2);
    const double trend = log_cylinder_sum(phi, 14) - log_cylinder_sum(phi, 13);
    for (int d = 2; d <= 6; ++d) {
      const auto e = pressure_transfer(kMap, phi, d);
      const double diff = std::abs(e.value - trend);
      worst_ratio = std::max(worst_ratio, diff / e.slack);
      o.check(diff <= e.slack, "seed " + std::to_string(500 + seed) + " depth " + std::to_string(d) + ": |" +
                                   fmt(e.value) + " - " + fmt(trend) + "| > slack " + fmt(e.slack));
    }
  }
  o.note("worst |transfer - trend| / slack = " + fmt(worst_ratio, 3));
  return o;
}

// 7 ---------------------------------------------------------------------------
Outcome case_reduction() {
  Outcome o;
  const LevelContext ctx{Potential::coordinate(), Level::Map, nullptr, 0};
  const auto catalog = measures_of(entries());
  auto hs = std::make_shared<const SFTHorseshoe>(build_horseshoe(kMap, 10, 0.01));
  auto tilted = [&](double t) { return MeasureRep(equilibrium_state(hs, tilt_weights(*hs, Tilt::Coordinate, t))); };
  auto orbit = [&](const char* w) { return MeasureRep(AtomicMeasure{find_periodic_point(kMap, SymbolWord::parse(w))}); };
  const MeasureRep parry = tilted(0.0);
  const double m = kReduceTol / 4.0;

  struct Case {
    std::string name, want;
    MeasureRep mu;
    double P;
    std::vector<MeasureRep> cat;
  };
  std::vector<Case> cases{
      {"I.1", "I.1", parry, 0.2, catalog},
      {"I.2", "I.2", tilted(-0.5), evaluate(ctx, tilted(-0.5)).integral, catalog},
      {"II.1", "II.1", parry, evaluate(ctx, parry).pressure, catalog},
      {"II.2 (low-integral witness)", "II.2a", orbit("LR"), 0.0, catalog},
      {"II.2 (all witnesses above)", "II.2b", orbit("LR"), 0.0, {tilted(1.0), tilted(2.0), orbit("LLR"), orbit("LLRLR")}},
  };
  std::string summary;
  for (const auto& c : cases) {
    try {
      const auto r = reduce_to_essential_case(c.mu, ctx, c.P, c.cat, kReduceTol);
      const PressurePoint p = evaluate(ctx, r.measure);
      const bool hit = std::find(r.steps.begin(), r.steps.end(), c.want) != r.steps.end();
      o.check(hit, c.name + " did not pass through " + c.want);
      o.check(p.integral <= c.P - m && p.pressure >= c.P + m, c.name + " output not strictly essential with margin tol/4");
      o.check(p.integral <= c.P && c.P <= p.pressure, c.name + " membership int phi <= P <= P_mu lost");
      std::string path;
      for (const auto& s : r.steps) path += (path.empty() ? "" : ">") + s;
      summary += (summary.empty() ? "" : " ") + c.name + ":" + path + "[" + fmt(c.P - p.integral, 3) + "," +
                 fmt(p.pressure - c.P, 3) + "]";
    } catch (const Error& e) {
      o.check(false, c.name + ": " + e.what());
    }
  }
  o.note(summary);
  return o;
}

// 8 ---------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = "\"" LORENZ_CLI_PATH "\" " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

Outcome determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "lorenz_acceptance_repro";
  fs::remove_all(dir);
  const std::string runs[3][2] = {{"a", "--jobs 1"}, {"b", "--jobs 1"}, {"c", "--jobs 8"}};
  for (const auto& [name, jobs] : runs) {
    const int code = run_cli(jobs + " --out " + (dir / name).string() + " repro all");
    o.check(code == 0, "repro all (" + jobs + ") exited " + std::to_string(code));
  }
  const std::string a = slurp(dir / "a" / "repro-all.json"), b = slurp(dir / "b" / "repro-all.json"),
                    c = slurp(dir / "c" / "repro-all.json");
  o.check(!a.empty(), "no payload written");
  o.check(a == b, "two runs differ");
  o.check(a == c, "--jobs 1 and --jobs 8 differ");
  o.note("payload " + std::to_string(a.size()) + " bytes, fnv1a64 " + fnv1a_hex(a));
  return o;
}

}  // namespace

int main() {
  struct Item {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const Item items[] = {
      {1, "entropy fidelity", entropy_fidelity},       {2, "variational suite", variational},
      {3, "intermediate realization", intermediate},   {4, "gap reproduction", gap},
      {5, "closed forms", closed_forms},               {6, "oracle equivalence", oracle_equivalence},
      {7, "case-reduction conformance", case_reduction}, {8, "determinism", determinism},
  };
  int failed = 0;
  for (const auto& it : items) {
    Outcome o;
    try {
      o = it.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", it.id, it.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/8 criteria passed\n", 8 - failed);
  return failed;
}

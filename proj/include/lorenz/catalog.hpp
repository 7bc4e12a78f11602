#pragma once

// Deterministic catalogs of ergodic measures: periodic orbits, equilibrium
// families on horseshoes, and near-singular probes.

#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "lorenz/errors.hpp"
#include "lorenz/measures.hpp"
#include "lorenz/model.hpp"
#include "lorenz/parallel.hpp"
#include "lorenz/symbolic.hpp"

namespace lorenz {

struct CatalogEntry {
  std::string id;
  std::string family;  // periodic | horseshoe | probe | singular
  bool probe = false;  // built near the singular line on purpose
  MeasureRep measure;
};

/// Vertex weights used to tilt the equilibrium family on a horseshoe.
enum class Tilt { Coordinate, Singular };

inline const char* to_string(Tilt t) { return t == Tilt::Coordinate ? "coord" : "sing"; }

struct HorseshoeSpec {
  int depth = 10;
  double x_gap = 0.02;
  std::vector<double> t_values{0.0};
  Tilt tilt = Tilt::Coordinate;
};

struct CatalogRecipe {
  int max_period = 8;
  std::vector<std::string> extra_words;
  std::vector<HorseshoeSpec> horseshoes{
      {8, 0.05, {-2.0, -1.0, 0.0, 1.0, 2.0}, Tilt::Coordinate},
      {10, 0.02, {-2.0, -1.0, 0.0, 1.0, 2.0}, Tilt::Coordinate},
      {12, 0.005, {-2.0, -1.0, 0.0, 1.0, 2.0}, Tilt::Coordinate},
      {14, 1e-4, {0.0, 1.0}, Tilt::Coordinate},
  };
  bool probes = true;
  int probe_min_period = 12;
  int probe_count = 3;  // periodic probes kept
  std::vector<HorseshoeSpec> probe_horseshoes{{16, 1e-5, {1.0, 2.0}, Tilt::Singular}};
  bool include_delta = false;
};

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

/// Midpoint values of the tilt function on the vertex cylinders.
inline std::vector<double> tilt_weights(const SFTHorseshoe& hs, Tilt tilt, double t) {
  std::vector<double> g(static_cast<std::size_t>(hs.size()));
  for (int v = 0; v < hs.size(); ++v) {
    const double x = section_cylinder(hs, hs.vertices[v]).midpoint();
    g[v] = t * (tilt == Tilt::Coordinate ? x : -std::log(std::abs(x)));
  }
  return g;
}

inline std::string horseshoe_id(const std::string& prefix, const HorseshoeSpec& s, double t) {
  return prefix + "hs:d" + std::to_string(s.depth) + ":g" + format_number(s.x_gap) + ":" + to_string(s.tilt) +
         ":t" + format_number(t);
}

namespace detail {

inline std::vector<CatalogEntry> horseshoe_family(const LorenzMap1D& map, const HorseshoeSpec& s, bool probe) {
  auto hs = std::make_shared<const SFTHorseshoe>(build_horseshoe(map, s.depth, s.x_gap));
  std::vector<CatalogEntry> out;
  for (double t : s.t_values) {
    const auto g = tilt_weights(*hs, s.tilt, t);
    out.push_back({horseshoe_id(probe ? "probe:" : "", s, t), probe ? "probe" : "horseshoe", probe,
                   MeasureRep(equilibrium_state(hs, g))});
  }
  return out;
}

}  // namespace detail

/// Periodic words that follow the right critical limit: R then the start of
/// the itinerary of -1+. Their orbits pass within about beta^(1-p) of the
/// singular line.
inline SymbolWord near_singular_word(const KneadingPair& kn, int p) {
  require(p >= 2 && p <= kn.depth + 1, "near-singular probe period out of range");
  return SymbolWord::parse("R").concat(kn.k_plus.prefix(p - 1));
}

/// The first `count` periods >= min_period whose near-singular word is
/// primitive and carries a periodic orbit.
inline std::vector<PeriodicOrbitRecord> near_singular_orbits(const LorenzMap1D& map, int min_period, int count) {
  const KneadingPair kn = kneading(map, 32);
  std::vector<PeriodicOrbitRecord> out;
  for (int p = min_period; p <= kn.depth && static_cast<int>(out.size()) < count; ++p) {
    const SymbolWord w = near_singular_word(kn, p);
    if (!w.is_primitive()) continue;
    try {
      out.push_back(find_periodic_point(map, w));
    } catch (const Error&) {
      // word runs past the admissible range
    }
  }
  return out;
}

inline std::vector<CatalogEntry> build_catalog(const LorenzMap1D& map, const CatalogRecipe& recipe, int jobs = 1) {
  std::vector<CatalogEntry> out;
  for (const auto& o : enumerate_periodic(map, recipe.max_period))
    out.push_back({"per:" + o.word.str(), "periodic", false, MeasureRep(AtomicMeasure{o})});
  for (const auto& w : recipe.extra_words)
    out.push_back({"per:" + w, "periodic", false, MeasureRep(AtomicMeasure{find_periodic_point(map, SymbolWord::parse(w))})});

  std::vector<HorseshoeSpec> specs = recipe.horseshoes;
  const std::size_t regular = specs.size();
  if (recipe.probes)
    specs.insert(specs.end(), recipe.probe_horseshoes.begin(), recipe.probe_horseshoes.end());
  std::vector<std::vector<CatalogEntry>> families(specs.size());
  parallel_for(specs.size(), jobs,
               [&](std::size_t i) { families[i] = detail::horseshoe_family(map, specs[i], i >= regular); });
  for (std::size_t i = 0; i < regular; ++i)
    for (auto& e : families[i]) out.push_back(std::move(e));

  if (recipe.probes) {
    for (auto& o : near_singular_orbits(map, recipe.probe_min_period, recipe.probe_count))
      out.push_back({"probe:per:" + o.word.str(), "probe", true, MeasureRep(AtomicMeasure{std::move(o)})});
    for (std::size_t i = regular; i < specs.size(); ++i)
      for (auto& e : families[i]) out.push_back(std::move(e));
  }
  if (recipe.include_delta) out.push_back({"delta_sigma", "singular", false, MeasureRep(SingularDelta{})});
  return out;
}

inline std::vector<MeasureRep> measures_of(const std::vector<CatalogEntry>& entries) {
  std::vector<MeasureRep> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.measure);
  return out;
}

}  // namespace lorenz

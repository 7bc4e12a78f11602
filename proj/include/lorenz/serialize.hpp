#pragma once

// JSON documents for measures and catalogs.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lorenz/catalog.hpp"
#include "lorenz/errors.hpp"
#include "lorenz/measures.hpp"
#include "lorenz/symbolic.hpp"

namespace lorenz {

using nlohmann::json;

namespace detail {

inline json ergodic_to_json(const AtomicMeasure& a) {
  return {{"kind", "atomic"}, {"word", a.orbit.word.str()}, {"point", a.orbit.point}};
}

inline json ergodic_to_json(const MarkovMeasure& m) {
  const SFTHorseshoe& hs = m.horseshoe();
  json verts = json::array(), edges = json::array(), rows = json::array();
  for (const auto& w : hs.vertices) verts.push_back(w.str());
  for (const auto& [u, v] : hs.adjacency.edges()) edges.push_back({u, v});
  for (int u = 0; u < hs.size(); ++u) {
    json row = json::array();
    auto succ = hs.adjacency.successors(u);
    for (std::size_t k = 0; k < succ.size(); ++k) row.push_back({succ[k], m.rows()[static_cast<std::size_t>(u)][k]});
    rows.push_back(std::move(row));
  }
  return {{"kind", "markov"},
          {"horseshoe",
           {{"depth", hs.depth}, {"x_gap", hs.x_gap}, {"geometric", hs.map.has_value()},
            {"vertices", std::move(verts)}, {"edges", std::move(edges)}}},
          {"transitions", std::move(rows)},
          {"stationary", m.stationary()}};
}

template <class T>
T get_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::Config, std::string("measure document: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("measure document: field '") + key + "': " + e.what());
  }
}

inline SymbolWord parse_word(const std::string& s) {
  try {
    return SymbolWord::parse(s);
  } catch (const Error& e) {
    fail(ErrorKind::Config, std::string("measure document: bad word '") + s + "': " + e.what());
  }
}

inline ErgodicMeasure ergodic_from_json(const json& j, const LorenzMap1D& map) {
  const std::string kind = get_field<std::string>(j, "kind");
  if (kind == "atomic") return AtomicMeasure{find_periodic_point(map, parse_word(get_field<std::string>(j, "word")))};
  if (kind != "markov") fail(ErrorKind::Config, "measure document: component kind '" + kind + "' is not ergodic");
  const json h = get_field<json>(j, "horseshoe");
  std::vector<SymbolWord> verts;
  for (const auto& s : get_field<std::vector<std::string>>(h, "vertices")) verts.push_back(parse_word(s));
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : get_field<std::vector<std::vector<int>>>(h, "edges")) {
    if (e.size() != 2) fail(ErrorKind::Config, "measure document: edges must be [u, v] pairs");
    edges.emplace_back(e[0], e[1]);
  }
  const int n = static_cast<int>(verts.size());
  for (auto [u, v] : edges)
    if (u < 0 || v < 0 || u >= n || v >= n) fail(ErrorKind::Config, "measure document: edge index out of range");
  SFTHorseshoe hs = abstract_sft(std::move(verts), std::move(edges));
  hs.x_gap = get_field<double>(h, "x_gap");
  if (get_field<bool>(h, "geometric")) hs.map = map;
  auto shared = std::make_shared<const SFTHorseshoe>(std::move(hs));

  const auto rows_in = get_field<std::vector<std::vector<std::pair<int, double>>>>(j, "transitions");
  if (static_cast<int>(rows_in.size()) != n) fail(ErrorKind::Config, "measure document: one transition row per vertex required");
  MarkovMeasure::Rows rows(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    auto succ = shared->adjacency.successors(u);
    rows[u].assign(succ.size(), 0.0);
    for (const auto& [v, p] : rows_in[u]) {
      auto it = std::lower_bound(succ.begin(), succ.end(), v);
      require(it != succ.end() && *it == v,
              "markov measure: transition " + std::to_string(u) + "->" + std::to_string(v) + " is not in the adjacency");
      rows[u][static_cast<std::size_t>(it - succ.begin())] = p;
    }
  }
  std::optional<std::vector<double>> pi;
  if (j.contains("stationary")) pi = get_field<std::vector<double>>(j, "stationary");
  return MarkovMeasure(shared, std::move(rows), std::move(pi));
}

}  // namespace detail

inline json measure_to_json(const MeasureRep& m) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SingularDelta>) {
          return {{"kind", "singular_delta"}};
        } else if constexpr (std::is_same_v<T, ConvexMeasure>) {
          json comps = json::array();
          for (const auto& [w, c] : x.components)
            comps.push_back({{"weight", w}, {"measure", std::visit([](const auto& e) { return detail::ergodic_to_json(e); }, c)}});
          return {{"kind", "convex"}, {"components", std::move(comps)}};
        } else {
          return detail::ergodic_to_json(x);
        }
      },
      m.variant());
}

inline MeasureRep measure_from_json(const json& j, const LorenzMap1D& map) {
  const std::string kind = detail::get_field<std::string>(j, "kind");
  if (kind == "singular_delta") return MeasureRep(SingularDelta{});
  if (kind == "convex") {
    std::vector<std::pair<double, MeasureRep>> parts;
    for (const auto& c : detail::get_field<json>(j, "components"))
      parts.emplace_back(detail::get_field<double>(c, "weight"), to_measure(detail::ergodic_from_json(detail::get_field<json>(c, "measure"), map)));
    return convex_combine(parts);
  }
  return to_measure(detail::ergodic_from_json(j, map));
}

/// A catalog document is {"measures": [{"id": ..., "probe": bool, "measure": {...}}, ...]}.
inline json catalog_to_json(const std::vector<CatalogEntry>& entries) {
  json arr = json::array();
  for (const auto& e : entries)
    arr.push_back({{"id", e.id}, {"family", e.family}, {"probe", e.probe}, {"measure", measure_to_json(e.measure)}});
  return {{"measures", std::move(arr)}};
}

inline std::vector<CatalogEntry> catalog_from_json(const json& j, const LorenzMap1D& map) {
  std::vector<CatalogEntry> out;
  for (const auto& e : detail::get_field<json>(j, "measures")) {
    const bool probe = e.contains("probe") && e.at("probe").get<bool>();
    const std::string family = e.contains("family") ? e.at("family").get<std::string>() : std::string("file");
    out.push_back({detail::get_field<std::string>(e, "id"), family, probe, measure_from_json(detail::get_field<json>(e, "measure"), map)});
  }
  return out;
}

}  // namespace lorenz

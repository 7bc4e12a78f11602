#pragma once

// Topological pressure estimators and measure-theoretic pressure.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lorenz/errors.hpp"
#include "lorenz/graph.hpp"
#include "lorenz/measures.hpp"
#include "lorenz/model.hpp"
#include "lorenz/parallel.hpp"
#include "lorenz/potential.hpp"
#include "lorenz/symbolic.hpp"

namespace lorenz {

enum class Level { Map, Flow };

inline const char* to_string(Level l) { return l == Level::Map ? "map" : "flow"; }

struct PressureEstimate {
  double value = 0.0;
  std::string method;  // separated | transfer | transfer-flow | catalog-sup
  std::vector<std::pair<std::string, double>> params;
  double slack = 0.0;  // heuristic error indication

  double param(const std::string& key) const {
    for (const auto& [k, v] : params)
      if (k == key) return v;
    return std::numeric_limits<double>::quiet_NaN();
  }
};

// ---------------------------------------------------------------------------
// Separated sets

/// Largest grid the separated-set sweep will walk.
inline constexpr double kSeparatedGridBudget = 1e9;

struct SeparatedSweep {
  double log_sum = -std::numeric_limits<double>::infinity();  // log sum exp(S_n phi)
  long long kept = 0;
  long long grid = 0;
};

/// Greedy (n, eps)-separated set over a uniform grid, swept left to right.
/// Bowen balls of this map are intervals (points on opposite sides of a
/// preimage of 0 separate by nearly 2), so a grid point that is separated
/// from the last kept point is separated from every kept point and the
/// sweep produces the same set as the full greedy pass.
inline SeparatedSweep separated_sweep(const LorenzMap1D& map, const Potential& phi, int n, double eps) {
  require(n >= 1 && n <= 60, "pressure_separated: n must be in [1,60]");
  require(eps > 0.0, "pressure_separated: eps must be > 0");
  const double expansion = std::max(1.0, map.typical_expansion());
  const double pitch = std::min(eps / 4.0, eps / (4.0 * std::pow(expansion, n - 1)));
  const double count = std::ceil(2.0 / pitch);
  if (!(count <= kSeparatedGridBudget))
    fail(ErrorKind::Precondition, "pressure_separated: grid too coarse for the budget (n = " + std::to_string(n) +
                                      ", eps = " + std::to_string(eps) + " needs " + std::to_string(count) +
                                      " points)");
  const long long N = static_cast<long long>(count);
  const double h = 2.0 / static_cast<double>(N);

  SeparatedSweep out;
  out.grid = N;
  std::vector<double> kept(n), cur(n);
  bool have = false;
  double mx = -std::numeric_limits<double>::infinity(), acc = 0.0;
  for (long long i = 0; i < N; ++i) {
    double x = -1.0 + (static_cast<double>(i) + 0.5) * h;
    bool singular = false, separated = !have;
    for (int k = 0; k < n; ++k) {
      if (x == 0.0) {
        singular = true;
        break;
      }
      cur[k] = x;
      if (!separated && std::abs(x - kept[k]) > eps) separated = true;
      if (k + 1 < n) x = map.raw(x);
    }
    if (singular || !separated) continue;
    kept.swap(cur);
    have = true;
    ++out.kept;
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += phi.section_value(kept[k]);
    if (s > mx) {
      acc = acc * std::exp(mx - s) + 1.0;
      mx = s;
    } else {
      acc += std::exp(s - mx);
    }
  }
  if (out.kept > 0) out.log_sum = mx + std::log(acc);
  return out;
}

/// Separated-set pressure as the growth rate of log P_k between k = n/2
/// and k = n (P_0 = 1). The plain (1/n) log P_n carries a log(1/eps)/n
/// offset that dominates at reachable n; the increment cancels it.
inline PressureEstimate pressure_separated(const LorenzMap1D& map, const Potential& phi, int n, double eps) {
  const int n0 = n / 2;
  const SeparatedSweep top = separated_sweep(map, phi, n, eps);
  const double l0 = n0 > 0 ? separated_sweep(map, phi, n0, eps).log_sum : 0.0;
  PressureEstimate e;
  e.method = "separated";
  e.value = (top.log_sum - l0) / (n - n0);
  // Trend stability: the same increment one octave lower.
  const int n1 = n0 / 2;
  if (n0 > n1 && n0 >= 2) {
    const double l1 = n1 > 0 ? separated_sweep(map, phi, n1, eps).log_sum : 0.0;
    e.slack = std::abs(e.value - (l0 - l1) / (n0 - n1));
  } else {
    e.slack = std::numeric_limits<double>::infinity();
  }
  e.params = {{"n", n}, {"eps", eps}, {"n_base", n0}, {"kept", static_cast<double>(top.kept)},
              {"grid", static_cast<double>(top.grid)}, {"plain", top.log_sum / n}};
  return e;
}

// ---------------------------------------------------------------------------
// Transfer operator

inline constexpr int kMaxTransferDepth = 14;

namespace detail {

struct TransferPieces {
  CylinderGraph cg;
  std::vector<double> g;  // potential at cylinder midpoints
  double oscillation = 0.0;
};

inline TransferPieces transfer_pieces(const LorenzMap1D& map, const Integrand& f, int depth) {
  require(depth >= 1 && depth <= kMaxTransferDepth,
          "pressure_transfer: depth must be in [1," + std::to_string(kMaxTransferDepth) + "]");
  TransferPieces t{cylinder_graph(map, depth), {}, 0.0};
  t.g.resize(t.cg.cylinders.size());
  for (std::size_t i = 0; i < t.cg.cylinders.size(); ++i) {
    const Interval& iv = t.cg.cylinders[i].interval;
    const double v = f.value(iv.midpoint());
    const Interval e = f.enclose(iv);
    t.g[i] = v;
    t.oscillation = std::max(t.oscillation, std::max(e.hi - v, v - e.lo));
  }
  return t;
}

inline SpectralRadiusResult transfer_radius(const TransferPieces& t) {
  SpectralRadiusResult r = log_spectral_radius(t.cg.graph, t.g, 1e-12);
  if (!r.converged) fail(ErrorKind::Internal, "pressure_transfer: power iteration did not converge");
  return r;
}

}  // namespace detail

/// log of the leading eigenvalue of M[u][v] = A[u][v] exp(phi(mid v)) over
/// admissible depth-d cylinders. Slack is the midpoint oscillation plus a
/// geometric tail fitted to the changes from depths d-1 and d-2.
inline PressureEstimate pressure_transfer(const LorenzMap1D& map, const Potential& phi, int depth) {
  const Integrand f = phi.section();
  const auto t = detail::transfer_pieces(map, f, depth);
  const SpectralRadiusResult r = detail::transfer_radius(t);
  PressureEstimate e;
  e.method = "transfer";
  e.value = r.log_radius;
  auto at = [&](int d) { return detail::transfer_radius(detail::transfer_pieces(map, f, d)).log_radius; };
  double trend = 0.0, tail = 0.0;
  if (depth > 1) {
    const double p1 = at(depth - 1);
    trend = std::abs(e.value - p1);
    // ratio capped at 0.9: a stalled sequence gets ten times its last step
    double ratio = 0.9;
    if (depth > 2) {
      const double prev = std::abs(p1 - at(depth - 2));
      if (prev > 0.0) ratio = std::min(0.9, trend / prev);
    }
    tail = trend * ratio / (1.0 - ratio);
  }
  e.slack = t.oscillation + trend + tail;
  e.params = {{"depth", depth},
              {"cylinders", static_cast<double>(t.cg.cylinders.size())},
              {"components", r.components},
              {"oscillation", t.oscillation},
              {"trend", trend},
              {"tail", tail}};
  return e;
}

namespace detail {

// Root s of log rho(A diag(exp(phibar - s r))) = 0 at one depth.
inline double flow_root(const LorenzMap1D& map, const RoofFunction& roof, const Potential& phi, int depth) {
  const auto tp = transfer_pieces(map, phi.fiber(roof), depth);
  const auto tr = transfer_pieces(map, roof_integrand(roof), depth);
  std::vector<double> w(tp.g.size());
  auto F = [&](double s) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = tp.g[i] - s * tr.g[i];
    SpectralRadiusResult r = log_spectral_radius(tp.cg.graph, w, 1e-12);
    if (!r.converged) fail(ErrorKind::Internal, "pressure_transfer: power iteration did not converge");
    return r.log_radius;
  };
  // F is decreasing with slope at most -c0.
  double lo = 0.0, hi = 0.0;
  const double f0 = F(0.0);
  const double step = std::max(1.0, std::abs(f0) / roof.c0());
  if (f0 > 0.0) {
    hi = step;
    while (F(hi) > 0.0) hi *= 2.0;
  } else {
    lo = -step;
    while (F(lo) < 0.0) lo *= 2.0;
  }
  for (int it = 0; it < 100 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (F(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Flow-level pressure of the suspension model. Cylinders next to the
/// singular line have unbounded roof oscillation, so the slack is the
/// change from depth d-1 only.
inline PressureEstimate pressure_transfer_flow(const LorenzMap1D& map, const RoofFunction& roof,
                                               const Potential& phi, int depth) {
  PressureEstimate e;
  e.method = "transfer-flow";
  e.value = detail::flow_root(map, roof, phi, depth);
  e.slack = depth > 1 ? std::abs(e.value - detail::flow_root(map, roof, phi, depth - 1)) : 0.0;
  e.params = {{"depth", depth}};
  return e;
}

// ---------------------------------------------------------------------------
// Measure-theoretic pressure

struct MeasurePressure {
  double value = 0.0;
  double entropy = 0.0;   // map or flow entropy
  double integral = 0.0;  // map integral or flow time average of the potential
  double error = 0.0;     // integration error bound
};

inline MeasurePressure measure_pressure_detail(const MeasureRep& m, const Potential& phi, Level level,
                                               const RoofFunction* roof = nullptr, int depth = 0) {
  const int d = depth > 0 ? depth : natural_depth(m);
  MeasurePressure out;
  if (level == Level::Map) {
    const IntegralEstimate i = integrate_map(phi, m, d);
    out.entropy = entropy_map(m);
    out.integral = i.value;
    out.error = i.error;
  } else {
    require(roof != nullptr, "pressure_measure: flow level requires a roof function");
    const FlowMeasureStats s = suspend(m, *roof, phi, d);
    out.entropy = s.h_flow;
    out.integral = s.potential_integral;
    out.error = s.potential_error;
  }
  out.value = out.entropy + out.integral;
  return out;
}

inline double pressure_measure(const MeasureRep& m, const Potential& phi, Level level,
                               const RoofFunction* roof = nullptr, int depth = 0) {
  return measure_pressure_detail(m, phi, level, roof, depth).value;
}

struct PressureBounds {
  double P_inf_est = 0.0;
  double P_top_est = 0.0;
  std::size_t argmin = 0;
  std::size_t argmax = 0;
  std::vector<double> values;  // per catalog entry
  std::optional<PressureEstimate> transfer;
  double shortfall = 0.0;      // transfer - catalog sup
  bool catalog_insufficient = false;
};

struct BoundsOptions {
  int transfer_depth = 12;  // 0 disables the comparison
  double slack = 0.02;
  int jobs = 1;
};

/// (min, max) of measure pressure over a catalog, with the maximum compared
/// against the transfer-operator estimate.
inline PressureBounds estimate_P_bounds(const std::vector<MeasureRep>& catalog, const Potential& phi, Level level,
                                        const LorenzMap1D& map, const RoofFunction* roof = nullptr,
                                        const BoundsOptions& opt = {}) {
  require(!catalog.empty(), "estimate_P_bounds: empty catalog");
  PressureBounds b;
  b.values.resize(catalog.size());
  parallel_for(catalog.size(), opt.jobs,
               [&](std::size_t i) { b.values[i] = pressure_measure(catalog[i], phi, level, roof); });
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (b.values[i] < b.values[b.argmin]) b.argmin = i;
    if (b.values[i] > b.values[b.argmax]) b.argmax = i;
  }
  b.P_inf_est = b.values[b.argmin];
  b.P_top_est = b.values[b.argmax];
  if (opt.transfer_depth > 0) {
    b.transfer = level == Level::Map ? pressure_transfer(map, phi, opt.transfer_depth)
                                     : pressure_transfer_flow(map, *roof, phi, opt.transfer_depth);
    b.shortfall = b.transfer->value - b.P_top_est;
    b.catalog_insufficient = b.shortfall > opt.slack;
  }
  return b;
}

}  // namespace lorenz

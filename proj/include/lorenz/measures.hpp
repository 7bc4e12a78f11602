#pragma once

// Invariant measures of the return map and of its suspension flow.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lorenz/errors.hpp"
#include "lorenz/graph.hpp"
#include "lorenz/model.hpp"
#include "lorenz/potential.hpp"
#include "lorenz/symbolic.hpp"

namespace lorenz {

struct AtomicMeasure {
  PeriodicOrbitRecord orbit;
};

/// Stationary Markov chain on the vertices of a horseshoe. Rows are aligned
/// with `horseshoe->adjacency.successors(u)`, so the support is contained in
/// the adjacency by construction.
class MarkovMeasure {
 public:
  using Rows = std::vector<std::vector<double>>;

  static constexpr double kRowTolerance = 1e-12;
  static constexpr double kStationaryTolerance = 1e-10;

  /// Validates rows, checks irreducibility of the positive support and
  /// computes the stationary vector (or checks the supplied one).
  MarkovMeasure(std::shared_ptr<const SFTHorseshoe> hs, Rows rows,
                std::optional<std::vector<double>> stationary = std::nullopt)
      : hs_(std::move(hs)), rows_(std::move(rows)) {
    require(hs_ != nullptr && hs_->size() > 0, "markov measure: empty horseshoe");
    const int n = hs_->size();
    require(static_cast<int>(rows_.size()) == n, "markov measure: one transition row per vertex required");
    std::vector<std::pair<int, int>> support;
    for (int u = 0; u < n; ++u) {
      auto succ = hs_->adjacency.successors(u);
      auto& row = rows_[static_cast<std::size_t>(u)];
      require(row.size() == succ.size(), "markov measure: row " + std::to_string(u) + " does not match adjacency");
      double s = 0.0;
      for (std::size_t k = 0; k < row.size(); ++k) {
        require(row[k] >= 0.0 && std::isfinite(row[k]), "markov measure: negative or non-finite transition");
        s += row[k];
        if (row[k] > 0.0) support.emplace_back(u, succ[k]);
      }
      require(std::abs(s - 1.0) <= kRowTolerance,
              "markov measure: row " + std::to_string(u) + " is not stochastic (sum " + std::to_string(s) + ")");
    }
    const auto comps = cyclic_components(Digraph(n, std::move(support)));
    require(comps.size() == 1 && static_cast<int>(comps.front().size()) == n,
            "markov measure: transition support is not irreducible");

    if (stationary && residual(*stationary) <= kStationaryTolerance) {
      pi_ = std::move(*stationary);
    } else {
      pi_ = stationary ? *stationary : std::vector<double>(static_cast<std::size_t>(n), 1.0 / n);
      solve_stationary();
    }
    require(residual(pi_) <= kStationaryTolerance, "markov measure: stationary vector did not converge");
  }

  const SFTHorseshoe& horseshoe() const { return *hs_; }
  std::shared_ptr<const SFTHorseshoe> horseshoe_ptr() const { return hs_; }
  const Rows& rows() const { return rows_; }
  const std::vector<double>& stationary() const { return pi_; }

  double transition(int u, int v) const {
    auto succ = hs_->adjacency.successors(u);
    auto it = std::lower_bound(succ.begin(), succ.end(), v);
    if (it == succ.end() || *it != v) return 0.0;
    return rows_[static_cast<std::size_t>(u)][static_cast<std::size_t>(it - succ.begin())];
  }

  /// max_v |(pi P)_v - pi_v| together with |sum pi - 1|.
  double residual(const std::vector<double>& p) const {
    const int n = hs_->size();
    if (static_cast<int>(p.size()) != n) return std::numeric_limits<double>::infinity();
    const std::vector<double> q = step(p);
    double r = 0.0, s = 0.0;
    for (int v = 0; v < n; ++v) {
      if (!(p[v] >= 0.0)) return std::numeric_limits<double>::infinity();
      r = std::max(r, std::abs(q[v] - p[v]));
      s += p[v];
    }
    return std::max(r, std::abs(s - 1.0));
  }

 private:
  std::vector<double> step(const std::vector<double>& p) const {
    std::vector<double> q(p.size(), 0.0);
    for (int u = 0; u < hs_->size(); ++u) {
      auto succ = hs_->adjacency.successors(u);
      const auto& row = rows_[static_cast<std::size_t>(u)];
      for (std::size_t k = 0; k < succ.size(); ++k) q[succ[k]] += p[u] * row[k];
    }
    return q;
  }

  // Lazy chain (P + I)/2 is aperiodic with the same stationary vector.
  void solve_stationary() {
    for (int it = 0; it < 2000000; ++it) {
      std::vector<double> q = step(pi_);
      double s = 0.0, change = 0.0;
      for (std::size_t v = 0; v < q.size(); ++v) {
        q[v] = 0.5 * (q[v] + pi_[v]);
        s += q[v];
      }
      for (std::size_t v = 0; v < q.size(); ++v) {
        q[v] /= s;
        change += std::abs(q[v] - pi_[v]);
      }
      pi_ = std::move(q);
      if (change <= 1e-15) break;
    }
  }

  std::shared_ptr<const SFTHorseshoe> hs_;
  Rows rows_;
  std::vector<double> pi_;
};

using ErgodicMeasure = std::variant<AtomicMeasure, MarkovMeasure>;

/// Convex combination of ergodic section measures. Weights refer to the
/// section (return-map) measure; the flow weights follow by suspension.
struct ConvexMeasure {
  std::vector<std::pair<double, ErgodicMeasure>> components;
};

/// Dirac mass at the singularity; exists at flow level only.
struct SingularDelta {};

class MeasureRep {
 public:
  using Variant = std::variant<AtomicMeasure, MarkovMeasure, ConvexMeasure, SingularDelta>;

  MeasureRep(Variant v) : v_(std::move(v)) {}  // NOLINT(google-explicit-constructor)

  const Variant& variant() const { return v_; }

  bool is_atomic() const { return std::holds_alternative<AtomicMeasure>(v_); }
  bool is_markov() const { return std::holds_alternative<MarkovMeasure>(v_); }
  bool is_convex() const { return std::holds_alternative<ConvexMeasure>(v_); }
  bool is_singular() const { return std::holds_alternative<SingularDelta>(v_); }
  bool is_ergodic() const { return !is_convex(); }

  const AtomicMeasure& atomic() const { return std::get<AtomicMeasure>(v_); }
  const MarkovMeasure& markov() const { return std::get<MarkovMeasure>(v_); }
  const ConvexMeasure& convex() const { return std::get<ConvexMeasure>(v_); }

  std::string kind() const {
    static const char* names[] = {"atomic", "markov", "convex", "singular_delta"};
    return names[v_.index()];
  }

 private:
  Variant v_;
};

inline MeasureRep to_measure(const ErgodicMeasure& e) {
  return std::visit([](const auto& m) { return MeasureRep(m); }, e);
}

// ---------------------------------------------------------------------------
// Construction

/// Weights so uneven that the Perron vectors leave double range.
class WeightRangeError : public Error {
 public:
  explicit WeightRangeError(const std::string& what) : Error(ErrorKind::Precondition, what) {}
};

/// Equilibrium state of the vertex weights g on an irreducible horseshoe:
/// P[u][v] = exp(g_v) r_v / (lambda r_u), stationary pi = l * r.
inline MarkovMeasure equilibrium_state(std::shared_ptr<const SFTHorseshoe> hs, std::span<const double> g) {
  require(hs != nullptr && hs->size() > 0, "equilibrium_state: empty horseshoe");
  const PerronResult p = perron(hs->adjacency, g, 1e-14);
  if (!p.converged) fail(ErrorKind::Internal, "equilibrium_state: Perron iteration did not converge");
  // max-normalised vectors; entries near the denormal range lose the chain's support
  constexpr double kFloor = 1e-280;
  if (*std::min_element(p.right.begin(), p.right.end()) < kFloor ||
      *std::min_element(p.left.begin(), p.left.end()) < kFloor)
    throw WeightRangeError("equilibrium_state: vertex weights span too wide a range for double precision");
  const int n = hs->size();
  MarkovMeasure::Rows rows(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    auto succ = hs->adjacency.successors(u);
    auto& row = rows[static_cast<std::size_t>(u)];
    row.resize(succ.size());
    double s = 0.0;
    for (std::size_t k = 0; k < succ.size(); ++k) {
      const int v = succ[k];
      row[k] = std::exp(g[v] - p.log_lambda) * p.right[v] / p.right[u];
      s += row[k];
    }
    for (double& x : row) x /= s;
  }
  std::vector<double> pi(static_cast<std::size_t>(n));
  double s = 0.0;
  for (int u = 0; u < n; ++u) s += pi[u] = p.left[u] * p.right[u];
  for (double& x : pi) x /= s;
  return MarkovMeasure(std::move(hs), std::move(rows), std::move(pi));
}

/// Parry measure (maximal entropy) of a horseshoe.
inline MarkovMeasure parry_measure(std::shared_ptr<const SFTHorseshoe> hs) {
  const std::vector<double> zero(static_cast<std::size_t>(hs->size()), 0.0);
  return equilibrium_state(std::move(hs), zero);
}

inline MarkovMeasure bernoulli_measure(double p_right) {
  require(p_right > 0.0 && p_right < 1.0, "bernoulli_measure: probability must be in (0,1)");
  auto hs = std::make_shared<const SFTHorseshoe>(full_two_shift());
  return MarkovMeasure(hs, {{1.0 - p_right, p_right}, {1.0 - p_right, p_right}});
}

inline MeasureRep convex_combine(const std::vector<std::pair<double, MeasureRep>>& parts) {
  require(!parts.empty(), "convex_combine: no components");
  double total = 0.0;
  for (const auto& [w, m] : parts) {
    require(w > 0.0, "convex_combine: weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    fail(ErrorKind::Precondition, "convex_combine: weights sum to " + std::to_string(total) + ", not 1");
  ConvexMeasure out;
  for (const auto& [w, m] : parts) {
    std::visit(
        [&, w = w](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, ConvexMeasure>) {
            for (const auto& [wi, mi] : x.components) out.components.emplace_back(w * wi, mi);
          } else if constexpr (std::is_same_v<T, SingularDelta>) {
            fail(ErrorKind::Precondition, "convex_combine: the singular Dirac measure has no section part");
          } else {
            out.components.emplace_back(w, ErgodicMeasure(x));
          }
        },
        m.variant());
  }
  if (out.components.size() == 1) return to_measure(out.components.front().second);
  return MeasureRep(std::move(out));
}

// ---------------------------------------------------------------------------
// Entropy

inline double entropy_map(const MarkovMeasure& m) {
  const auto& pi = m.stationary();
  double h = 0.0;
  for (int u = 0; u < m.horseshoe().size(); ++u) {
    double row_h = 0.0;
    for (double p : m.rows()[static_cast<std::size_t>(u)])
      if (p > 0.0) row_h -= p * std::log(p);
    h += pi[u] * row_h;
  }
  return h;
}

inline double entropy_map(const ErgodicMeasure& m) {
  if (const auto* mk = std::get_if<MarkovMeasure>(&m)) return entropy_map(*mk);
  return 0.0;
}

inline double entropy_map(const MeasureRep& m) {
  return std::visit(
      [](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) return 0.0;
        else if constexpr (std::is_same_v<T, MarkovMeasure>) return entropy_map(x);
        else if constexpr (std::is_same_v<T, ConvexMeasure>) {
          double h = 0.0;
          for (const auto& [w, c] : x.components) h += w * entropy_map(c);
          return h;
        } else {
          fail(ErrorKind::Precondition, "map entropy is undefined for the singular Dirac measure");
        }
      },
      m.variant());
}

// ---------------------------------------------------------------------------
// Cylinder masses

/// Mass of each depth-d cylinder word. The singular Dirac measure is carried
/// as a separate atom.
struct CylinderMasses {
  std::map<SymbolWord, double> words;
  double singular = 0.0;
};

namespace detail {

inline void add_masses(const AtomicMeasure& a, int depth, double weight, CylinderMasses& out) {
  const SymbolWord& w = a.orbit.word;
  const int p = w.length();
  for (int k = 0; k < p; ++k) {
    SymbolWord window;
    for (int i = 0; i < depth; ++i) window = window.appended(w[(k + i) % p]);
    out.words[window] += weight / p;
  }
}

inline void add_masses(const MarkovMeasure& mk, int depth, double weight, CylinderMasses& out) {
  const SFTHorseshoe& hs = mk.horseshoe();
  const int m = hs.depth;
  const auto& pi = mk.stationary();
  if (depth <= m) {
    for (int u = 0; u < hs.size(); ++u) out.words[hs.vertices[u].prefix(depth)] += weight * pi[u];
    return;
  }
  require(depth <= SymbolWord::kMaxLength, "cylinder masses: depth too large");
  struct Frame {
    int vertex;
    SymbolWord word;
    double mass;
  };
  std::vector<Frame> stack;
  for (int u = 0; u < hs.size(); ++u) {
    if (pi[u] <= 0.0) continue;
    stack.push_back({u, hs.vertices[u], weight * pi[u]});
    while (!stack.empty()) {
      Frame f = std::move(stack.back());
      stack.pop_back();
      if (f.word.length() == depth) {
        out.words[f.word] += f.mass;
        continue;
      }
      auto succ = hs.adjacency.successors(f.vertex);
      const auto& row = mk.rows()[static_cast<std::size_t>(f.vertex)];
      for (std::size_t k = succ.size(); k-- > 0;) {
        if (row[k] <= 0.0) continue;
        const int v = succ[k];
        stack.push_back({v, f.word.appended(hs.vertices[v].back()), f.mass * row[k]});
      }
    }
  }
}

}  // namespace detail

inline CylinderMasses cylinder_masses(const MeasureRep& m, int depth) {
  require(depth >= 1, "cylinder masses: depth must be >= 1");
  CylinderMasses out;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SingularDelta>) {
          out.singular = 1.0;
        } else if constexpr (std::is_same_v<T, ConvexMeasure>) {
          for (const auto& [w, c] : x.components)
            std::visit([&, w = w](const auto& e) { detail::add_masses(e, depth, w, out); }, c);
        } else {
          detail::add_masses(x, depth, 1.0, out);
        }
      },
      m.variant());
  return out;
}

/// L1 distance between depth-d cylinder mass vectors.
inline double measure_distance(const MeasureRep& a, const MeasureRep& b, int depth) {
  const CylinderMasses ma = cylinder_masses(a, depth), mb = cylinder_masses(b, depth);
  double d = std::abs(ma.singular - mb.singular);
  auto ia = ma.words.begin(), ib = mb.words.begin();
  while (ia != ma.words.end() || ib != mb.words.end()) {
    if (ib == mb.words.end() || (ia != ma.words.end() && ia->first < ib->first)) {
      d += std::abs(ia->second);
      ++ia;
    } else if (ia == ma.words.end() || ib->first < ia->first) {
      d += std::abs(ib->second);
      ++ib;
    } else {
      d += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Integration

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;
};

/// Thrown when the rigorous error bound exceeds the caller's tolerance.
class DepthTooShallowError : public Error {
 public:
  DepthTooShallowError(double bound, double tol)
      : Error(ErrorKind::Precondition, "integration depth too shallow: error bound " + std::to_string(bound) +
                                           " exceeds tolerance " + std::to_string(tol)),
        bound_(bound) {}
  double bound() const { return bound_; }

 private:
  double bound_;
};

/// Section interval of a cylinder word. Abstract shifts carry no geometry;
/// their cylinders are placed on the branch domain of the first symbol.
inline Interval section_cylinder(const SFTHorseshoe& hs, const SymbolWord& w) {
  if (!hs.map) return LorenzMap1D::branch_domain(w.front());
  const CylinderInterval c = cylinder_interval(*hs.map, w);
  if (!c.nonempty) fail(ErrorKind::Internal, "horseshoe word " + w.str() + " has an empty cylinder");
  return c.interval;
}

namespace detail {

inline IntegralEstimate integrate(const Integrand& f, const AtomicMeasure& a, int) {
  double s = 0.0;
  for (double x : a.orbit.orbit) s += f.value(x);
  return {s / a.orbit.period(), 0.0};
}

inline IntegralEstimate integrate(const Integrand& f, const MarkovMeasure& mk, int depth) {
  CylinderMasses cm;
  add_masses(mk, depth, 1.0, cm);
  IntegralEstimate out;
  for (const auto& [w, mass] : cm.words) {
    const Interval iv = section_cylinder(mk.horseshoe(), w);
    const double v = f.value(iv.midpoint());
    const Interval e = f.enclose(iv);
    out.value += mass * v;
    out.error += mass * std::max(e.hi - v, v - e.lo);
  }
  return out;
}

}  // namespace detail

/// Integral of a section function: exact orbit average for periodic
/// measures, cylinder-midpoint rule with an enclosure-based bound for Markov
/// measures. `tol` < inf turns an oversized bound into an error.
inline IntegralEstimate integrate_map(const Integrand& f, const MeasureRep& m, int depth,
                                      double tol = std::numeric_limits<double>::infinity()) {
  require(depth >= 1 && depth <= SymbolWord::kMaxLength, "integrate_map: depth out of range");
  const IntegralEstimate out = std::visit(
      [&](const auto& x) -> IntegralEstimate {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SingularDelta>) {
          fail(ErrorKind::Precondition, "section integrals are undefined for the singular Dirac measure");
        } else if constexpr (std::is_same_v<T, ConvexMeasure>) {
          IntegralEstimate acc;
          for (const auto& [w, c] : x.components) {
            const IntegralEstimate e = std::visit([&](const auto& y) { return detail::integrate(f, y, depth); }, c);
            acc.value += w * e.value;
            acc.error += w * e.error;
          }
          return acc;
        } else {
          return detail::integrate(f, x, depth);
        }
      },
      m.variant());
  if (out.error > tol) throw DepthTooShallowError(out.error, tol);
  return out;
}

inline IntegralEstimate integrate_map(const Potential& phi, const MeasureRep& m, int depth,
                                      double tol = std::numeric_limits<double>::infinity()) {
  return integrate_map(phi.section(), m, depth, tol);
}

/// Natural integration depth of a measure: four levels below its horseshoe
/// words (the period, for an orbit), or the largest among the components.
inline int natural_depth(const MeasureRep& m) {
  int d = 1;
  auto visit_ergodic = [&](const ErgodicMeasure& e) {
    if (const auto* mk = std::get_if<MarkovMeasure>(&e)) d = std::max(d, mk->horseshoe().depth + 4);
    else d = std::max(d, std::get<AtomicMeasure>(e).orbit.period());
  };
  if (m.is_markov()) visit_ergodic(m.markov());
  else if (m.is_atomic()) visit_ergodic(m.atomic());
  else if (m.is_convex())
    for (const auto& [w, c] : m.convex().components) visit_ergodic(c);
  return d;
}

// ---------------------------------------------------------------------------
// Suspension

struct FlowMeasureStats {
  double h_map = 0.0;
  double mean_roof = 0.0;
  double mean_roof_error = 0.0;
  double h_flow = 0.0;
  double potential_integral = 0.0;
  double potential_error = 0.0;
  double ball_radius = 0.0;
  double ball_fraction = 0.0;
  double ball_fraction_error = 0.0;
};

namespace detail {

// Enclosure of num/den given num = a +- ea, den = b +- eb with b > eb.
inline double ratio_error(double a, double ea, double b, double eb) {
  if (eb >= b) return std::numeric_limits<double>::infinity();
  return (ea + std::abs(a / b) * eb) / (b - eb);
}

}  // namespace detail

/// Default ball radius for flow statistics: twice the bump radius for bump
/// potentials, the roof linearisation radius otherwise.
inline double default_ball_radius(const Potential& phi, const RoofFunction& roof) {
  if (const auto* b = phi.as_bump()) return 2.0 * b->eta;
  return roof.eta0();
}

inline FlowMeasureStats suspend(const MeasureRep& m, const RoofFunction& roof, const Potential& phi, int depth,
                                std::optional<double> ball_radius = std::nullopt) {
  FlowMeasureStats s;
  s.ball_radius = ball_radius.value_or(default_ball_radius(phi, roof));
  require(s.ball_radius > 0.0, "suspend: ball radius must be > 0");
  if (m.is_singular()) {
    s.mean_roof = std::numeric_limits<double>::infinity();
    s.potential_integral = phi.value_at_singularity();
    s.ball_fraction = 1.0;
    return s;
  }
  s.h_map = entropy_map(m);
  const IntegralEstimate r = integrate_map(roof_integrand(roof), m, depth);
  const IntegralEstimate p = integrate_map(phi.fiber(roof), m, depth);
  const IntegralEstimate d = integrate_map(dwell_integrand(roof, s.ball_radius), m, depth);
  s.mean_roof = r.value;
  s.mean_roof_error = r.error;
  s.h_flow = s.h_map / r.value;
  s.potential_integral = p.value / r.value;
  s.potential_error = detail::ratio_error(p.value, p.error, r.value, r.error);
  s.ball_fraction = std::clamp(d.value / r.value, 0.0, 1.0);
  s.ball_fraction_error = detail::ratio_error(d.value, d.error, r.value, r.error);
  return s;
}

inline double ball_fraction(const MeasureRep& m, const RoofFunction& roof, double b, int depth) {
  if (m.is_singular()) return 1.0;
  const double r = integrate_map(roof_integrand(roof), m, depth).value;
  return std::clamp(integrate_map(dwell_integrand(roof, b), m, depth).value / r, 0.0, 1.0);
}

}  // namespace lorenz

#pragma once

// Intermediate pressure realization, the convex case reduction, and the
// pressure-gap construction with a bump at the singularity.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lorenz/catalog.hpp"
#include "lorenz/errors.hpp"
#include "lorenz/measures.hpp"
#include "lorenz/model.hpp"
#include "lorenz/parallel.hpp"
#include "lorenz/potential.hpp"
#include "lorenz/pressure.hpp"
#include "lorenz/symbolic.hpp"

namespace lorenz {

// ---------------------------------------------------------------------------
// Evaluation at a chosen level

struct LevelContext {
  Potential potential;
  Level level = Level::Map;
  const RoofFunction* roof = nullptr;
  int depth = 0;  // 0: natural depth of each measure
};

struct PressurePoint {
  double integral = 0.0;
  double pressure = 0.0;
  double entropy = 0.0;
};

inline PressurePoint evaluate(const LevelContext& c, const MeasureRep& m) {
  const MeasurePressure p = measure_pressure_detail(m, c.potential, c.level, c.roof, c.depth);
  return {p.integral, p.value, p.entropy};
}

// ---------------------------------------------------------------------------
// Case reduction

class NoWitnessError : public Error {
 public:
  explicit NoWitnessError(const std::string& what) : Error(ErrorKind::Precondition, "no witness: " + what) {}
};

struct ReductionResult {
  MeasureRep measure;
  std::vector<std::string> steps;  // subcases traversed, in order
  PressurePoint point;
  double margin = 0.0;
};

namespace detail {

// Smallest theta in (0,1] with ok(theta), for ok monotone in theta.
inline std::optional<double> smallest_theta(const std::function<bool(double)>& ok) {
  if (!ok(1.0)) return std::nullopt;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

inline MeasureRep mix(double theta, const MeasureRep& witness, const MeasureRep& base) {
  if (theta >= 1.0) return witness;
  return convex_combine({{theta, witness}, {1.0 - theta, base}});
}

struct Witness {
  const MeasureRep* measure;
  PressurePoint point;
};

}  // namespace detail

/// Moves mu into the strict position  int phi < P < P_mu  (with margin
/// tolerance/4) by mixing in catalog measures, following the four subcases
/// of the case analysis; a strictly placed input is returned unchanged.
inline ReductionResult reduce_to_essential_case(const MeasureRep& mu, const LevelContext& ctx, double P,
                                                const std::vector<MeasureRep>& catalog, double tolerance) {
  require(tolerance > 0.0, "reduce_to_essential_case: tolerance must be > 0");
  const double m = tolerance / 4.0;
  const PressurePoint start = evaluate(ctx, mu);
  require(start.integral <= P + m && start.pressure >= P - m,
          "reduce_to_essential_case: input violates  int phi <= P <= P_mu");

  std::vector<detail::Witness> wit;
  for (const auto& c : catalog)
    if (!c.is_singular()) wit.push_back({&c, evaluate(ctx, c)});

  ReductionResult res{mu, {}, start, m};
  auto eval = [&](const MeasureRep& x) { return evaluate(ctx, x); };

  for (int round = 0; round < 6; ++round) {
    const PressurePoint cur = eval(res.measure);
    res.point = cur;
    const bool below = cur.integral <= P - m;   // int phi < P
    const bool above = cur.pressure >= P + m;   // P < P_mu
    if (below && above) {
      if (res.steps.empty()) res.steps.push_back("I.1");
      return res;
    }
    const MeasureRep base = res.measure;
    std::optional<MeasureRep> next;

    if (above) {
      // I.2: lower the integral with a measure of pressure below P.
      std::vector<const detail::Witness*> low;
      for (const auto& w : wit)
        if (w.point.pressure <= P - m) low.push_back(&w);
      std::sort(low.begin(), low.end(), [](auto a, auto b) { return a->point.pressure < b->point.pressure; });
      for (const auto* w : low) {
        auto th = detail::smallest_theta([&](double t) { return eval(detail::mix(t, *w->measure, base)).integral <= P - m; });
        if (!th) continue;
        MeasureRep cand = detail::mix(*th, *w->measure, base);
        if (eval(cand).pressure >= P + m) {
          next = cand;
          break;
        }
      }
      if (!next) throw NoWitnessError("no catalog measure with pressure below " + std::to_string(P) +
                                      " keeps the pressure above P (subcase I.2)");
      res.steps.push_back("I.2");
    } else {
      std::vector<const detail::Witness*> high;
      for (const auto& w : wit)
        if (w.point.pressure >= P + m) high.push_back(&w);
      std::sort(high.begin(), high.end(), [](auto a, auto b) { return a->point.pressure > b->point.pressure; });
      if (high.empty()) throw NoWitnessError("no catalog measure with pressure above " + std::to_string(P));
      // goal > P + m leaves room for a later I.2 step, which costs pressure
      auto raise = [&](const MeasureRep& w, double goal) -> std::optional<MeasureRep> {
        auto th = detail::smallest_theta([&](double t) { return eval(detail::mix(t, w, base)).pressure >= goal; });
        if (!th) return std::nullopt;
        return detail::mix(*th, w, base);
      };
      auto halfway = [&](double p_w) { return std::max(P + m, 0.5 * (P + p_w)); };

      if (below) {
        // II.1: raise the pressure, keep the integral below P.
        for (const auto* w : high) {
          auto cand = raise(*w->measure, P + m);
          if (cand && eval(*cand).integral <= P - m) {
            next = cand;
            break;
          }
        }
        if (!next) throw NoWitnessError("no catalog measure raises the pressure while keeping int phi < P (subcase II.1)");
        res.steps.push_back("II.1");
      } else {
        // II.2 with a witness whose integral is at most P: lands in case I.
        for (const auto* w : high) {
          if (w->point.integral > P) continue;
          auto cand = raise(*w->measure, halfway(w->point.pressure));
          if (cand && eval(*cand).integral <= P + m) {
            next = cand;
            break;
          }
        }
        if (next) {
          res.steps.push_back("II.2a");
        } else {
          // II.2 with every high witness above P in integral: build mu3 on the
          // line int phi = P with positive entropy, then mix it in.
          std::vector<const detail::Witness*> low;
          for (const auto& w : wit)
            if (w.point.pressure <= P - m) low.push_back(&w);
          std::sort(low.begin(), low.end(), [](auto a, auto b) { return a->point.pressure < b->point.pressure; });
          if (low.empty()) throw NoWitnessError("no catalog measure with pressure below " + std::to_string(P) + " (subcase II.2)");
          const MeasureRep* pos = nullptr;
          for (const auto& w : wit)
            if (w.point.entropy > 0.0 && (!pos || w.point.entropy > evaluate(ctx, *pos).entropy)) pos = w.measure;
          for (const auto* l : low) {
            MeasureRep mu1 = *l->measure;
            if (l->point.entropy <= 0.0) {
              if (!pos) throw NoWitnessError("catalog has no positive-entropy measure (subcase II.2)");
              // Largest admissible weight of the positive-entropy measure,
              // halved so the pressure stays strictly below P.
              double t_max = 1.0;
              if (eval(*pos).pressure > P - m) {
                double lo = 0.0, hi = 1.0;
                for (int it = 0; it < 60; ++it) {
                  const double mid = 0.5 * (lo + hi);
                  (eval(detail::mix(mid, *pos, mu1)).pressure <= P - m ? lo : hi) = mid;
                }
                t_max = lo;
              }
              if (t_max <= 0.0) continue;
              mu1 = detail::mix(0.5 * t_max, *pos, mu1);
            }
            for (const auto* w : high) {
              // s with int phi(mu3) = P; the integral is monotone in s.
              double lo = 0.0, hi = 1.0;
              for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (eval(detail::mix(mid, *w->measure, mu1)).integral < P ? lo : hi) = mid;
              }
              MeasureRep mu3 = detail::mix(0.5 * (lo + hi), *w->measure, mu1);
              const PressurePoint p3 = eval(mu3);
              if (!(p3.entropy > 0.0) || p3.pressure < P + m || std::abs(p3.integral - P) > m) continue;
              auto cand = raise(mu3, halfway(p3.pressure));
              if (cand && eval(*cand).integral <= P + m) {
                next = cand;
                break;
              }
            }
            if (next) break;
          }
          if (!next) throw NoWitnessError("could not build a positive-entropy measure on int phi = P (subcase II.2)");
          res.steps.push_back("II.2b");
        }
      }
    }
    res.measure = *next;
  }
  fail(ErrorKind::Internal, "reduce_to_essential_case: reduction did not terminate");
}

// ---------------------------------------------------------------------------
// Intermediate realization

struct ScheduleEntry {
  int depth = 10;
  double x_gap = 0.01;
};

inline std::vector<ScheduleEntry> default_schedule() {
  return {{8, 0.05}, {10, 0.01}, {12, 0.002}, {14, 1e-4}};
}

struct TargetRequest {
  Potential potential;
  double target = 0.0;
  double tolerance = 1e-3;
  Level level = Level::Map;
  std::vector<ScheduleEntry> schedule = default_schedule();
  std::optional<std::pair<double, double>> interior;  // (P_inf_est, P_top_est)
};

struct FamilyRange {
  ScheduleEntry entry;
  double lo = 0.0;
  double hi = 0.0;
};

struct Realization {
  MeasureRep measure;
  double t = 0.0;
  double s = 0.0;  // flow level: roof multiplier of the family
  ScheduleEntry entry;
  double achieved = 0.0;  // at the construction depth
  double replay = 0.0;    // independent deeper integrator
  int replay_depth = 0;
  std::vector<FamilyRange> ranges;
};

class BracketError : public Error {
 public:
  explicit BracketError(const std::string& what) : Error(ErrorKind::Precondition, what) {}
};

/// Equilibrium family on one horseshoe: t -> mu_t, weights t*phi at map
/// level, t*phibar - s(t)*r at flow level with s(t) normalising the
/// pressure to 0.
class EquilibriumFamily {
 public:
  EquilibriumFamily(const LorenzMap1D& map, const ScheduleEntry& e, const Potential& phi, Level level,
                    const RoofFunction* roof)
      : hs_(std::make_shared<const SFTHorseshoe>(build_horseshoe(map, e.depth, e.x_gap))),
        phi_(phi), level_(level), roof_(roof) {
    require(level == Level::Map || roof != nullptr, "equilibrium family: flow level requires a roof function");
    const int n = hs_->size();
    f_.resize(static_cast<std::size_t>(n));
    r_.assign(static_cast<std::size_t>(n), 0.0);
    const Integrand fib = level == Level::Map ? phi.section() : phi.fiber(*roof);
    for (int v = 0; v < n; ++v) {
      const double x = section_cylinder(*hs_, hs_->vertices[v]).midpoint();
      f_[v] = fib.value(x);
      if (roof) r_[v] = (*roof)(x);
    }
  }

  const SFTHorseshoe& horseshoe() const { return *hs_; }

  std::vector<double> weights(double t, double* s_out = nullptr) const {
    std::vector<double> g(f_.size());
    if (level_ == Level::Map) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = t * f_[i];
      return g;
    }
    auto F = [&](double s) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = t * f_[i] - s * r_[i];
      return perron(hs_->adjacency, g, 1e-13, false).log_lambda;
    };
    double lo = 0.0, hi = 0.0;
    const double f0 = F(0.0);
    const double step = std::max(1.0, std::abs(f0) / roof_->c0());
    if (f0 > 0.0) {
      hi = step;
      while (F(hi) > 0.0) hi *= 2.0;
    } else {
      lo = -step;
      while (F(lo) < 0.0) lo *= 2.0;
    }
    // Illinois false position on the decreasing function F.
    double flo = F(lo), fhi = F(hi);
    int side = 0;
    double s = lo;
    for (int it = 0; it < 100; ++it) {
      s = (lo * fhi - hi * flo) / (fhi - flo);
      const double fs = F(s);
      if (std::abs(fs) < 1e-14 || hi - lo < 1e-14) break;
      if (fs > 0.0) {
        lo = s;
        flo = fs;
        if (side == -1) fhi *= 0.5;
        side = -1;
      } else {
        hi = s;
        fhi = fs;
        if (side == 1) flo *= 0.5;
        side = 1;
      }
    }
    F(s);
    if (s_out) *s_out = s;
    return g;
  }

  MarkovMeasure measure(double t, double* s_out = nullptr) const { return equilibrium_state(hs_, weights(t, s_out)); }

  // Construction integrates four levels below the vertex words; the replay
  // goes four levels further.
  int construction_depth() const { return hs_->depth + 4; }
  int replay_depth() const { return hs_->depth + 8; }

  double pressure(const MarkovMeasure& mu, int depth = 0) const {
    return pressure_measure(MeasureRep(mu), phi_, level_, roof_, depth > 0 ? depth : construction_depth());
  }

 private:
  std::shared_ptr<const SFTHorseshoe> hs_;
  Potential phi_;
  Level level_;
  const RoofFunction* roof_;
  std::vector<double> f_, r_;
};

/// Ergodic Markov measure with |P_nu - target| <= tolerance: walk the
/// (depth, x_gap) schedule until an equilibrium family brackets the target,
/// bisect in t, and replay with an integrator four levels deeper than the
/// one used for the bisection.
inline Realization realize_intermediate(const LorenzMap1D& map, const TargetRequest& req,
                                        const RoofFunction* roof = nullptr) {
  require(req.tolerance > 0.0, "realize_intermediate: tolerance must be > 0");
  require(!req.schedule.empty(), "realize_intermediate: empty horseshoe schedule");
  if (req.interior) {
    const auto [lo, hi] = *req.interior;
    require(req.target >= lo + req.tolerance && req.target <= hi - req.tolerance,
            "realize_intermediate: target " + std::to_string(req.target) + " is not interior to (" +
                std::to_string(lo) + ", " + std::to_string(hi) + ") with margin " + std::to_string(req.tolerance));
  }
  static const double grid[] = {1.0, 0.5, 0.0, -0.5, -1.0, -2.0, -4.0, -8.0, -16.0, -32.0, -64.0};
  std::vector<FamilyRange> ranges;
  for (const auto& entry : req.schedule) {
    std::optional<EquilibriumFamily> fam;
    try {
      fam.emplace(map, entry, req.potential, req.level, roof);
    } catch (const EmptyHorseshoeError&) {
      continue;
    }
    auto P = [&](double t) { return fam->pressure(fam->measure(t)) - req.target; };
    double prev_t = grid[0], prev = P(prev_t);
    FamilyRange range{entry, prev + req.target, prev + req.target};
    std::optional<std::pair<double, double>> bracket;
    if (std::abs(prev) <= req.tolerance / 8.0) bracket = std::make_pair(prev_t, prev_t);
    for (std::size_t k = 1; k < std::size(grid) && !bracket; ++k) {
      double cur = 0.0;
      try {
        cur = P(grid[k]);
      } catch (const WeightRangeError&) {
        break;  // steeper tilts only get worse
      }
      range.lo = std::min(range.lo, cur + req.target);
      range.hi = std::max(range.hi, cur + req.target);
      if ((prev <= 0.0) != (cur <= 0.0)) bracket = std::make_pair(grid[k], prev_t);
      prev_t = grid[k];
      prev = cur;
    }
    ranges.push_back(range);
    if (!bracket) continue;

    double a = bracket->first, b = bracket->second;  // a < b
    double fa = P(a);
    double t = b;
    for (int it = 0; it < 100; ++it) {
      t = 0.5 * (a + b);
      const double ft = P(t);
      if (std::abs(ft) <= req.tolerance / 8.0 || b - a < 1e-15) break;
      if ((ft <= 0.0) == (fa <= 0.0)) {
        a = t;
        fa = ft;
      } else {
        b = t;
      }
    }
    double s = 0.0;
    MarkovMeasure mu = fam->measure(t, &s);
    Realization out{MeasureRep(mu), t, s, entry, fam->pressure(mu), 0.0, fam->replay_depth(), {}};
    out.replay = fam->pressure(mu, out.replay_depth);
    out.ranges = ranges;
    if (std::abs(out.replay - req.target) <= req.tolerance) return out;
  }
  std::string msg = "realize_intermediate: no horseshoe family brackets target " + std::to_string(req.target) +
                    "; achieved ranges:";
  for (const auto& r : ranges)
    msg += " [d" + std::to_string(r.entry.depth) + " g" + format_number(r.entry.x_gap) + ": " +
           std::to_string(r.lo) + ", " + std::to_string(r.hi) + "]";
  throw BracketError(msg);
}

// ---------------------------------------------------------------------------
// Pressure gap

inline constexpr double kBallBound = 0.25;
inline constexpr double kDefaultGapSlack = 1e-2;

/// Bump of level L = 4 h (1 + margin) and inner radius eta. Every
/// non-probe catalog measure must spend less than a quarter of its flow
/// time within 2 eta of the singularity.
inline Potential build_gap_potential(double h_top_est, double margin, double eta,
                                     const std::vector<CatalogEntry>& catalog, const RoofFunction& roof,
                                     int jobs = 1) {
  require(h_top_est > 0.0, "build_gap_potential: h_top_est must be > 0");
  require(margin > 0.0, "build_gap_potential: margin must be > 0 (L must exceed 4 h_top strictly)");
  require(eta > 0.0, "build_gap_potential: eta must be > 0");
  std::vector<double> bf(catalog.size(), 0.0);
  parallel_for(catalog.size(), jobs, [&](std::size_t i) {
    const auto& e = catalog[i];
    if (!e.probe && !e.measure.is_singular())
      bf[i] = ball_fraction(e.measure, roof, 2.0 * eta, natural_depth(e.measure));
  });
  for (std::size_t i = 0; i < catalog.size(); ++i)
    if (bf[i] >= kBallBound)
      fail(ErrorKind::Hypothesis, "eta too large: measure " + catalog[i].id + " has ball fraction " +
                                      std::to_string(bf[i]) + " >= 1/4 at radius 2 eta = " + std::to_string(2 * eta));
  return Potential::bump(4.0 * h_top_est * (1.0 + margin), eta);
}

struct GapRow {
  std::string id;
  bool probe = false;
  double entropy_map = 0.0;
  double mean_roof = 0.0;
  double h_flow = 0.0;
  double integral = 0.0;
  double pressure = 0.0;
  double ball_fraction = 0.0;
  bool hypothesis = false;  // ball fraction below 1/4
};

struct GapReport {
  double level = 0.0;
  double eta = 0.0;
  double slack = kDefaultGapSlack;
  std::vector<GapRow> rows;  // catalog rows, then the singular row last
  double delta_pressure = 0.0;
  double sup = -std::numeric_limits<double>::infinity();
  std::string sup_id;
  double gap = 0.0;
  std::vector<std::string> violations;
  bool certified = false;

  std::string verdict() const { return certified ? "gap-certified" : "not-certified"; }
};

inline GapRow flow_row(const std::string& id, bool probe, const MeasureRep& m, const RoofFunction& roof,
                       const Potential& phi, double radius) {
  const FlowMeasureStats s = suspend(m, roof, phi, natural_depth(m), radius);
  GapRow r;
  r.id = id;
  r.probe = probe;
  r.entropy_map = s.h_map;
  r.mean_roof = s.mean_roof;
  r.h_flow = s.h_flow;
  r.integral = s.potential_integral;
  r.pressure = s.h_flow + s.potential_integral;
  r.ball_fraction = s.ball_fraction;
  r.hypothesis = s.ball_fraction < kBallBound;
  return r;
}

inline GapReport verify_gap(const RoofFunction& roof, const Potential& bump, const std::vector<CatalogEntry>& catalog,
                            double slack = kDefaultGapSlack, int jobs = 1) {
  const auto* b = bump.as_bump();
  require(b != nullptr, "verify_gap: potential must be a singular bump");
  GapReport rep;
  rep.level = b->level;
  rep.eta = b->eta;
  rep.slack = slack;
  std::vector<const CatalogEntry*> rows;
  for (const auto& e : catalog)
    if (!e.measure.is_singular()) rows.push_back(&e);
  rep.rows.resize(rows.size());
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    rep.rows[i] = flow_row(rows[i]->id, rows[i]->probe, rows[i]->measure, roof, bump, 2.0 * b->eta);
  });
  for (const auto& r : rep.rows) {
    if (!r.hypothesis) {
      rep.violations.push_back(r.id);
      continue;
    }
    if (r.pressure > rep.sup) {
      rep.sup = r.pressure;
      rep.sup_id = r.id;
    }
  }
  GapRow delta = flow_row("delta_sigma", false, MeasureRep(SingularDelta{}), roof, bump, 2.0 * b->eta);
  delta.hypothesis = false;
  rep.delta_pressure = delta.pressure;
  rep.rows.push_back(delta);
  rep.gap = rep.delta_pressure - rep.sup;
  rep.certified = rep.sup <= rep.level / 2.0 + slack && rep.delta_pressure == rep.level;
  return rep;
}

// ---------------------------------------------------------------------------
// Spectrum

struct SpectrumPoint {
  std::string id;
  double pressure = 0.0;
};

struct PressureSpectrumReport {
  std::vector<SpectrumPoint> points;  // ascending
  double P_inf_est = 0.0;
  double P_top_est = 0.0;
  double gap = 0.0;
  double gap_lo = 0.0;
  double gap_hi = 0.0;
  std::string gap_lo_id;
  std::string gap_hi_id;
};

inline PressureSpectrumReport spectrum_scan(const std::vector<CatalogEntry>& catalog, const Potential& phi, Level level,
                                            const RoofFunction* roof = nullptr, int jobs = 1) {
  require(!catalog.empty(), "spectrum_scan: empty catalog");
  PressureSpectrumReport rep;
  rep.points.resize(catalog.size());
  parallel_for(catalog.size(), jobs, [&](std::size_t i) {
    rep.points[i] = {catalog[i].id, pressure_measure(catalog[i].measure, phi, level, roof)};
  });
  std::stable_sort(rep.points.begin(), rep.points.end(), [](const auto& a, const auto& b) {
    return a.pressure < b.pressure || (a.pressure == b.pressure && a.id < b.id);
  });
  rep.P_inf_est = rep.points.front().pressure;
  rep.P_top_est = rep.points.back().pressure;
  rep.gap_lo = rep.gap_hi = rep.points.front().pressure;
  rep.gap_lo_id = rep.gap_hi_id = rep.points.front().id;
  for (std::size_t i = 1; i < rep.points.size(); ++i) {
    const double g = rep.points[i].pressure - rep.points[i - 1].pressure;
    if (g > rep.gap) {
      rep.gap = g;
      rep.gap_lo = rep.points[i - 1].pressure;
      rep.gap_hi = rep.points[i].pressure;
      rep.gap_lo_id = rep.points[i - 1].id;
      rep.gap_hi_id = rep.points[i].id;
    }
  }
  return rep;
}

}  // namespace lorenz

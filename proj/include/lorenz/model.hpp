#pragma once

// Geometric Lorenz return-map model: expanding quotient map, contracting
// fiber map, and a log-singular roof that turns section measures into flow
// measures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "lorenz/errors.hpp"

namespace lorenz {

enum class Symbol : std::uint8_t { L = 0, R = 1 };

inline char to_char(Symbol s) { return s == Symbol::L ? 'L' : 'R'; }

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  // Distance from the origin; cylinders never straddle 0 so this is the
  // nearer endpoint.
  double distance_to_zero() const {
    if (lo <= 0.0 && hi >= 0.0) return 0.0;
    return std::min(std::abs(lo), std::abs(hi));
  }
};

/// Symmetric Lorenz-like quotient map on [-1,1] \ {0}:
///   f(x) = 1 - beta (-x)^alpha  for x < 0,
///   f(x) = -1 + beta x^alpha    for x > 0.
/// Both branches are increasing; f(0-) = 1 and f(0+) = -1.
class LorenzMap1D {
 public:
  LorenzMap1D() = default;
  LorenzMap1D(double alpha, double beta) : alpha_(alpha), beta_(beta) {}

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  double operator()(double x) const {
    check_domain(x);
    return raw(x);
  }

  // Branch formula without domain checks; x must be nonzero.
  double raw(double x) const {
    if (x < 0.0) return 1.0 - beta_ * power(-x);
    return -1.0 + beta_ * power(x);
  }

  double derivative(double x) const {
    check_domain(x);
    const double ax = std::abs(x);
    if (alpha_ == 1.0) return beta_;
    return alpha_ * beta_ * std::pow(ax, alpha_ - 1.0);
  }

  /// Closed image of a branch: R maps (0,1] onto (-1, beta-1], L maps [-1,0)
  /// onto [1-beta, 1).
  Interval branch_image(Symbol s) const {
    if (s == Symbol::R) return {-1.0, raw(1.0)};
    return {raw(-1.0), 1.0};
  }

  static Interval branch_domain(Symbol s) {
    return s == Symbol::R ? Interval{0.0, 1.0} : Interval{-1.0, 0.0};
  }

  /// Inverse of the branch `s`; y is clamped to the closed branch image.
  double inverse(Symbol s, double y) const {
    const Interval img = branch_image(s);
    y = std::clamp(y, img.lo, img.hi);
    if (s == Symbol::R) return root((y + 1.0) / beta_);
    return -root((1.0 - y) / beta_);
  }

  /// Smallest derivative over the domain; analytic for alpha in (0,1].
  double min_expansion() const {
    return alpha_ == 1.0 ? beta_ : alpha_ * beta_;
  }

  // The derivative is unbounded near 0 when alpha < 1; this is the value at
  // |x| = 1/2, used only to size search grids.
  double typical_expansion() const {
    return alpha_ == 1.0 ? beta_
                         : std::max(beta_, alpha_ * beta_ * std::pow(0.5, alpha_ - 1.0));
  }

  void check_domain(double x) const {
    if (x == 0.0 || !(std::abs(x) <= 1.0))
      fail(ErrorKind::Domain,
           "quotient map evaluated outside [-1,1]\\{0}: x = " + std::to_string(x));
  }

 private:
  double power(double ax) const { return alpha_ == 1.0 ? ax : std::pow(ax, alpha_); }
  double root(double v) const { return alpha_ == 1.0 ? v : std::pow(v, 1.0 / alpha_); }

  double alpha_ = 1.0;
  double beta_ = 1.7;
};

/// Return map P(x,y) = (f(x), H(x,y)) with an affine contracting fiber map
///   H(x,y) = -sign(x) (c_H + rho y |x|).
class SkewProductReturnMap {
 public:
  SkewProductReturnMap() = default;
  SkewProductReturnMap(LorenzMap1D base, double rho, double c_H)
      : base_(base), rho_(rho), c_H_(c_H) {}

  const LorenzMap1D& base() const { return base_; }
  double rho() const { return rho_; }
  double c_H() const { return c_H_; }

  double fiber(double x, double y) const {
    base_.check_domain(x);
    const double s = x > 0.0 ? -1.0 : 1.0;
    return s * (c_H_ + rho_ * y * std::abs(x));
  }

  std::pair<double, double> operator()(double x, double y) const {
    return {base_(x), fiber(x, y)};
  }

 private:
  LorenzMap1D base_;
  double rho_ = 0.3;
  double c_H_ = 0.5;
};

/// Return time to the section. Passage near the singularity is modelled by
/// its linearisation: r(x) = c0 + c1 max(0, -log(|x| / eta0)).
class RoofFunction {
 public:
  RoofFunction() = default;
  RoofFunction(double c0, double c1, double eta0) : c0_(c0), c1_(c1), eta0_(eta0) {}

  double c0() const { return c0_; }
  double c1() const { return c1_; }
  double eta0() const { return eta0_; }

  double operator()(double x) const {
    if (x == 0.0) fail(ErrorKind::Domain, "roof function evaluated on the singular line x = 0");
    return c0_ + c1_ * std::max(0.0, -std::log(std::abs(x) / eta0_));
  }

  /// Flow time spent within phase-space distance b of the singularity during
  /// the return that starts at x; always in [0, r(x) - c0].
  double dwell(double x, double b) const {
    if (x == 0.0) fail(ErrorKind::Domain, "dwell time evaluated on the singular line x = 0");
    const double ax = std::abs(x);
    const double cap = c1_ * std::max(0.0, std::log(eta0_ / ax));
    return std::clamp(c1_ * std::max(0.0, std::log(b / ax)), 0.0, cap);
  }

  /// Integral of dwell(x, b) over u = log b in [log b1, log b2].
  double dwell_log_integral(double x, double b1, double b2) const {
    if (x == 0.0) fail(ErrorKind::Domain, "dwell integral evaluated on the singular line x = 0");
    const double a = std::log(std::abs(x));
    const double k = std::max(0.0, std::log(eta0_) - a);
    // F is the antiderivative of clamp(u - a, 0, k).
    auto F = [&](double u) {
      const double s = u - a;
      if (s <= 0.0) return 0.0;
      if (s <= k) return 0.5 * s * s;
      return 0.5 * k * k + k * (s - k);
    };
    return c1_ * (F(std::log(b2)) - F(std::log(b1)));
  }

 private:
  double c0_ = 1.0;
  double c1_ = 1.0;
  double eta0_ = 0.05;
};

struct AxiomCheck {
  std::string name;
  bool analytic_pass = false;
  bool grid_pass = false;
  double measured = 0.0;  // grid-measured quantity (min f', max |f|, ...)
  double bound = 0.0;     // the threshold it is compared against
  std::string detail;

  bool pass() const { return analytic_pass && grid_pass; }
};

struct ModelValidationReport {
  double alpha = 0, beta = 0, rho = 0, c_H = 0;
  int grid_density = 0;
  double min_derivative = 0;
  double max_abs_f = 0;
  double max_fiber_partial = 0;
  std::vector<AxiomCheck> checks;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.pass(); });
  }
  const AxiomCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Checks every inequality the return map must satisfy: analytically on the
/// parameters, then confirmed on a grid with `grid_density` points per branch.
inline ModelValidationReport validate_model(const SkewProductReturnMap& map, int grid_density) {
  require(grid_density >= 100, "validate_model: grid_density must be >= 100");
  const LorenzMap1D& f = map.base();
  const double alpha = f.alpha(), beta = f.beta(), rho = map.rho(), cH = map.c_H();

  ModelValidationReport rep;
  rep.alpha = alpha;
  rep.beta = beta;
  rep.rho = rho;
  rep.c_H = cH;
  rep.grid_density = grid_density;

  const bool params_ok = alpha > 0.0 && alpha <= 1.0 && beta > 0.0 && rho > 0.0 && rho < 1.0 && cH > 0.0;
  rep.checks.push_back({"parameter_domain", params_ok, true, 0.0, 0.0,
                        "alpha in (0,1], beta > 0, rho in (0,1), c_H > 0"});
  if (!params_ok) return rep;

  std::vector<double> xs;
  xs.reserve(2 * static_cast<std::size_t>(grid_density));
  for (int i = 1; i <= grid_density; ++i) {
    const double x = static_cast<double>(i) / grid_density;
    xs.push_back(x);
    xs.push_back(-x);
  }

  // One-sided limits at the singular line.
  {
    const double dev = std::max(std::abs(f.raw(-1e-12) - 1.0), std::abs(f.raw(1e-12) + 1.0));
    rep.checks.push_back({"singular_limits", true, dev <= 1e-6, dev, 1e-6,
                          "f(0-) = 1 and f(0+) = -1, sampled at x = -/+1e-12"});
  }

  // -1 < f < 1: the extreme values sit at the endpoints +-1.
  {
    double max_abs = 0.0;
    bool inside = true;
    for (double x : xs) {
      const double v = f.raw(x);
      max_abs = std::max(max_abs, std::abs(v));
      inside = inside && std::abs(v) < 1.0;
    }
    rep.max_abs_f = max_abs;
    rep.checks.push_back({"range", beta < 2.0, inside, max_abs, 1.0, "-1 < f(x) < 1 requires beta < 2"});
  }

  // f' > sqrt(2); the minimum is alpha*beta at |x| = 1.
  {
    double min_d = std::numeric_limits<double>::infinity();
    for (double x : xs) min_d = std::min(min_d, f.derivative(x));
    rep.min_derivative = min_d;
    const double sqrt2 = std::sqrt(2.0);
    rep.checks.push_back({"expansion", alpha * beta > sqrt2, min_d > sqrt2, min_d, sqrt2,
                          "f'(x) > sqrt(2); min f' = alpha*beta at |x| = 1"});
  }

  // Fiber sign, contraction and range on an (x,y) grid.
  {
    const int ny = std::min(grid_density, 100);
    bool sign_ok = true, range_ok = true;
    double max_partial = 0.0, max_abs_h = 0.0;
    const double h = 1e-7;
    const std::size_t stride = std::max<std::size_t>(1, xs.size() / 2000);
    for (std::size_t i = 0; i < xs.size(); i += stride) {
      const double x = xs[i];
      for (int j = 0; j <= ny; ++j) {
        const double y = -1.0 + 2.0 * j / ny;
        const double v = map.fiber(x, y);
        sign_ok = sign_ok && ((x > 0.0 && v < 0.0) || (x < 0.0 && v > 0.0));
        max_abs_h = std::max(max_abs_h, std::abs(v));
        range_ok = range_ok && std::abs(v) < 1.0;
        const double xl = std::clamp(x - h, x > 0 ? h : -1.0, x > 0 ? 1.0 : -h);
        const double xr = std::clamp(x + h, x > 0 ? h : -1.0, x > 0 ? 1.0 : -h);
        const double dx = (map.fiber(xr, y) - map.fiber(xl, y)) / (xr - xl);
        const double dy = (map.fiber(x, std::min(1.0, y + h)) - map.fiber(x, std::max(-1.0, y - h))) /
                          (std::min(1.0, y + h) - std::max(-1.0, y - h));
        max_partial = std::max({max_partial, std::abs(dx), std::abs(dy)});
      }
    }
    rep.max_fiber_partial = max_partial;
    rep.checks.push_back({"fiber_sign", cH > rho, sign_ok, cH - rho, 0.0,
                          "H < 0 for x > 0 and H > 0 for x < 0 requires c_H > rho"});
    rep.checks.push_back({"fiber_contraction", rho < 1.0, max_partial < 1.0, max_partial, 1.0,
                          "sup max(|dH/dx|, |dH/dy|) = rho < 1"});
    rep.checks.push_back({"fiber_range", cH + rho < 1.0, range_ok, max_abs_h, 1.0,
                          "|H| <= c_H + rho < 1 keeps the section invariant"});
  }
  return rep;
}

inline ModelValidationReport validate_model(const SkewProductReturnMap& map, const RoofFunction& roof,
                                            int grid_density) {
  ModelValidationReport rep = validate_model(map, grid_density);
  const bool ok = roof.c0() > 0.0 && roof.c1() >= 0.0 && roof.eta0() > 0.0 && roof.eta0() < 1.0;
  rep.checks.push_back({"roof_parameters", ok, true, roof.c0(), 0.0, "c0 > 0, c1 >= 0, eta0 in (0,1)"});
  return rep;
}

}  // namespace lorenz

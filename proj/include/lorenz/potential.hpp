#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "lorenz/errors.hpp"
#include "lorenz/model.hpp"

namespace lorenz {

/// A scalar function of the base coordinate together with a rigorous range
/// enclosure over intervals; integration error bounds come from the
/// enclosures.
struct Integrand {
  std::function<double(double)> value;
  std::function<Interval(const Interval&)> enclose;
};

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline Interval product(const Interval& a, const Interval& b) {
  auto mul = [](double p, double q) {
    if (p == 0.0 || q == 0.0) return 0.0;  // 0 * inf
    return p * q;
  };
  const double c[4] = {mul(a.lo, b.lo), mul(a.lo, b.hi), mul(a.hi, b.lo), mul(a.hi, b.hi)};
  return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

// Enclosure of a function that is nonincreasing in |x| on an interval that
// does not straddle 0; g(near) may be infinite at the singular line.
template <class G>
Interval enclose_radial(const Interval& iv, G g) {
  const double near = iv.distance_to_zero();
  const double far = std::max(std::abs(iv.lo), std::abs(iv.hi));
  return {g(far), near == 0.0 ? g(0.0) : g(near)};
}

}  // namespace detail

struct ConstantPotential {
  double c = 0.0;
};

struct CoordinatePotential {};

/// Piecewise-linear interpolation of samples on an x-grid; constant beyond
/// the end knots.
struct GridPotential {
  std::vector<double> x;
  std::vector<double> v;
  double lipschitz = 0.0;
  std::string source;

  static GridPotential from_knots(std::vector<double> xs, std::vector<double> vs,
                                  std::optional<double> declared_lipschitz = std::nullopt,
                                  std::string source = "inline") {
    require(xs.size() >= 2 && xs.size() == vs.size(), "grid potential needs >= 2 (x,value) samples");
    for (std::size_t i = 1; i < xs.size(); ++i)
      require(xs[i] > xs[i - 1], "grid potential knots must be strictly increasing");
    GridPotential g{std::move(xs), std::move(vs), 0.0, std::move(source)};
    double lip = 0.0;
    for (std::size_t i = 1; i < g.x.size(); ++i)
      lip = std::max(lip, std::abs(g.v[i] - g.v[i - 1]) / (g.x[i] - g.x[i - 1]));
    if (declared_lipschitz) {
      require(*declared_lipschitz >= lip - 1e-12,
              "grid potential: declared Lipschitz constant is smaller than the sampled slope");
      g.lipschitz = *declared_lipschitz;
    } else {
      g.lipschitz = lip;
    }
    return g;
  }

  double operator()(double t) const {
    if (t <= x.front()) return v.front();
    if (t >= x.back()) return v.back();
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double w = (t - x[i - 1]) / (x[i] - x[i - 1]);
    return v[i - 1] + w * (v[i] - v[i - 1]);
  }

  Interval enclose(const Interval& iv) const {
    double lo = std::min((*this)(iv.lo), (*this)(iv.hi));
    double hi = std::max((*this)(iv.lo), (*this)(iv.hi));
    auto first = std::upper_bound(x.begin(), x.end(), iv.lo);
    for (auto it = first; it != x.end() && *it < iv.hi; ++it) {
      const double val = v[static_cast<std::size_t>(it - x.begin())];
      lo = std::min(lo, val);
      hi = std::max(hi, val);
    }
    return {lo, hi};
  }
};

/// Continuous bump at the singularity: level L within distance eta, zero
/// beyond 2*eta, linear in log-distance in between.
struct SingularBumpPotential {
  double level = 1.0;
  double eta = 0.1;

  double profile(double dist) const {
    if (dist <= eta) return level;
    if (dist >= 2.0 * eta) return 0.0;
    return level * std::log(2.0 * eta / dist) / std::log(2.0);
  }
};

class Potential {
 public:
  using Variant = std::variant<ConstantPotential, CoordinatePotential, GridPotential, SingularBumpPotential>;

  Potential() : v_(ConstantPotential{0.0}) {}
  Potential(Variant v) : v_(std::move(v)) {}  // NOLINT(google-explicit-constructor)

  static Potential constant(double c) { return Potential(ConstantPotential{c}); }
  static Potential coordinate() { return Potential(CoordinatePotential{}); }
  static Potential bump(double level, double eta) {
    require(level > 0.0, "bump potential: level must be > 0");
    require(eta > 0.0, "bump potential: eta must be > 0");
    return Potential(SingularBumpPotential{level, eta});
  }

  const Variant& variant() const { return v_; }
  bool is_bump() const { return std::holds_alternative<SingularBumpPotential>(v_); }
  const SingularBumpPotential* as_bump() const { return std::get_if<SingularBumpPotential>(&v_); }

  /// Value on the section. The bump is evaluated at |x| as a proxy for the
  /// distance to the singularity.
  double section_value(double x) const {
    return std::visit(
        [&](const auto& p) -> double {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ConstantPotential>) return p.c;
          else if constexpr (std::is_same_v<T, CoordinatePotential>) return x;
          else if constexpr (std::is_same_v<T, GridPotential>) return p(x);
          else return p.profile(std::abs(x));
        },
        v_);
  }

  Interval section_enclose(const Interval& iv) const {
    return std::visit(
        [&](const auto& p) -> Interval {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ConstantPotential>) return {p.c, p.c};
          else if constexpr (std::is_same_v<T, CoordinatePotential>) return iv;
          else if constexpr (std::is_same_v<T, GridPotential>) return p.enclose(iv);
          else return detail::enclose_radial(iv, [&](double d) { return p.profile(d); });
        },
        v_);
  }

  /// Value at the singularity itself (the flow-level point sigma, which
  /// projects to x = 0).
  double value_at_singularity() const {
    return std::visit(
        [&](const auto& p) -> double {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ConstantPotential>) return p.c;
          else if constexpr (std::is_same_v<T, CoordinatePotential>) return 0.0;
          else if constexpr (std::is_same_v<T, GridPotential>) return p(0.0);
          else return p.level;
        },
        v_);
  }

  double sup() const {
    return std::visit(
        [&](const auto& p) -> double {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ConstantPotential>) return p.c;
          else if constexpr (std::is_same_v<T, CoordinatePotential>) return 1.0;
          else if constexpr (std::is_same_v<T, GridPotential>) return *std::max_element(p.v.begin(), p.v.end());
          else return p.level;
        },
        v_);
  }

  Integrand section() const {
    return {[p = *this](double x) { return p.section_value(x); },
            [p = *this](const Interval& iv) { return p.section_enclose(iv); }};
  }

  /// Integral of the flow-level potential along one return starting at x.
  /// Section potentials are carried unchanged along the orbit segment; the
  /// bump is integrated against the dwell-time profile of the roof.
  double fiber_integral(const RoofFunction& roof, double x) const {
    if (const auto* b = as_bump())
      return b->level / std::log(2.0) * roof.dwell_log_integral(x, b->eta, 2.0 * b->eta);
    return section_value(x) * roof(x);
  }

  Integrand fiber(const RoofFunction& roof) const {
    auto value = [p = *this, roof](double x) { return p.fiber_integral(roof, x); };
    if (const auto* b = as_bump()) {
      const double level = b->level, eta = b->eta;
      auto enclose = [roof, level, eta](const Interval& iv) {
        return detail::enclose_radial(iv, [&](double d) {
          if (d == 0.0) return roof.c1() > 0.0 ? detail::kInf : 0.0;
          return level / std::log(2.0) * roof.dwell_log_integral(d, eta, 2.0 * eta);
        });
      };
      return {value, enclose};
    }
    auto enclose = [p = *this, roof](const Interval& iv) {
      return detail::product(p.section_enclose(iv), roof_enclose(roof, iv));
    };
    return {value, enclose};
  }

  static Interval roof_enclose(const RoofFunction& roof, const Interval& iv) {
    return detail::enclose_radial(iv, [&](double d) {
      if (d == 0.0) return roof.c1() > 0.0 ? detail::kInf : roof.c0();
      return roof(d);
    });
  }

  /// Mini-language: const:c | coord:x | bump:L,eta | grid:<path>
  std::string spec() const {
    return std::visit(
        [&](const auto& p) -> std::string {
          using T = std::decay_t<decltype(p)>;
          std::ostringstream os;
          os.precision(17);
          if constexpr (std::is_same_v<T, ConstantPotential>) os << "const:" << p.c;
          else if constexpr (std::is_same_v<T, CoordinatePotential>) os << "coord:x";
          else if constexpr (std::is_same_v<T, GridPotential>) os << "grid:" << p.source;
          else os << "bump:" << p.level << "," << p.eta;
          return os.str();
        },
        v_);
  }

  // Pointwise subtraction of a constant is the only arithmetic needed
  // (constant-shift checks); other combinations go through grids.
  Potential shifted(double c) const {
    return std::visit(
        [&](const auto& p) -> Potential {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ConstantPotential>) return constant(p.c + c);
          else if constexpr (std::is_same_v<T, GridPotential>) {
            GridPotential g = p;
            for (double& v : g.v) v += c;
            return Potential(g);
          } else {
            fail(ErrorKind::Precondition, "constant shift is only defined for const and grid potentials");
          }
        },
        v_);
  }

 private:
  Variant v_;
};

inline Integrand roof_integrand(const RoofFunction& roof) {
  return {[roof](double x) { return roof(x); },
          [roof](const Interval& iv) { return Potential::roof_enclose(roof, iv); }};
}

inline Integrand dwell_integrand(const RoofFunction& roof, double b) {
  return {[roof, b](double x) { return roof.dwell(x, b); },
          [roof, b](const Interval& iv) {
            return detail::enclose_radial(iv, [&](double d) {
              if (d == 0.0) return roof.c1() > 0.0 ? detail::kInf : 0.0;
              return roof.dwell(d, b);
            });
          }};
}

inline GridPotential read_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "grid potential: cannot open '" + path + "'");
  std::vector<double> xs, vs;
  std::optional<double> declared;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      const std::string comment = line.substr(hash + 1);
      const auto key = comment.find("lipschitz:");
      if (key != std::string::npos) declared = std::stod(comment.substr(key + 10));
      line = line.substr(0, hash);
    }
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ls(line);
    double x, v;
    if (!(ls >> x)) continue;
    if (!(ls >> v))
      fail(ErrorKind::Config, path + ":" + std::to_string(lineno) + ": expected 'x,value'");
    xs.push_back(x);
    vs.push_back(v);
  }
  try {
    return GridPotential::from_knots(std::move(xs), std::move(vs), declared, path);
  } catch (const Error& e) {
    fail(ErrorKind::Config, path + ": " + e.what());
  }
}

inline Potential parse_potential(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    fail(ErrorKind::Config, "potential spec '" + spec + "': expected const:c, coord:x, bump:L,eta or grid:<path>");
  const std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
  try {
    if (kind == "const") {
      std::size_t used = 0;
      const double c = std::stod(arg, &used);
      if (used != arg.size()) throw std::invalid_argument(arg);
      return Potential::constant(c);
    }
    if (kind == "coord") {
      if (arg != "x") fail(ErrorKind::Config, "potential spec '" + spec + "': only coord:x is supported");
      return Potential::coordinate();
    }
    if (kind == "bump") {
      const auto comma = arg.find(',');
      if (comma == std::string::npos) throw std::invalid_argument(arg);
      return Potential::bump(std::stod(arg.substr(0, comma)), std::stod(arg.substr(comma + 1)));
    }
    if (kind == "grid") return Potential(read_grid_file(arg));
  } catch (const std::logic_error&) {
    fail(ErrorKind::Config, "potential spec '" + spec + "': malformed number");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    fail(ErrorKind::Config, "potential spec '" + spec + "': " + e.what());
  }
  fail(ErrorKind::Config, "potential spec '" + spec + "': unknown kind '" + kind + "'");
}

}  // namespace lorenz

#pragma once

// Symbolic dynamics of the quotient map: itineraries, kneading sequences,
// cylinder intervals, periodic orbits and finite-type horseshoes that avoid
// the singular line.

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lorenz/errors.hpp"
#include "lorenz/graph.hpp"
#include "lorenz/model.hpp"

namespace lorenz {

/// Finite word over {L, R}, packed LSB-first (bit i is symbol i, R = 1).
class SymbolWord {
 public:
  static constexpr int kMaxLength = 62;

  SymbolWord() = default;

  static SymbolWord from_bits(std::uint64_t bits, int length) {
    SymbolWord w;
    w.length_ = length;
    w.bits_ = length == 0 ? 0 : bits & mask(length);
    return w;
  }

  static SymbolWord parse(std::string_view text) {
    if (text.empty()) fail(ErrorKind::Precondition, "symbol word must be non-empty");
    if (static_cast<int>(text.size()) > kMaxLength)
      fail(ErrorKind::Precondition, "symbol word longer than " + std::to_string(kMaxLength));
    SymbolWord w;
    for (char c : text) {
      if (c != 'L' && c != 'R') fail(ErrorKind::Precondition, "symbol word may contain only L and R");
      w = w.appended(c == 'R' ? Symbol::R : Symbol::L);
    }
    return w;
  }

  int length() const { return length_; }
  bool empty() const { return length_ == 0; }
  std::uint64_t bits() const { return bits_; }

  Symbol operator[](int i) const { return ((bits_ >> i) & 1u) ? Symbol::R : Symbol::L; }
  Symbol front() const { return (*this)[0]; }
  Symbol back() const { return (*this)[length_ - 1]; }

  SymbolWord appended(Symbol s) const {
    if (length_ >= kMaxLength) fail(ErrorKind::Precondition, "symbol word exceeds maximum length");
    SymbolWord w = *this;
    if (s == Symbol::R) w.bits_ |= std::uint64_t{1} << length_;
    ++w.length_;
    return w;
  }

  SymbolWord prefix(int n) const { return from_bits(bits_, std::min(n, length_)); }

  // The word with its first k symbols dropped.
  SymbolWord shifted(int k = 1) const {
    k = std::min(k, length_);
    return from_bits(bits_ >> k, length_ - k);
  }

  SymbolWord rotated(int k) const {
    k %= length_;
    if (k == 0) return *this;
    const std::uint64_t b = (bits_ >> k) | (bits_ << (length_ - k));
    return from_bits(b, length_);
  }

  SymbolWord concat(const SymbolWord& o) const {
    if (length_ + o.length_ > kMaxLength) fail(ErrorKind::Precondition, "symbol word exceeds maximum length");
    return from_bits(bits_ | (o.bits_ << length_), length_ + o.length_);
  }

  SymbolWord repeated(int times) const {
    SymbolWord w;
    for (int i = 0; i < times; ++i) w = w.concat(*this);
    return w;
  }

  /// Mirror image under x -> -x (swaps L and R).
  SymbolWord swapped() const { return from_bits(~bits_, length_); }

  bool is_primitive() const {
    for (int p = 1; p < length_; ++p)
      if (length_ % p == 0 && rotated(p) == *this) return false;
    return length_ > 0;
  }

  /// Lexicographically least rotation (L < R) of the cyclic word.
  SymbolWord least_rotation() const {
    SymbolWord best = *this;
    for (int k = 1; k < length_; ++k) {
      const SymbolWord r = rotated(k);
      if (lex_compare(r, best) < 0) best = r;
    }
    return best;
  }

  int count(Symbol s) const {
    const int r = std::popcount(bits_);
    return s == Symbol::R ? r : length_ - r;
  }

  std::string str() const {
    std::string s(static_cast<std::size_t>(length_), 'L');
    for (int i = 0; i < length_; ++i)
      if ((*this)[i] == Symbol::R) s[static_cast<std::size_t>(i)] = 'R';
    return s;
  }

  /// Lexicographic order with L < R; a proper prefix sorts first.
  static int lex_compare(const SymbolWord& a, const SymbolWord& b) {
    const int n = std::min(a.length_, b.length_);
    const std::uint64_t diff = (a.bits_ ^ b.bits_) & mask(n);
    if (diff != 0) {
      const int i = std::countr_zero(diff);
      return a[i] == Symbol::L ? -1 : 1;
    }
    return (a.length_ > b.length_) - (a.length_ < b.length_);
  }

  bool operator==(const SymbolWord&) const = default;

  // Canonical order: by length, then lexicographic.
  std::strong_ordering operator<=>(const SymbolWord& o) const {
    if (length_ != o.length_) return length_ <=> o.length_;
    const int c = lex_compare(*this, o);
    return c < 0 ? std::strong_ordering::less : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  static std::uint64_t mask(int n) { return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

  std::uint64_t bits_ = 0;
  int length_ = 0;
};

struct SymbolWordHash {
  std::size_t operator()(const SymbolWord& w) const noexcept {
    return std::hash<std::uint64_t>{}(w.bits() * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint64_t>(w.length()));
  }
};

/// Thrown when a forward orbit lands on (or within 1e-14 of) the singular line.
class SingularOrbitError : public Error {
 public:
  SingularOrbitError(int index, double value)
      : Error(ErrorKind::Domain, "orbit hits the singular line x = 0 at index " + std::to_string(index) +
                                     " (value " + std::to_string(value) + ")"),
        index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

inline constexpr double kSingularTolerance = 1e-14;

inline SymbolWord itinerary_of(const LorenzMap1D& map, double x, int n) {
  require(n >= 1 && n <= SymbolWord::kMaxLength, "itinerary_of: n out of range");
  map.check_domain(x);
  SymbolWord w;
  for (int j = 0; j < n; ++j) {
    if (std::abs(x) < kSingularTolerance) throw SingularOrbitError(j, x);
    w = w.appended(x < 0.0 ? Symbol::L : Symbol::R);
    if (j + 1 < n) x = map.raw(x);
  }
  return w;
}

struct CylinderInterval {
  SymbolWord word;
  Interval interval;
  bool nonempty = false;
};

/// Closure of the set of points whose itinerary starts with `word`, obtained
/// by composing contracting inverse branches from the last symbol backwards.
inline CylinderInterval cylinder_interval(const LorenzMap1D& map, const SymbolWord& word) {
  CylinderInterval c{word, {-1.0, 1.0}, true};
  Interval j{-1.0, 1.0};
  for (int i = word.length() - 1; i >= 0; --i) {
    const Symbol s = word[i];
    const Interval img = map.branch_image(s);
    const Interval k{std::max(j.lo, img.lo), std::min(j.hi, img.hi)};
    if (!(k.hi > k.lo)) {
      c.nonempty = false;
      c.interval = {0.0, 0.0};
      return c;
    }
    j = {map.inverse(s, k.lo), map.inverse(s, k.hi)};
    if (s == Symbol::R) j.lo = std::max(j.lo, 0.0);
    else j.hi = std::min(j.hi, 0.0);
    if (!(j.hi > j.lo)) {
      c.nonempty = false;
      c.interval = {0.0, 0.0};
      return c;
    }
  }
  c.interval = j;
  return c;
}

/// Itineraries of the one-sided critical values f(0-) = 1 and f(0+) = -1.
struct KneadingPair {
  SymbolWord k_minus;  // itinerary of 1^-
  SymbolWord k_plus;   // itinerary of (-1)^+
  int depth = 0;
  // First index at which the corresponding critical orbit lands on 0, or -1.
  int minus_terminated_at = -1;
  int plus_terminated_at = -1;
};

/// The k-th symbol of 1^- is R iff the R-extension of the current cylinder is
/// nonempty (it is then the right-most piece, which contains 1); symmetric
/// for (-1)^+. Cylinders come from inverse branches, so digits are not lost
/// the way forward iteration of the critical orbit loses them.
inline KneadingPair kneading(const LorenzMap1D& map, int depth) {
  require(depth >= 1 && depth <= SymbolWord::kMaxLength, "kneading: depth out of range");
  KneadingPair k;
  k.depth = depth;
  auto follow = [&](Symbol outer, int& terminated) {
    const Symbol inner = outer == Symbol::R ? Symbol::L : Symbol::R;
    SymbolWord w;
    for (int i = 0; i < depth; ++i) {
      const CylinderInterval c_out = cylinder_interval(map, w.appended(outer));
      const CylinderInterval c_in = cylinder_interval(map, w.appended(inner));
      const double tiny = 1e-15;
      if (terminated < 0 && ((c_out.nonempty && c_out.interval.length() < tiny) ||
                             (c_in.nonempty && c_in.interval.length() < tiny)))
        terminated = i;
      w = w.appended(c_out.nonempty ? outer : inner);
    }
    return w;
  };
  k.k_minus = follow(Symbol::R, k.minus_terminated_at);
  k.k_plus = follow(Symbol::L, k.plus_terminated_at);
  return k;
}

/// Finite-word admissibility: the word is realised by some point iff every
/// shift lies between the kneading prefixes of the same length.
inline bool is_admissible(const SymbolWord& word, const KneadingPair& kn) {
  if (kn.depth < word.length())
    fail(ErrorKind::Precondition, "is_admissible: insufficient kneading depth (" + std::to_string(kn.depth) +
                                      " < " + std::to_string(word.length()) + ")");
  for (int n = 0; n < word.length(); ++n) {
    const SymbolWord tail = word.shifted(n);
    const int len = tail.length();
    if (SymbolWord::lex_compare(tail, kn.k_plus.prefix(len)) < 0) return false;
    if (SymbolWord::lex_compare(tail, kn.k_minus.prefix(len)) > 0) return false;
  }
  return true;
}

/// Admissibility of the periodic extension: every shift of w w w ... lies
/// strictly between k_plus and k_minus (compared to the kneading depth).
inline bool is_periodic_admissible(const SymbolWord& word, const KneadingPair& kn) {
  const int n = word.length();
  if (kn.depth < 2 * n)
    fail(ErrorKind::Precondition, "is_periodic_admissible: kneading depth must be >= 2 * word length");
  const int d = kn.depth;
  for (int r = 0; r < n; ++r) {
    const SymbolWord rot = word.rotated(r);
    auto cmp = [&](const SymbolWord& k) {
      for (int i = 0; i < d; ++i) {
        const Symbol a = rot[i % n], b = k[i];
        if (a != b) return a == Symbol::L ? -1 : 1;
      }
      return 0;
    };
    if (cmp(kn.k_plus) <= 0) return false;
    if (cmp(kn.k_minus) >= 0) return false;
  }
  return true;
}

/// All words of length n with nonempty cylinders, in lexicographic order.
inline std::vector<CylinderInterval> admissible_cylinders(const LorenzMap1D& map, int n) {
  require(n >= 1 && n <= SymbolWord::kMaxLength, "admissible_cylinders: length out of range");
  std::vector<SymbolWord> level{SymbolWord{}};
  for (int k = 0; k < n; ++k) {
    std::vector<SymbolWord> next;
    next.reserve(level.size() * 2);
    for (const auto& w : level)
      for (Symbol s : {Symbol::L, Symbol::R}) {
        const SymbolWord ws = w.appended(s);
        if (cylinder_interval(map, ws).nonempty) next.push_back(ws);
      }
    level = std::move(next);
  }
  std::vector<CylinderInterval> out;
  out.reserve(level.size());
  for (const auto& w : level) out.push_back(cylinder_interval(map, w));
  return out;
}

struct PeriodicOrbitRecord {
  SymbolWord word;
  double point = 0.0;
  double multiplier = 0.0;
  std::vector<double> orbit;  // orbit[k] = f^k(point)

  int period() const { return word.length(); }
};

/// The periodic point with itinerary word^infinity: fixed point of the
/// composed inverse branches along the word.
inline PeriodicOrbitRecord find_periodic_point(const LorenzMap1D& map, const SymbolWord& word) {
  require(!word.empty(), "find_periodic_point: empty word");
  if (!word.is_primitive())
    fail(ErrorKind::Precondition, "find_periodic_point: word " + word.str() + " is not primitive");
  const int n = word.length();
  auto inadmissible = [&]() {
    fail(ErrorKind::Precondition, "find_periodic_point: word " + word.str() + " is not periodic-admissible");
  };

  std::vector<double> orbit(static_cast<std::size_t>(n));
  bool clamped = false;
  auto pull_back = [&](double x) {
    clamped = false;
    for (int k = n - 1; k >= 0; --k) {
      const Symbol s = word[k];
      const Interval img = map.branch_image(s);
      if (x < img.lo || x > img.hi) clamped = true;
      x = map.inverse(s, x);
      orbit[static_cast<std::size_t>(k)] = x;
    }
    return x;
  };

  double x = word.front() == Symbol::R ? 0.5 : -0.5;
  bool converged = false;
  for (int it = 0; it < 20000; ++it) {
    const double next = pull_back(x);
    const bool settled = std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x));
    x = next;
    if (settled) {
      converged = true;
      break;
    }
  }
  if (!converged) fail(ErrorKind::Internal, "find_periodic_point: contraction iteration did not converge");
  x = pull_back(x);
  if (clamped) inadmissible();

  PeriodicOrbitRecord rec;
  rec.word = word;
  rec.point = x;
  rec.multiplier = 1.0;
  for (int k = 0; k < n; ++k) {
    const double p = orbit[static_cast<std::size_t>(k)];
    if (std::abs(p) < kSingularTolerance) inadmissible();
    if ((p < 0.0) != (word[k] == Symbol::L)) inadmissible();
    rec.multiplier *= map.derivative(p);
  }
  rec.orbit = std::move(orbit);

  // Forward replay as postcondition.
  double y = x;
  for (int k = 0; k < n; ++k) y = map.raw(y);
  if (std::abs(y - x) > 1e-10)
    fail(ErrorKind::Internal, "find_periodic_point: forward replay mismatch for " + word.str());
  return rec;
}

namespace detail {

// Duval's algorithm: Lyndon words (primitive least rotations) of length <= n
// in lexicographic order.
inline std::vector<SymbolWord> lyndon_words(int n) {
  std::vector<SymbolWord> out;
  std::vector<int> w{-1};
  while (!w.empty()) {
    ++w.back();
    const int m = static_cast<int>(w.size());
    SymbolWord word;
    for (int v : w) word = word.appended(v ? Symbol::R : Symbol::L);
    out.push_back(word);
    while (static_cast<int>(w.size()) < n) w.push_back(w[w.size() - static_cast<std::size_t>(m)]);
    while (!w.empty() && w.back() == 1) w.pop_back();
  }
  return out;
}

}  // namespace detail

inline constexpr int kDefaultMaxPeriod = 16;
inline constexpr int kMaxEnumeratedPeriod = 24;

/// One record per primitive periodic orbit of period <= n_max, ordered by
/// period then by the lexicographically least rotation.
inline std::vector<PeriodicOrbitRecord> enumerate_periodic(const LorenzMap1D& map, int n_max) {
  require(n_max >= 1 && n_max <= kMaxEnumeratedPeriod,
          "enumerate_periodic: n_max must be in [1, " + std::to_string(kMaxEnumeratedPeriod) + "]");
  std::vector<SymbolWord> words = detail::lyndon_words(n_max);
  std::sort(words.begin(), words.end());
  std::vector<PeriodicOrbitRecord> out;
  for (const auto& w : words) {
    // Cheap necessary condition first: the cylinder of w w must be nonempty.
    if (!cylinder_interval(map, w.repeated(std::min(2, SymbolWord::kMaxLength / w.length()))).nonempty) continue;
    try {
      out.push_back(find_periodic_point(map, w));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Precondition) throw;
    }
  }
  return out;
}

/// Number of points of (not necessarily least) period n, from primitive
/// orbit counts.
inline long long periodic_point_count(const std::vector<PeriodicOrbitRecord>& orbits, int n) {
  long long c = 0;
  for (const auto& o : orbits)
    if (n % o.period() == 0) c += o.period();
  return c;
}

/// Subshift of finite type over depth-m words. For horseshoes built from the
/// map every edge u -> v satisfies [v] within f([u]), so every path of the
/// graph is realised by an orbit.
struct SFTHorseshoe {
  int depth = 0;
  double x_gap = 0.0;
  std::vector<SymbolWord> vertices;
  Digraph adjacency;
  std::optional<LorenzMap1D> map;  // absent for abstract shifts
  int candidate_count = 0;         // admissible words passing the gap test

  int size() const { return static_cast<int>(vertices.size()); }

  int index_of(const SymbolWord& w) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), w);
    return (it != vertices.end() && *it == w) ? static_cast<int>(it - vertices.begin()) : -1;
  }
};

/// Abstract shift over the given vertex words and edges (used for the full
/// shift and the golden-mean shift, which carry no geometry).
inline SFTHorseshoe abstract_sft(std::vector<SymbolWord> vertices, std::vector<std::pair<int, int>> edges) {
  require(!vertices.empty(), "abstract_sft: no vertices");
  const int m = vertices.front().length();
  for (const auto& v : vertices) require(v.length() == m, "abstract_sft: vertex words must share one length");
  require(std::is_sorted(vertices.begin(), vertices.end()), "abstract_sft: vertices must be sorted");
  SFTHorseshoe hs;
  hs.depth = m;
  hs.candidate_count = static_cast<int>(vertices.size());
  hs.adjacency = Digraph(static_cast<int>(vertices.size()), std::move(edges));
  hs.vertices = std::move(vertices);
  return hs;
}

inline SFTHorseshoe full_two_shift() {
  return abstract_sft({SymbolWord::parse("L"), SymbolWord::parse("R")}, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
}

/// Golden-mean shift: R may not follow R.
inline SFTHorseshoe golden_mean_shift() {
  return abstract_sft({SymbolWord::parse("L"), SymbolWord::parse("R")}, {{0, 0}, {0, 1}, {1, 0}});
}

inline double sft_entropy(const SFTHorseshoe& hs) {
  const std::vector<double> zero(static_cast<std::size_t>(hs.size()), 0.0);
  return log_spectral_radius(hs.adjacency, zero).log_radius;
}

class EmptyHorseshoeError : public Error {
 public:
  explicit EmptyHorseshoeError(const std::string& what) : Error(ErrorKind::Precondition, what) {}
};

/// Horseshoe over depth-`depth` cylinders at distance >= x_gap from the
/// singular line. Edges require shift compatibility and the covering
/// condition [v] within the branch image of u's first symbol; the result is
/// the cyclic component of largest entropy, so it is transitive.
inline SFTHorseshoe build_horseshoe(const LorenzMap1D& map, int depth, double x_gap) {
  require(x_gap > 0.0 && x_gap < 1.0, "build_horseshoe: x_gap must be in (0,1)");
  require(depth >= 2 && depth <= 30, "build_horseshoe: depth must be in [2,30]");
  std::vector<CylinderInterval> cyl;
  for (auto& c : admissible_cylinders(map, depth))
    if (c.interval.distance_to_zero() >= x_gap) cyl.push_back(c);
  if (cyl.empty())
    throw EmptyHorseshoeError("build_horseshoe: no depth-" + std::to_string(depth) +
                              " cylinder keeps distance " + std::to_string(x_gap) + " from the singular line");

  std::vector<SymbolWord> words;
  words.reserve(cyl.size());
  for (const auto& c : cyl) words.push_back(c.word);
  std::vector<std::size_t> order(words.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return words[a] < words[b]; });
  std::vector<CylinderInterval> sorted;
  sorted.reserve(cyl.size());
  for (auto i : order) sorted.push_back(cyl[i]);
  cyl = std::move(sorted);
  words.clear();
  for (const auto& c : cyl) words.push_back(c.word);

  std::unordered_map<SymbolWord, int, SymbolWordHash> index;
  for (std::size_t i = 0; i < words.size(); ++i) index.emplace(words[i], static_cast<int>(i));

  std::vector<std::pair<int, int>> edges;
  for (std::size_t u = 0; u < words.size(); ++u) {
    const Interval img = map.branch_image(words[u].front());
    const SymbolWord tail = words[u].shifted(1);
    for (Symbol s : {Symbol::L, Symbol::R}) {
      auto it = index.find(tail.appended(s));
      if (it == index.end()) continue;
      if (img.contains(cyl[static_cast<std::size_t>(it->second)].interval))
        edges.emplace_back(static_cast<int>(u), it->second);
    }
  }
  const Digraph full(static_cast<int>(words.size()), std::move(edges));

  const auto comps = cyclic_components(full);
  if (comps.empty())
    throw EmptyHorseshoeError("build_horseshoe: no cycle survives the gap " + std::to_string(x_gap));
  std::size_t best = 0;
  double best_h = -1.0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const std::vector<double> zero(comps[i].size(), 0.0);
    const double h = perron(full.induced(comps[i]), zero, 1e-13, false).log_lambda;
    if (h > best_h + 1e-12 || (std::abs(h - best_h) <= 1e-12 && comps[i].size() > comps[best].size())) {
      best = i;
      best_h = h;
    }
  }

  SFTHorseshoe hs;
  hs.depth = depth;
  hs.x_gap = x_gap;
  hs.map = map;
  hs.candidate_count = static_cast<int>(words.size());
  for (int v : comps[best]) hs.vertices.push_back(words[static_cast<std::size_t>(v)]);
  hs.adjacency = full.induced(comps[best]);
  return hs;
}

/// Depth-d cylinder graph: vertices are admissible d-words, u -> v iff u and
/// v overlap in d-1 symbols and the (d+1)-word they span is admissible.
struct CylinderGraph {
  int depth = 0;
  std::vector<CylinderInterval> cylinders;
  Digraph graph;
};

inline CylinderGraph cylinder_graph(const LorenzMap1D& map, int depth) {
  require(depth >= 1 && depth <= 24, "cylinder_graph: depth must be in [1,24]");
  CylinderGraph g;
  g.depth = depth;
  g.cylinders = admissible_cylinders(map, depth);
  std::unordered_map<SymbolWord, int, SymbolWordHash> index;
  for (std::size_t i = 0; i < g.cylinders.size(); ++i) index.emplace(g.cylinders[i].word, static_cast<int>(i));
  std::vector<std::pair<int, int>> edges;
  for (std::size_t u = 0; u < g.cylinders.size(); ++u)
    for (Symbol s : {Symbol::L, Symbol::R}) {
      const SymbolWord ext = g.cylinders[u].word.appended(s);
      auto it = index.find(ext.shifted(1));
      if (it == index.end()) continue;
      if (cylinder_interval(map, ext).nonempty) edges.emplace_back(static_cast<int>(u), it->second);
    }
  g.graph = Digraph(static_cast<int>(g.cylinders.size()), std::move(edges));
  return g;
}

/// Lap number of f^n (number of maximal intervals on which f^n is continuous
/// and monotone), counted by splitting forward images at the singular line.
inline long long lap_number(const LorenzMap1D& map, int n) {
  require(n >= 1 && n <= 40, "lap_number: n must be in [1,40]");
  // Each piece is the current image interval f^k(J) of a lap J.
  std::vector<Interval> pieces{{-1.0, 1.0}};
  for (int k = 0; k < n; ++k) {
    std::vector<Interval> next;
    next.reserve(pieces.size() * 2);
    for (const auto& p : pieces) {
      if (p.lo < 0.0) {
        const double hi = std::min(p.hi, 0.0);
        next.push_back({map.raw(p.lo), hi == 0.0 ? 1.0 : map.raw(hi)});
      }
      if (p.hi > 0.0) {
        const double lo = std::max(p.lo, 0.0);
        next.push_back({lo == 0.0 ? -1.0 : map.raw(lo), map.raw(p.hi)});
      }
    }
    pieces = std::move(next);
  }
  return static_cast<long long>(pieces.size());
}

/// Topological entropy from lap-number growth, log(l_n / l_{n-k}) / k.
inline double lap_entropy(const LorenzMap1D& map, int n, int k = 4) {
  require(n > k && k >= 1, "lap_entropy: need n > k >= 1");
  return (std::log(static_cast<double>(lap_number(map, n))) -
          std::log(static_cast<double>(lap_number(map, n - k)))) /
         k;
}

}  // namespace lorenz

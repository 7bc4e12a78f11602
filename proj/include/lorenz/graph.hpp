#pragma once

// Sparse directed graphs and Perron-Frobenius eigendata for matrices of the
// form M[u][v] = A[u][v] * exp(g[v]).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "lorenz/errors.hpp"

namespace lorenz {

class Digraph {
 public:
  Digraph() = default;

  Digraph(int n, std::vector<std::pair<int, int>> edges) : n_(n) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    out_ptr_.assign(n + 1, 0);
    in_ptr_.assign(n + 1, 0);
    for (auto [u, v] : edges) {
      ++out_ptr_[u + 1];
      ++in_ptr_[v + 1];
    }
    std::partial_sum(out_ptr_.begin(), out_ptr_.end(), out_ptr_.begin());
    std::partial_sum(in_ptr_.begin(), in_ptr_.end(), in_ptr_.begin());
    out_.resize(edges.size());
    in_.resize(edges.size());
    std::vector<int> ofill(out_ptr_.begin(), out_ptr_.end() - 1);
    std::vector<int> ifill(in_ptr_.begin(), in_ptr_.end() - 1);
    for (auto [u, v] : edges) {
      out_[ofill[u]++] = v;
      in_[ifill[v]++] = u;
    }
    // Predecessor lists sorted for deterministic summation order.
    for (int v = 0; v < n; ++v) std::sort(in_.begin() + in_ptr_[v], in_.begin() + in_ptr_[v + 1]);
  }

  int size() const { return n_; }
  std::size_t edge_count() const { return out_.size(); }

  std::span<const int> successors(int u) const {
    return {out_.data() + out_ptr_[u], static_cast<std::size_t>(out_ptr_[u + 1] - out_ptr_[u])};
  }
  std::span<const int> predecessors(int v) const {
    return {in_.data() + in_ptr_[v], static_cast<std::size_t>(in_ptr_[v + 1] - in_ptr_[v])};
  }
  bool has_edge(int u, int v) const {
    auto s = successors(u);
    return std::binary_search(s.begin(), s.end(), v);
  }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> e;
    e.reserve(out_.size());
    for (int u = 0; u < n_; ++u)
      for (int v : successors(u)) e.emplace_back(u, v);
    return e;
  }

  /// Subgraph induced by `vertices` (renumbered in the given order).
  Digraph induced(const std::vector<int>& vertices) const {
    std::vector<int> index(n_, -1);
    for (std::size_t i = 0; i < vertices.size(); ++i) index[vertices[i]] = static_cast<int>(i);
    std::vector<std::pair<int, int>> e;
    for (std::size_t i = 0; i < vertices.size(); ++i)
      for (int v : successors(vertices[i]))
        if (index[v] >= 0) e.emplace_back(static_cast<int>(i), index[v]);
    return Digraph(static_cast<int>(vertices.size()), std::move(e));
  }

 private:
  int n_ = 0;
  std::vector<int> out_ptr_{0}, out_, in_ptr_{0}, in_;
};

/// Strongly connected components that carry a cycle (size > 1 or a
/// self-loop). Each component is sorted; components are ordered by their
/// smallest vertex.
inline std::vector<std::vector<int>> cyclic_components(const Digraph& g) {
  const int n = g.size();
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<char> on_stack(n, 0);
  std::vector<std::vector<int>> comps;
  int counter = 0;
  // Iterative Tarjan; frames hold (vertex, next successor position).
  std::vector<std::pair<int, std::size_t>> frames;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    frames.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      auto& [u, pos] = frames.back();
      auto succ = g.successors(u);
      if (pos < succ.size()) {
        const int v = succ[pos++];
        if (index[v] < 0) {
          index[v] = low[v] = counter++;
          stack.push_back(v);
          on_stack[v] = 1;
          frames.emplace_back(v, 0);
        } else if (on_stack[v]) {
          low[u] = std::min(low[u], index[v]);
        }
        continue;
      }
      const int done = u;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
      if (low[done] == index[done]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != done);
        if (comp.size() > 1 || g.has_edge(done, done)) {
          std::sort(comp.begin(), comp.end());
          comps.push_back(std::move(comp));
        }
      }
    }
  }
  std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return comps;
}

struct PerronResult {
  double log_lambda = -std::numeric_limits<double>::infinity();
  std::vector<double> right;  // M r = lambda r, max-normalised
  std::vector<double> left;   // l M = lambda l, max-normalised
  int iterations = 0;
  bool converged = false;
};

namespace detail {

// Shifted power iteration with Collatz-Wielandt bracketing. `apply` writes
// y = B x for the scaled matrix B; x stays strictly positive because the
// shift adds a positive multiple of x.
template <class Apply>
inline double perron_vector(int n, Apply apply, std::vector<double>& x, double tol, int max_iter,
                            int& iterations, bool& converged) {
  x.assign(n, 1.0);
  std::vector<double> y(n);
  double lambda = 0.0;
  converged = false;
  for (iterations = 1; iterations <= max_iter; ++iterations) {
    apply(x, y);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ratio = y[i] / x[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    lambda = 0.5 * (lo + hi);
    if (hi - lo <= tol * hi) {
      converged = true;
      break;
    }
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] = y[i] + lo * x[i];
      norm = std::max(norm, x[i]);
    }
    for (double& v : x) v /= norm;
  }
  return lambda;
}

}  // namespace detail

/// Perron root and eigenvectors of M[u][v] = A[u][v] exp(g[v]) for an
/// irreducible A. Weights are rescaled by exp(-max g) internally so large
/// |g| cannot overflow.
inline PerronResult perron(const Digraph& a, std::span<const double> g, double tol = 1e-13,
                           bool with_left = true, int max_iter = 200000) {
  const int n = a.size();
  require(n > 0, "perron: empty graph");
  require(static_cast<int>(g.size()) == n, "perron: weight vector size mismatch");
  const double gmax = *std::max_element(g.begin(), g.end());
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = std::exp(g[i] - gmax);

  PerronResult res;
  int it_r = 0, it_l = 0;
  bool ok_r = false, ok_l = false;
  const double lam = detail::perron_vector(
      n,
      [&](const std::vector<double>& x, std::vector<double>& y) {
        for (int u = 0; u < n; ++u) {
          double s = 0.0;
          for (int v : a.successors(u)) s += w[v] * x[v];
          y[u] = s;
        }
      },
      res.right, tol, max_iter, it_r, ok_r);
  if (with_left) {
    detail::perron_vector(
      n,
      [&](const std::vector<double>& x, std::vector<double>& y) {
        for (int v = 0; v < n; ++v) {
          double s = 0.0;
          for (int u : a.predecessors(v)) s += x[u];
          y[v] = w[v] * s;
        }
      },
      res.left, tol, max_iter, it_l, ok_l);
  } else {
    ok_l = true;
  }
  res.log_lambda = std::log(lam) + gmax;
  res.iterations = std::max(it_r, it_l);
  res.converged = ok_r && ok_l;
  return res;
}

struct SpectralRadiusResult {
  double log_radius = -std::numeric_limits<double>::infinity();
  int components = 0;
  int iterations = 0;
  bool converged = true;
};

/// log spectral radius of M[u][v] = A[u][v] exp(g[v]) for arbitrary A: the
/// maximum over cyclic strongly connected components.
inline SpectralRadiusResult log_spectral_radius(const Digraph& a, std::span<const double> g,
                                                double tol = 1e-13) {
  SpectralRadiusResult out;
  for (const auto& comp : cyclic_components(a)) {
    const Digraph sub = a.induced(comp);
    std::vector<double> gs(comp.size());
    for (std::size_t i = 0; i < comp.size(); ++i) gs[i] = g[comp[i]];
    const PerronResult p = perron(sub, gs, tol, false);
    ++out.components;
    out.iterations += p.iterations;
    out.converged = out.converged && p.converged;
    out.log_radius = std::max(out.log_radius, p.log_lambda);
  }
  return out;
}

}  // namespace lorenz

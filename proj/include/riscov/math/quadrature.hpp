#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <type_traits>
#include <utility>
#include <vector>

#include "riscov/errors.hpp"

namespace riscov::quad {

// Gauss-Kronrod 7-15 pair, QUADPACK abscissae. The embedded 7-point Gauss
// rule provides the error estimate |I15 - I7| per panel.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double norm_of(double v) { return std::abs(v); }
inline double norm_of(const std::complex<double>& v) { return std::abs(v); }

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_panels = 4000;
};

template <typename V>
struct Result {
  V value{};
  double error = 0.0;
  int evals = 0;
};

namespace detail {

template <typename F>
using value_t = std::invoke_result_t<F, double>;

template <typename V>
struct Panel {
  double a, b;
  V value;
  double err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

template <typename F, typename V = value_t<F>>
Panel<V> gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const V fc = f(c);
  V ik = kWgk[7] * fc;
  V ig = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const V f1 = f(c - dx);
    const V f2 = f(c + dx);
    ik += kWgk[j] * (f1 + f2);
    if (j & 1) ig += kWg[(j - 1) / 2] * (f1 + f2);
  }
  ik *= h;
  ig *= h;
  return Panel<V>{a, b, ik, norm_of(ik - ig)};
}

// Shared adaptive loop. Bisects the worst panel until the summed error
// estimate passes max(abs_tol, rel_tol*|total|) or the budget runs out.
// Panels that reach machine resolution are frozen with their estimate.
template <typename F, typename V = value_t<F>>
struct AdaptiveState {
  std::priority_queue<Panel<V>> heap;
  std::vector<Panel<V>> frozen;
  V total{};
  double err_total = 0.0;
  int evals = 0;
  int panels = 0;

  void seed(F& f, const std::vector<double>& edges) {
    if (edges.size() < 2)
      throw DomainError("quadrature: need at least two edges");
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      if (!(edges[i] < edges[i + 1]))
        throw DomainError("quadrature: edges must be strictly increasing");
      push(gk15(f, edges[i], edges[i + 1]));
    }
  }

  void push(Panel<V> p) {
    total += p.value;
    err_total += p.err;
    evals += 15;
    ++panels;
    heap.push(std::move(p));
  }

  double target(const Options& opt) const {
    return std::max(opt.abs_tol, opt.rel_tol * norm_of(total));
  }

  void run(F& f, const Options& opt) {
    while (err_total > target(opt) && panels < opt.max_panels) {
      Panel<V> worst = heap.top();
      heap.pop();
      const double mid = 0.5 * (worst.a + worst.b);
      if (mid <= worst.a || mid >= worst.b) {
        err_total -= worst.err;
        worst.err = 0.0;
        frozen.push_back(worst);
        continue;
      }
      total -= worst.value;
      err_total -= worst.err;
      --panels;
      push(gk15(f, worst.a, mid));
      push(gk15(f, mid, worst.b));
    }
    if (err_total > target(opt)) {
      const double denom = std::max(norm_of(total), 1e-300);
      throw ConvergenceError("adaptive quadrature: panel budget exhausted",
                             err_total / denom, opt.rel_tol);
    }
  }
};

}  // namespace detail

// Adaptive integration over a pre-partitioned interval. `edges` must be
// strictly increasing; pass {a, b} for a plain interval, or seed interior
// breakpoints when the integrand spans many scales (decade seeding keeps
// bisection depth small).
template <typename F, typename V = detail::value_t<F>>
Result<V> integrate_seeded(F&& f, const std::vector<double>& edges,
                           const Options& opt = {}) {
  detail::AdaptiveState<F, V> st;
  st.seed(f, edges);
  st.run(f, opt);
  return Result<V>{st.total, st.err_total, st.evals};
}

template <typename F, typename V = detail::value_t<F>>
Result<V> integrate(F&& f, double a, double b, const Options& opt = {}) {
  return integrate_seeded(std::forward<F>(f), std::vector<double>{a, b}, opt);
}

// Integral over [a, inf) for a > 0 via x = a/t, t in (0,1]:
//   int_a^inf f(x) dx = int_0^1 f(a/t) a/t^2 dt.
// Power-law tails f ~ x^(-p), p > 1 become t^(p-2) near t = 0, which the
// adaptive rule resolves without special handling (endpoints never hit).
template <typename F>
auto integrate_semi_infinite(F&& f, double a, const Options& opt = {}) {
  if (!(a > 0.0)) throw DomainError("integrate_semi_infinite: a must be > 0");
  auto g = [&f, a](double t) { return f(a / t) * (a / (t * t)); };
  return integrate_seeded(g, std::vector<double>{0.0, 0.5, 1.0}, opt);
}

// A frozen quadrature rule: evaluate any later integrand as sum(w_i f(x_i)).
// Built once from a probe integrand at the most demanding real argument and
// replayed at complex arguments, where the probe's panel layout still
// resolves the (argument-independent) geometric structure.
struct NodeSet {
  std::vector<double> x;
  std::vector<double> w;

  template <typename G>
  auto apply(G&& g) const {
    using V = std::invoke_result_t<G, double>;
    V acc{};
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * g(x[i]);
    return acc;
  }
};

template <typename F>
NodeSet build_nodes(F&& probe, const std::vector<double>& edges,
                    const Options& opt = {}) {
  using V = detail::value_t<F>;
  detail::AdaptiveState<F, V> st;
  st.seed(probe, edges);
  st.run(probe, opt);
  std::vector<std::pair<double, double>> intervals;
  intervals.reserve(st.panels);
  for (const auto& p : st.frozen) intervals.emplace_back(p.a, p.b);
  while (!st.heap.empty()) {
    intervals.emplace_back(st.heap.top().a, st.heap.top().b);
    st.heap.pop();
  }
  std::sort(intervals.begin(), intervals.end());
  NodeSet ns;
  ns.x.reserve(intervals.size() * 15);
  ns.w.reserve(intervals.size() * 15);
  for (auto [a, b] : intervals) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    ns.x.push_back(c);
    ns.w.push_back(h * kWgk[7]);
    for (int j = 0; j < 7; ++j) {
      ns.x.push_back(c - h * kXgk[j]);
      ns.w.push_back(h * kWgk[j]);
      ns.x.push_back(c + h * kXgk[j]);
      ns.w.push_back(h * kWgk[j]);
    }
  }
  return ns;
}

// Uniform (trapezoid) rule on [0, 2pi). For smooth periodic integrands this
// converges geometrically in the node count; n doubles until the change
// passes tolerance. Returns equally weighted nodes.
template <typename F>
NodeSet build_periodic_nodes(F&& probe, const Options& opt = {}, int n0 = 16,
                             int n_max = 1 << 16) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  using V = detail::value_t<F>;
  int n = n0;
  V sum{};
  for (int k = 0; k < n; ++k) sum += probe(kTwoPi * k / n);
  V approx = sum * (kTwoPi / n);
  while (n < n_max) {
    V odd{};
    for (int k = 0; k < n; ++k) odd += probe(kTwoPi * (k + 0.5) / n);
    const V refined = (sum + odd) * (kTwoPi / (2 * n));
    const double change = norm_of(refined - approx);
    sum += odd;
    n *= 2;
    approx = refined;
    if (change <= std::max(opt.abs_tol, opt.rel_tol * norm_of(refined))) {
      NodeSet ns;
      ns.x.reserve(n);
      ns.w.assign(n, kTwoPi / n);
      for (int k = 0; k < n; ++k) ns.x.push_back(kTwoPi * k / n);
      return ns;
    }
  }
  throw ConvergenceError("build_periodic_nodes: node budget exhausted",
                         std::numeric_limits<double>::quiet_NaN(), opt.rel_tol);
}

// 2-D rule over an axis-aligned rectangle. Quadtree refinement with a
// tensor Gauss-Legendre 8x8 value and 5x5 comparison estimate per cell;
// final nodes are the 8x8 tensor points of the accepted cells. The probe
// must be real-valued (construction-time argument).
struct NodeSet2 {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> w;

  template <typename G>
  auto apply(G&& g) const {
    using V = std::invoke_result_t<G, double, double>;
    V acc{};
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * g(x[i], y[i]);
    return acc;
  }
};

namespace detail {

inline constexpr double kGl5x[5] = {-0.906179845938663992797626878299,
                                    -0.538469310105683091036314420700, 0.0,
                                    0.538469310105683091036314420700,
                                    0.906179845938663992797626878299};
inline constexpr double kGl5w[5] = {0.236926885056189087514264040720,
                                    0.478628670499366468041291514836,
                                    0.568888888888888888888888888889,
                                    0.478628670499366468041291514836,
                                    0.236926885056189087514264040720};
inline constexpr double kGl8x[8] = {-0.960289856497536231683560868569,
                                    -0.796666477413626739591553936476,
                                    -0.525532409916328985817739049189,
                                    -0.183434642495649804939476142360,
                                    0.183434642495649804939476142360,
                                    0.525532409916328985817739049189,
                                    0.796666477413626739591553936476,
                                    0.960289856497536231683560868569};
inline constexpr double kGl8w[8] = {0.101228536290376259152531354310,
                                    0.222381034453374470544355994426,
                                    0.313706645877887287337962201987,
                                    0.362683783378361982965150449277,
                                    0.362683783378361982965150449277,
                                    0.313706645877887287337962201987,
                                    0.222381034453374470544355994426,
                                    0.101228536290376259152531354310};

struct Cell {
  double x0, x1, y0, y1;
  double value;
  double err;
  bool operator<(const Cell& o) const { return err < o.err; }
};

template <typename F>
Cell eval_cell(F&& f, double x0, double x1, double y0, double y1) {
  const double cx = 0.5 * (x0 + x1), hx = 0.5 * (x1 - x0);
  const double cy = 0.5 * (y0 + y1), hy = 0.5 * (y1 - y0);
  double i8 = 0.0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      i8 += kGl8w[i] * kGl8w[j] * f(cx + hx * kGl8x[i], cy + hy * kGl8x[j]);
  double i5 = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      i5 += kGl5w[i] * kGl5w[j] * f(cx + hx * kGl5x[i], cy + hy * kGl5x[j]);
  i8 *= hx * hy;
  i5 *= hx * hy;
  return Cell{x0, x1, y0, y1, i8, std::abs(i8 - i5)};
}

}  // namespace detail

template <typename F>
NodeSet2 build_nodes_2d(F&& probe, double x0, double x1, double y0, double y1,
                        const Options& opt = {}, int max_cells = 2048) {
  std::priority_queue<detail::Cell> heap;
  auto root = detail::eval_cell(probe, x0, x1, y0, y1);
  double total = root.value;
  double err_total = root.err;
  int cells = 1;
  heap.push(root);
  while (err_total > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) &&
         cells < max_cells) {
    auto worst = heap.top();
    heap.pop();
    const double mx = 0.5 * (worst.x0 + worst.x1);
    const double my = 0.5 * (worst.y0 + worst.y1);
    detail::Cell kids[4] = {
        detail::eval_cell(probe, worst.x0, mx, worst.y0, my),
        detail::eval_cell(probe, mx, worst.x1, worst.y0, my),
        detail::eval_cell(probe, worst.x0, mx, my, worst.y1),
        detail::eval_cell(probe, mx, worst.x1, my, worst.y1)};
    total -= worst.value;
    err_total -= worst.err;
    for (auto& k : kids) {
      total += k.value;
      err_total += k.err;
      heap.push(k);
    }
    cells += 3;
  }
  if (err_total > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    throw ConvergenceError("build_nodes_2d: cell budget exhausted",
                           err_total / std::max(std::abs(total), 1e-300),
                           opt.rel_tol);
  }
  NodeSet2 ns;
  ns.x.reserve(static_cast<std::size_t>(cells) * 64);
  ns.y.reserve(static_cast<std::size_t>(cells) * 64);
  ns.w.reserve(static_cast<std::size_t>(cells) * 64);
  while (!heap.empty()) {
    const auto& c = heap.top();
    const double cx = 0.5 * (c.x0 + c.x1), hx = 0.5 * (c.x1 - c.x0);
    const double cy = 0.5 * (c.y0 + c.y1), hy = 0.5 * (c.y1 - c.y0);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        ns.x.push_back(cx + hx * detail::kGl8x[i]);
        ns.y.push_back(cy + hy * detail::kGl8x[j]);
        ns.w.push_back(hx * hy * detail::kGl8w[i] * detail::kGl8w[j]);
      }
    heap.pop();
  }
  return ns;
}

}  // namespace riscov::quad

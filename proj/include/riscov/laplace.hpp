#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "riscov/errors.hpp"
#include "riscov/math/quadrature.hpp"
#include "riscov/scene.hpp"

namespace riscov {

using Cx = std::complex<double>;

// A Laplace transform (or MGF, for the negated-argument desired-signal
// factors) with its convergence strip: eval is valid for Re(s) < s_max.
// Interference transforms of heavy-tailed aggregates have s_max pinned just
// above 0 (any positive exponential moment diverges); desired-signal MGFs
// carry the geometric bound derived at construction.
struct LaplaceFn {
  std::function<Cx(Cx)> eval;
  double s_max = std::numeric_limits<double>::infinity();
};

inline Cx int_pow(Cx base, int n) {
  Cx acc = 1.0;
  Cx b = base;
  int k = n;
  while (k > 0) {
    if (k & 1) acc *= b;
    b *= b;
    k >>= 1;
  }
  return acc;
}

inline LaplaceFn noise_laplace(double sigma2) {
  if (sigma2 < 0.0) throw DomainError("noise_laplace: sigma2 must be >= 0");
  return LaplaceFn{[sigma2](Cx s) { return std::exp(-s * sigma2); },
                   std::numeric_limits<double>::infinity()};
}

// Angular elimination integral
//   I(a, b) = int_0^{2pi} -b / (|a + e^(-i psi)|^2 - b) dpsi,
// where |a + e^(-i psi)|^2 = a^2 + 1 + 2a cos(psi) ranges over
// [(1-a)^2, (1+a)^2]. Closed form: with A = a^2 + 1 - b, B = 2a,
//   I = -2 pi b / (A sqrt(1 - (B/A)^2)).
// The factored form picks the branch continuously in b on the plane cut
// along the forbidden real segment: for complex b, Im(A) != 0 keeps A away
// from zero, and for real b outside the segment the sign of A carries the
// sign of the root (plain sqrt of A^2 - B^2 would lose it for b above the
// segment). Agrees with direct quadrature everywhere it is defined.
inline Cx elimination_integral(double a, Cx b) {
  if (a < 0.0) throw DomainError("elimination_integral: a must be >= 0");
  constexpr double kTwoPi = 2.0 * kPi;
  if (b == Cx(0.0, 0.0)) return 0.0;
  const double lo = (1.0 - a) * (1.0 - a);
  const double hi = (1.0 + a) * (1.0 + a);
  if (b.imag() == 0.0 && b.real() >= lo && b.real() <= hi) {
    throw SingularityError(
        "elimination_integral: pole on the contour (b inside [" +
        std::to_string(lo) + ", " + std::to_string(hi) + "])");
  }
  const Cx A = a * a + 1.0 - b;
  if (a == 0.0) return -kTwoPi * b / A;
  const Cx ratio = 2.0 * a / A;
  const Cx S = A * std::sqrt(1.0 - ratio * ratio);
  return -kTwoPi * b / S;
}

namespace detail {

// b(s) = s * P0 * M^2 * beta^2 / R^4, the dimensionless substitution the
// ring closed forms run on. At s = 1/(P0 g(r)) it reduces to
// M^2 beta r^alpha_nlos / R^4.
inline double ring_b_scale(double R, int elements, const NetworkParams& net) {
  const double beta = net.pathloss.beta;
  const double m2 = static_cast<double>(elements) * elements;
  return net.p0_watts * m2 * beta * beta / (R * R * R * R);
}

[[noreturn]] inline void throw_ring_divergence(double s_max) {
  throw DivergenceError(
      "reflected-signal MGF diverges: argument at or beyond strip boundary " +
      std::to_string(s_max),
      s_max);
}

}  // namespace detail

// Ring of PPP reflectors, Rayleigh fading on the reflected path:
//   L_{-Q_R}(s) = exp(-lambda_line * R * I(a, b(s))), a = r/R.
// MGF existence needs Re(b) < (1-a)^2 (equivalently Re(s) < s_max).
inline LaplaceFn circle_ppp_rayleigh_closed_form(double r, double R,
                                                 int elements,
                                                 double lambda_line,
                                                 const NetworkParams& net) {
  if (!(r > 0.0) || !(R > 0.0))
    throw DomainError("circle closed form: r and R must be positive");
  if (elements < 0) throw DomainError("circle closed form: M must be >= 0");
  if (lambda_line < 0.0)
    throw DomainError("circle closed form: lambda_line must be >= 0");
  const double a = r / R;
  const double u_min = (1.0 - a) * (1.0 - a);
  const double scale = detail::ring_b_scale(R, elements, net);
  if (elements == 0 || lambda_line == 0.0)
    return LaplaceFn{[](Cx) { return Cx(1.0); },
                     std::numeric_limits<double>::infinity()};
  const double s_max = u_min / scale;
  auto eval = [a, scale, u_min, s_max, lambda_line, R](Cx s) -> Cx {
    const Cx b = scale * s;
    if (b.real() >= u_min) detail::throw_ring_divergence(s_max);
    return std::exp(-lambda_line * R * elimination_integral(a, b));
  };
  return LaplaceFn{eval, s_max};
}

// Ring of n i.i.d. reflectors (BPP), Rayleigh fading: the n-th power of the
// single-reflector angular average 1 - I(a, b(s)) / (2 pi).
inline LaplaceFn circle_bpp_closed_form(double r, double R, int elements,
                                        int n, const NetworkParams& net) {
  if (!(r > 0.0) || !(R > 0.0))
    throw DomainError("circle closed form: r and R must be positive");
  if (elements < 0 || n < 0)
    throw DomainError("circle closed form: M and n must be >= 0");
  const double a = r / R;
  const double u_min = (1.0 - a) * (1.0 - a);
  const double scale = detail::ring_b_scale(R, elements, net);
  if (elements == 0 || n == 0)
    return LaplaceFn{[](Cx) { return Cx(1.0); },
                     std::numeric_limits<double>::infinity()};
  const double s_max = u_min / scale;
  auto eval = [a, scale, u_min, s_max, n](Cx s) -> Cx {
    const Cx b = scale * s;
    if (b.real() >= u_min) detail::throw_ring_divergence(s_max);
    const Cx mean = 1.0 - elimination_integral(a, b) / (2.0 * kPi);
    return int_pow(mean, n);
  };
  return LaplaceFn{eval, s_max};
}

// Ring of n i.i.d. reflectors with Nakagami-2 fading. Single-reflector
// angular average of the squared-denominator kernel:
//   J = 1 + (2 b (1-a^2)^2 - 3 b^2 (1+a^2) + b^3) / S^3, b -> b(s)/2,
// with S the same branch-corrected root used by the elimination integral.
inline LaplaceFn circle_nakagami2_closed_form(double r, double R, int elements,
                                              int n,
                                              const NetworkParams& net) {
  if (!(r > 0.0) || !(R > 0.0))
    throw DomainError("circle closed form: r and R must be positive");
  if (elements < 0 || n < 0)
    throw DomainError("circle closed form: M and n must be >= 0");
  const double a = r / R;
  const double u_min = (1.0 - a) * (1.0 - a);
  const double scale = detail::ring_b_scale(R, elements, net);
  if (elements == 0 || n == 0)
    return LaplaceFn{[](Cx) { return Cx(1.0); },
                     std::numeric_limits<double>::infinity()};
  // Gamma(2, 1/2) power: strip boundary at b/2 = u_min.
  const double s_max = 2.0 * u_min / scale;
  auto eval = [a, scale, u_min, s_max, n](Cx s) -> Cx {
    const Cx bh = 0.5 * scale * s;
    if (bh.real() >= u_min) detail::throw_ring_divergence(s_max);
    const double lo = u_min;
    const double hi = (1.0 + a) * (1.0 + a);
    if (bh.imag() == 0.0 && bh.real() >= lo && bh.real() <= hi)
      throw SingularityError("nakagami2 closed form: pole on the contour");
    const Cx A = a * a + 1.0 - bh;
    Cx S;
    if (a == 0.0) {
      S = A;
    } else {
      const Cx ratio = 2.0 * a / A;
      S = A * std::sqrt(1.0 - ratio * ratio);
    }
    const double one_minus_a2 = (1.0 - a * a) * (1.0 - a * a);
    const Cx num =
        2.0 * bh * one_minus_a2 - 3.0 * bh * bh * (1.0 + a * a) + bh * bh * bh;
    const Cx J = 1.0 + num / (S * S * S);
    return int_pow(J, n);
  };
  return LaplaceFn{eval, s_max};
}

namespace detail {

inline double fading_rate(const FadingModel& f) {
  switch (f.kind) {
    case FadingKind::kRayleigh:
      return 1.0;
    case FadingKind::kNakagami:
      return static_cast<double>(f.m);
    case FadingKind::kConstantPower:
      return std::numeric_limits<double>::infinity();
  }
  throw DomainError("fading_rate: unknown kind");
}

// Fading MGF at argument z*mu, i.e. L_rho(-z*mu). Callers guard the strip
// via mu_max before the node loop, so no per-node checks here.
inline Cx fading_mgf(const FadingModel& f, Cx zmu) {
  switch (f.kind) {
    case FadingKind::kRayleigh:
      return 1.0 / (1.0 - zmu);
    case FadingKind::kNakagami: {
      const double m = static_cast<double>(f.m);
      return 1.0 / int_pow(1.0 - zmu / m, f.m);
    }
    case FadingKind::kConstantPower:
      return std::exp(zmu);
  }
  throw DomainError("fading_mgf: unknown kind");
}

struct RegionTransformState {
  std::vector<double> mu;  // two-hop gain times M^2 P0 at each node
  std::vector<double> w;   // node weights (dpsi on rings, area on squares)
  FadingModel fading;
  double rate = 1.0;
  bool ppp = true;
  double lambda_measure = 0.0;  // PPP: lambda_line*R (ring) or area intensity
  int n = 0;                    // BPP count
  double inv_measure = 0.0;     // BPP: 1/(2 pi) on rings, 1/width^2 on squares
  double mu_max = 0.0;
  Vec2 worst{};
  double s_max = 0.0;
};

}  // namespace detail

// General reflected-signal MGF L_{-Q_R}(s) = E[e^{s Q_R}] over a bounded
// deployment region by quadrature. Nodes are laid out once against the
// real construction argument (the largest Re(s) the caller will use, by
// default the strip midpoint of its own geometry) and replayed at complex
// arguments, whose integrands are smoother than the probe's.
inline LaplaceFn ris_region_laplace(const RisDeployment& dep, Vec2 bs, Vec2 ue,
                                    const NetworkParams& net,
                                    double construction_s = 0.0,
                                    quad::Options opt = {1e-9, 1e-14, 4000}) {
  if (dep.elements < 0) throw DomainError("ris_region_laplace: M must be >= 0");
  const bool empty =
      dep.elements == 0 ||
      (dep.process.kind == PointProcess::Kind::kPpp
           ? dep.process.intensity == 0.0
           : dep.process.n == 0);
  if (empty)
    return LaplaceFn{[](Cx) { return Cx(1.0); },
                     std::numeric_limits<double>::infinity()};
  if (dep.process.kind == PointProcess::Kind::kEquidistant ||
      dep.process.kind == PointProcess::Kind::kBestSelection)
    throw DomainError(
        "ris_region_laplace: no analytic transform for equidistant or "
        "best-selection deployments (Monte Carlo only)");

  auto st = std::make_shared<detail::RegionTransformState>();
  st->fading = dep.fading;
  st->rate = detail::fading_rate(dep.fading);
  st->ppp = dep.process.kind == PointProcess::Kind::kPpp;
  st->n = dep.process.n;

  const double m2p0 =
      static_cast<double>(dep.elements) * dep.elements * net.p0_watts;
  const auto mu_at = [&](Vec2 pt) {
    const double d1 = distance(pt, bs);
    const double d2 = distance(pt, ue);
    return m2p0 * path_loss(d1, net.pathloss.alpha_los, net.pathloss) *
           path_loss(d2, net.pathloss.alpha_los, net.pathloss);
  };

  if (dep.region.kind == Region::Kind::kCircle) {
    const Vec2 c = dep.region.center;
    const double R = dep.region.radius;
    const auto point_at = [c, R](double psi) -> Vec2 {
      return {c.x + R * std::cos(psi), c.y - R * std::sin(psi)};
    };
    // Strict bound on mu over the ring for the divergence guard.
    for (int k = 0; k < 8192; ++k) {
      const double psi = 2.0 * kPi * k / 8192;
      const double m = mu_at(point_at(psi));
      if (m > st->mu_max) {
        st->mu_max = m;
        st->worst = point_at(psi);
      }
    }
    st->s_max = st->rate / st->mu_max;
    const double s_c =
        construction_s > 0.0 ? construction_s : 0.5 * st->s_max;
    if (s_c >= st->s_max)
      detail::throw_ring_divergence(st->s_max);
    auto probe = [&](double psi) {
      return 1.0 - detail::fading_mgf(dep.fading, s_c * mu_at(point_at(psi))).real();
    };
    auto nodes = quad::build_periodic_nodes(probe, opt, 32);
    st->mu.reserve(nodes.x.size());
    st->w = nodes.w;
    for (double psi : nodes.x) st->mu.push_back(mu_at(point_at(psi)));
    st->lambda_measure = dep.process.intensity * R;  // lambda_line * R
    st->inv_measure = 1.0 / (2.0 * kPi);
  } else if (dep.region.kind == Region::Kind::kSquare) {
    const double h = 0.5 * dep.region.width;
    const Vec2 c = dep.region.center;
    for (int i = 0; i < 512; ++i)
      for (int j = 0; j < 512; ++j) {
        const Vec2 pt{c.x - h + dep.region.width * (i + 0.5) / 512,
                      c.y - h + dep.region.width * (j + 0.5) / 512};
        const double m = mu_at(pt);
        if (m > st->mu_max) {
          st->mu_max = m;
          st->worst = pt;
        }
      }
    st->s_max = st->rate / st->mu_max;
    const double s_c =
        construction_s > 0.0 ? construction_s : 0.5 * st->s_max;
    if (s_c >= st->s_max)
      detail::throw_ring_divergence(st->s_max);
    auto probe = [&](double x, double y) {
      return 1.0 - detail::fading_mgf(dep.fading, s_c * mu_at({x, y})).real();
    };
    auto nodes = quad::build_nodes_2d(probe, c.x - h, c.x + h, c.y - h,
                                      c.y + h, opt);
    st->w = nodes.w;
    st->mu.reserve(nodes.x.size());
    for (std::size_t k = 0; k < nodes.x.size(); ++k)
      st->mu.push_back(mu_at({nodes.x[k], nodes.y[k]}));
    st->lambda_measure = dep.process.intensity;  // per m^2
    st->inv_measure = 1.0 / (dep.region.width * dep.region.width);
  } else {
    throw DomainError("ris_region_laplace: region must be a circle or square");
  }

  auto eval = [st](Cx s) -> Cx {
    if (s.real() * st->mu_max >= st->rate) {
      throw DivergenceError(
          "reflected-signal MGF diverges at region point (" +
              std::to_string(st->worst.x) + ", " + std::to_string(st->worst.y) +
              "); strip boundary " + std::to_string(st->s_max),
          st->s_max);
    }
    const std::size_t n = st->mu.size();
    if (st->ppp) {
      Cx acc = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        acc += st->w[k] * (1.0 - detail::fading_mgf(st->fading, s * st->mu[k]));
      return std::exp(-st->lambda_measure * acc);
    }
    Cx acc = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      acc += st->w[k] * detail::fading_mgf(st->fading, s * st->mu[k]);
    return int_pow(st->inv_measure * acc, st->n);
  };
  return LaplaceFn{eval, st->s_max};
}

// Reflected-interference transform of one interfering cell at distance x:
// its reflector ring (PPP, thinned by the overlap probability xi) seen from
// the UE through the alpha_ir leg,
//   s -> exp(-lambda_line xi int_0^{2pi} R (1 - 1/(1 + s K(psi))) dpsi),
//   K(psi) = P0 M^2 beta^2 R^(-alpha_los) |x + R e^(-i psi)|^(-alpha_ir).
// At alpha_ir = 2 the angular integral is the elimination integral at
// negated argument; otherwise a fixed dense periodic rule (the kernel is
// smooth for x > R).
inline LaplaceFn ris_interference_laplace(double x, double R, int elements,
                                          double xi, double lambda_line,
                                          const NetworkParams& net) {
  if (!(x > 0.0) || !(R > 0.0))
    throw DomainError("ris_interference_laplace: x and R must be positive");
  if (xi < 0.0 || xi > 1.0)
    throw DomainError("ris_interference_laplace: xi must be in [0,1]");
  if (elements < 0)
    throw DomainError("ris_interference_laplace: M must be >= 0");
  if (xi == 0.0 || elements == 0 || lambda_line == 0.0)
    return LaplaceFn{[](Cx) { return Cx(1.0); },
                     std::numeric_limits<double>::infinity()};
  const double m2 = static_cast<double>(elements) * elements;
  const double front = net.p0_watts * m2 * net.pathloss.beta *
                       net.pathloss.beta *
                       std::pow(R, -net.pathloss.alpha_los);
  const double alpha_ir = net.pathloss.alpha_ir;
  if (alpha_ir == 2.0) {
    const double a = x / R;
    const double bt_scale = front / (R * R);
    auto eval = [a, bt_scale, lambda_line, xi, R](Cx s) -> Cx {
      if (s.real() < 0.0)
        throw DivergenceError("interference transform needs Re(s) >= 0", 0.0);
      const Cx bt = bt_scale * s;
      return std::exp(-lambda_line * xi * R * elimination_integral(a, -bt));
    };
    return LaplaceFn{eval, 0.0};
  }
  auto st = std::make_shared<std::vector<double>>();
  const int n_psi = 256;
  st->reserve(n_psi);
  for (int j = 0; j < n_psi; ++j) {
    const double psi = 2.0 * kPi * j / n_psi;
    const double d2 = x * x + R * R + 2.0 * x * R * std::cos(psi);
    st->push_back(front * std::pow(d2, -0.5 * alpha_ir));
  }
  const double w = 2.0 * kPi / n_psi;
  auto eval = [st, w, lambda_line, xi, R](Cx s) -> Cx {
    if (s.real() < 0.0)
      throw DivergenceError("interference transform needs Re(s) >= 0", 0.0);
    Cx acc = 0.0;
    for (double k : *st) {
      const Cx sk = s * k;
      acc += sk / (1.0 + sk);
    }
    return std::exp(-lambda_line * xi * R * w * acc);
  };
  return LaplaceFn{eval, 0.0};
}

// Per-cell reflected-interference description used inside the aggregate
// interference transform.
struct CellRisSpec {
  double ring_radius = 20.0;
  double lambda_line = 0.0;
  double xi = 0.0;
  int elements = 0;
};

// Aggregate interference transform
//   L_{Q_I}(s) = exp(-2 pi lambda_BS int_r^{x_max} x (1 - L_v(x)(s)) dx),
// where L_v(x) is the per-interferer transform: Rayleigh direct term
// 1/(1 + s P0 g(x)) alone, or multiplied by the per-cell reflected factor
// when cell_ris is present. The semi-infinite integral maps to t = r/x in
// (0, 1], decade-seeded; for x_max = infinity the rule truncates at
// t = 1e-7 and the remainder is added back analytically from the small-
// argument expansion (linear in s, exact to first order in the tail).
inline LaplaceFn bs_interference_laplace(
    double r, const NetworkParams& net,
    std::optional<CellRisSpec> cell_ris = std::nullopt, double x_max = 0.0,
    double construction_s = 0.0, quad::Options opt = {1e-9, 1e-14, 4000}) {
  if (!(r > 0.0)) throw DomainError("bs_interference_laplace: r must be > 0");
  if (x_max != 0.0 && !(x_max > r))
    throw DomainError("bs_interference_laplace: x_max must exceed r");
  const double lambda_bs = net.lambda_bs;
  if (lambda_bs < 0.0)
    throw DomainError("bs_interference_laplace: lambda_bs must be >= 0");
  if (lambda_bs == 0.0)
    return LaplaceFn{[](Cx) { return Cx(1.0); },
                     std::numeric_limits<double>::infinity()};
  const double alpha = net.pathloss.alpha_nlos;
  const double alpha_ir = net.pathloss.alpha_ir;
  const bool with_ris = cell_ris && cell_ris->xi > 0.0 &&
                        cell_ris->elements > 0 && cell_ris->lambda_line > 0.0;
  if (cell_ris && with_ris && alpha_ir <= 2.0 && x_max == 0.0)
    throw DomainError(
        "bs_interference_laplace: reflected interference with alpha_ir <= 2 "
        "diverges on the infinite plane; set a finite x_max");

  const double p0beta = net.p0_watts * net.pathloss.beta;
  const double s_c =
      construction_s > 0.0 ? construction_s
                           : std::pow(r, alpha) / p0beta;

  struct State {
    std::vector<double> coef;  // w_i * r^2 / t_i^3 (outer measure x dx)
    std::vector<double> pg;    // P0 g(x_i)
    std::vector<double> kmat;  // row-major [node][psi] reflected kernels
    std::vector<double> wpsi;
    double cell_front = 0.0;  // lambda_line * xi * R
    double tail_direct = 0.0;
    double tail_ris = 0.0;
    double lambda_bs = 0.0;
  };
  auto st = std::make_shared<State>();
  st->lambda_bs = lambda_bs;

  const double t_lo = x_max > 0.0 ? r / x_max : 1e-7;
  std::vector<double> edges;
  edges.push_back(t_lo);
  for (double e = t_lo * 10.0; e < 0.45; e *= 10.0) edges.push_back(e);
  if (t_lo < 0.5) edges.push_back(0.5);
  edges.push_back(1.0);

  auto probe = [&](double t) {
    const double x = r / t;
    const double sg = s_c * p0beta * std::pow(x, -alpha);
    return (r * r / (t * t * t)) * sg / (1.0 + sg);
  };
  auto nodes = quad::build_nodes(probe, edges, opt);
  const std::size_t n = nodes.x.size();
  st->coef.resize(n);
  st->pg.resize(n);
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = nodes.x[i];
    xs[i] = r / t;
    st->coef[i] = nodes.w[i] * r * r / (t * t * t);
    st->pg[i] = p0beta * std::pow(xs[i], -alpha);
  }
  if (x_max == 0.0) {
    const double x_bar = r / t_lo;
    st->tail_direct = p0beta * std::pow(x_bar, 2.0 - alpha) / (alpha - 2.0);
  }

  if (with_ris) {
    const double R = cell_ris->ring_radius;
    const double m2 = static_cast<double>(cell_ris->elements) * cell_ris->elements;
    const double front = net.p0_watts * m2 * net.pathloss.beta *
                         net.pathloss.beta *
                         std::pow(R, -net.pathloss.alpha_los);
    st->cell_front = cell_ris->lambda_line * cell_ris->xi * R;
    auto kernel = [&](double x, double psi) {
      const double d2 = x * x + R * R + 2.0 * x * R * std::cos(psi);
      return front * std::pow(d2, -0.5 * alpha_ir);
    };
    // Angular rule probed at the nearest interferer (sharpest kernel).
    auto psi_probe = [&](double psi) {
      const double sk = s_c * kernel(r, psi);
      return sk / (1.0 + sk);
    };
    auto pn = quad::build_periodic_nodes(psi_probe, {1e-10, 1e-15, 0}, 16);
    st->wpsi = pn.w;
    st->kmat.resize(n * pn.x.size());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < pn.x.size(); ++j)
        st->kmat[i * pn.x.size() + j] = kernel(xs[i], pn.x[j]);
    if (x_max == 0.0 && alpha_ir > 2.0) {
      const double x_bar = r / t_lo;
      st->tail_ris = st->cell_front * 2.0 * kPi * front *
                     std::pow(x_bar, 2.0 - alpha_ir) / (alpha_ir - 2.0);
    }
  }

  auto eval = [st](Cx s) -> Cx {
    if (s.real() < 0.0)
      throw DivergenceError("interference transform needs Re(s) >= 0", 0.0);
    if (s == Cx(0.0, 0.0)) return Cx(1.0);
    const std::size_t n = st->coef.size();
    const std::size_t npsi = st->wpsi.size();
    Cx acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Cx lv = 1.0 / (1.0 + s * st->pg[i]);
      if (npsi > 0) {
        Cx inner = 0.0;
        const double* row = st->kmat.data() + i * npsi;
        for (std::size_t j = 0; j < npsi; ++j) {
          const Cx sk = s * row[j];
          inner += st->wpsi[j] * (sk / (1.0 + sk));
        }
        lv *= std::exp(-st->cell_front * inner);
      }
      acc += st->coef[i] * (1.0 - lv);
    }
    acc += s * (st->tail_direct + st->tail_ris);
    return std::exp(-2.0 * kPi * st->lambda_bs * acc);
  };
  return LaplaceFn{eval, 0.0};
}

}  // namespace riscov

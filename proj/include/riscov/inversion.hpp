#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "riscov/errors.hpp"
#include "riscov/laplace.hpp"
#include "riscov/math/quadrature.hpp"
#include "riscov/scene.hpp"

namespace riscov {

// Controls for the principal-value inversion of the positive-part
// transform. `scale` stretches the head of the frequency grid: the
// characteristic-function structure of T*(interference + noise) lives near
// w ~ 1/T, so callers pass scale = max(1, T) and the cutoff becomes
// epsilon / scale. The outer limit doubles and the head halves per round
// until two consecutive rounds move the result by less than rel_tol.
struct PvQuadratureConfig {
  double epsilon = 1e-6;
  double w_max = 1e4;
  double rel_tol = 1e-7;
  int max_rounds = 12;
  double scale = 1.0;
  quad::Options panel{1e-8, 1e-12, 4000};
};

// Positive-part functional of a bilateral transform B(z) = E[exp(-z Y)]:
// returns E[exp(-s Y+)] with Y+ = max(Y, 0), for s > 0 inside the strip
// where B is analytic (0 <= Re z <= s). Folding the two half-contours of
// the inversion integral against conjugate symmetry gives the real form
//   E[exp(-s Y+)] = (1/pi) int_0^inf Im[B(s(1-iw)) - B(-isw)] / w dw
//                   + (1 + B(s)) / 2,
// whose integrand is finite at w -> 0 (both terms vanish linearly). The
// residual mass below the cutoff is closed with a midpoint estimate, so
// the head rounds only confirm stability rather than chase O(eps) mass.
// Point masses in Y make the tail oscillate without decay; slow
// oscillations are absorbed by the tapered truncation inside the rounds,
// fast ones by a Gaussian-damped fallback with Richardson extrapolation.
inline double positive_part_laplace(const std::function<Cx(Cx)>& B, double s,
                                    const PvQuadratureConfig& cfg = {}) {
  if (!(s > 0.0)) throw DomainError("positive_part_laplace: s must be > 0");
  if (!(cfg.epsilon > 0.0) || !(cfg.w_max > cfg.epsilon) || !(cfg.scale > 0.0))
    throw DomainError("positive_part_laplace: bad quadrature config");

  // One full refinement run for a given transform. Instead of a hard cutoff
  // at w_max the tail ends in a triangular taper over [W, 2W]; for an
  // oscillatory tail A sin(ww)/w the taper cancels the leading A/(wW)
  // truncation term, so the rounds converge ~quadratically where a hard
  // cutoff would drift forever. Unclamped; throws ConvergenceError when the
  // rounds do not settle (or a panel budget dies).
  auto run = [&cfg, s](const std::function<Cx(Cx)>& Bf,
                       const quad::Options& panel, double w_hi) -> double {
    const double atom = 0.5 * (1.0 + Bf(Cx(s, 0.0)).real());
    auto f = [&Bf, s](double w) -> double {
      const Cx b1 = Bf(Cx(s, -s * w));
      const Cx b2 = Bf(Cx(0.0, -s * w));
      return (b1.imag() - b2.imag()) / w;
    };

    double eps = cfg.epsilon / cfg.scale;
    double wm = w_hi;
    std::vector<double> edges;
    for (double e = eps; e < 0.999 * wm; e *= 10.0) edges.push_back(e);
    edges.push_back(wm);
    double base = quad::integrate_seeded(f, edges, panel).value;

    auto taper = [&](double V) {
      return quad::integrate(
                 [&](double w) { return f(w) * (2.0 * V - w) / V; }, V,
                 2.0 * V, panel)
          .value;
    };
    auto total_now = [&](double eps_cur, double tap) {
      return base + tap + f(0.5 * eps_cur) * eps_cur;  // midpoint head closure
    };
    double prev = total_now(eps, taper(wm));
    double last_delta = std::numeric_limits<double>::infinity();
    int ok_streak = 0;
    for (int round = 0; round < cfg.max_rounds && ok_streak < 2; ++round) {
      base += quad::integrate(f, 0.5 * eps, eps, panel).value;
      eps *= 0.5;
      base += quad::integrate_seeded(
                  f, std::vector<double>{wm, 1.4142135623730951 * wm, 2.0 * wm},
                  panel)
                  .value;
      wm *= 2.0;
      const double total = total_now(eps, taper(wm));
      last_delta = std::abs(total - prev);
      prev = total;
      const double p_now = total / kPi + atom;
      if (last_delta <= cfg.rel_tol * std::max(std::abs(p_now), 1e-3))
        ++ok_streak;
      else
        ok_streak = 0;
    }
    const double p = prev / kPi + atom;
    if (ok_streak < 2) {
      throw ConvergenceError(
          "positive_part_laplace: refinement rounds exhausted before the "
          "result settled",
          last_delta / std::max(std::abs(p), 1e-3), cfg.rel_tol);
    }
    return p;
  };

  double p;
  try {
    p = run(B, cfg.panel, cfg.w_max);
  } catch (const ConvergenceError&) {
    // A point mass in Y keeps the characteristic function from decaying, so
    // the tail oscillates forever and no truncation settles. Damping Y with
    // an independent Gaussian of width d/s multiplies the transform by
    // exp(d^2 (z/s)^2 / 2), which cuts the tail at w ~ 10/d; the bias of
    // E[exp(-s (Y + dG/s)+)] is even in d, so two Richardson stages over
    // d, d/2, d/4 leave O(d^6).
    quad::Options big = cfg.panel;
    big.max_panels = std::max(big.max_panels, 200000);
    double pd[3];
    double d = 0.02;
    for (int i = 0; i < 3; ++i, d *= 0.5) {
      const double dd = d;
      auto damped = [&B, s, dd](Cx z) -> Cx {
        const Cx u = z / s;
        return B(z) * std::exp(0.5 * dd * dd * u * u);
      };
      pd[i] = run(damped, big, 10.0 / dd);
    }
    const double r0 = (4.0 * pd[1] - pd[0]) / 3.0;
    const double r1 = (4.0 * pd[2] - pd[1]) / 3.0;
    p = (16.0 * r1 - r0) / 15.0;
  }
  if (!std::isfinite(p) || p < -1e-3 || p > 1.0 + 1e-3) {
    throw SanityError("positive_part_laplace: result " + std::to_string(p) +
                      " is not a probability");
  }
  return std::clamp(p, 0.0, 1.0);
}

// Integration grid for the ergodic rate in nats,
//   rate = int_0^inf Pc(t) / (1 + t) dt = int_0^{v_max} Pc(e^v - 1) dv.
// The substituted integrand is smooth and of bounded support in practice;
// fixed edges keep the coverage-evaluation count predictable. Segments are
// walked left to right and the walk stops once coverage at a segment start
// falls below `cutoff` (the remaining mass is below cutoff * v-length).
struct RateGridPolicy {
  std::vector<double> v_edges = {0.0, 1.0, 2.0, 3.0, 4.0,
                                 6.0, 8.0, 12.0, 20.0, 40.0};
  quad::Options segment{1e-6, 1e-9, 40};
  double cutoff = 1e-10;
};

// Coverage and rate for one scene. Holds the reflected-signal transform
// (argument-independent) across calls and rebuilds the aggregate
// interference transform per threshold, since its quadrature nodes are
// laid out against the construction argument s0 * T.
class CoverageEngine {
 public:
  explicit CoverageEngine(Scene sc, PvQuadratureConfig cfg = {})
      : sc_(std::move(sc)), cfg_(cfg) {
    validate_scene(sc_);
    const auto& pl = sc_.net.pathloss;
    const double g_r = path_loss(sc_.serving_r, pl.alpha_nlos, pl);
    s0_ = 1.0 / (sc_.net.p0_watts * g_r);
    noise_ = noise_laplace(sc_.net.sigma2_watts);
    if (sc_.has_serving_ris()) {
      reflected_ = ris_region_laplace(*sc_.ris, sc_.bs_pos(), sc_.ue_pos(),
                                      sc_.net, s0_);
    } else {
      reflected_ = LaplaceFn{[](Cx) { return Cx(1.0); },
                             std::numeric_limits<double>::infinity()};
    }
  }

  double s0() const { return s0_; }
  const Scene& scene() const { return sc_; }

  // Plain product form, valid only without a serving reflector region.
  double coverage_fast(double T) {
    if (T < 0.0) throw DomainError("coverage: threshold must be >= 0");
    if (T == 0.0) return 1.0;
    const Cx z(s0_ * T, 0.0);
    const double p =
        (interference_for(T).eval(z) * noise_.eval(z)).real();
    if (!std::isfinite(p) || p < -1e-6 || p > 1.0 + 1e-6)
      throw SanityError("coverage_fast: result is not a probability");
    return std::clamp(p, 0.0, 1.0);
  }

  double coverage_via_inversion(double T) {
    if (T < 0.0) throw DomainError("coverage: threshold must be >= 0");
    const LaplaceFn& li = interference_for(T);
    auto B = [this, &li, T](Cx z) -> Cx {
      const Cx zt = z * T;
      return li.eval(zt) * noise_.eval(zt) * reflected_.eval(z);
    };
    PvQuadratureConfig cfg = cfg_;
    cfg.scale = std::max(1.0, T);
    return positive_part_laplace(B, s0_, cfg);
  }

  double coverage(double T) {
    return sc_.has_serving_ris() ? coverage_via_inversion(T)
                                 : coverage_fast(T);
  }

  double ergodic_rate(const RateGridPolicy& policy = {}) {
    const auto& ve = policy.v_edges;
    if (ve.size() < 2 || ve.front() != 0.0)
      throw DomainError("ergodic_rate: v_edges must start at 0");
    double rate = 0.0;
    auto g = [this](double v) { return coverage(std::expm1(v)); };
    for (std::size_t i = 0; i + 1 < ve.size(); ++i) {
      if (g(ve[i]) < policy.cutoff) break;
      rate += quad::integrate(g, ve[i], ve[i + 1], policy.segment).value;
    }
    return rate;
  }

 private:
  const LaplaceFn& interference_for(double T) {
    if (!interference_ || cached_T_ != T) {
      double x_max = sc_.analytic_x_max_m;
      std::optional<CellRisSpec> cell;
      if (sc_.interferer_ris) {
        const auto& ir = *sc_.interferer_ris;
        cell = CellRisSpec{
            ir.ring_radius,
            ir.mean_per_cell / (2.0 * kPi * ir.ring_radius),
            overlap_probability(ir.overlap, ir.elements), ir.elements};
        // An alpha_ir <= 2 reflected-interference field has infinite mean
        // on the whole plane; fall back to the scene's truncation radius so
        // the analytic and Monte Carlo answers describe the same region.
        if (x_max == 0.0 && sc_.net.pathloss.alpha_ir <= 2.0)
          x_max = sc_.truncation_radius();
      }
      interference_ = bs_interference_laplace(sc_.serving_r, sc_.net, cell,
                                              x_max, s0_ * std::max(T, 1e-12));
      cached_T_ = T;
    }
    return *interference_;
  }

  Scene sc_;
  PvQuadratureConfig cfg_;
  double s0_ = 0.0;
  LaplaceFn noise_;
  LaplaceFn reflected_;
  std::optional<LaplaceFn> interference_;
  double cached_T_ = -1.0;
};

inline double coverage_probability(const Scene& sc, double T, double r) {
  Scene copy = sc;
  copy.serving_r = r;
  return CoverageEngine(std::move(copy)).coverage(T);
}

inline double ergodic_rate(const Scene& sc, double r,
                           const RateGridPolicy& policy = {}) {
  Scene copy = sc;
  copy.serving_r = r;
  return CoverageEngine(std::move(copy)).ergodic_rate(policy);
}

}  // namespace riscov

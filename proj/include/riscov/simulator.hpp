#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "riscov/channel.hpp"
#include "riscov/errors.hpp"
#include "riscov/math/rng.hpp"
#include "riscov/scene.hpp"
#include "riscov/spatial.hpp"

namespace riscov {

struct Scenario {
  Scene scene;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
};

// One counter-based stream per randomness role. Trials are mutually
// independent and addressable by (seed, trial) alone, so results do not
// depend on evaluation order, and scenario variants that share geometry
// stay coupled (common random numbers) even when their fading draws differ.
struct TrialRngs {
  rng::Stream geom;
  rng::Stream direct;
  rng::Stream serving;
  rng::Stream interferer;
};

inline TrialRngs trial_rngs(std::uint64_t seed, std::uint64_t trial) {
  return TrialRngs{rng::Stream(seed, trial, rng::kSubGeometry),
                   rng::Stream(seed, trial, rng::kSubDirect),
                   rng::Stream(seed, trial, rng::kSubServingRis),
                   rng::Stream(seed, trial, rng::kSubInterfererRis)};
}

namespace detail {

// d^(-alpha) from the squared distance. The simulator spends most of its
// time here; the common exponents skip std::pow.
inline double inv_pow_from_sq(double d2, double alpha) {
  if (alpha == 2.0) return 1.0 / d2;
  if (alpha == 3.0) return 1.0 / (d2 * std::sqrt(d2));
  if (alpha == 4.0) return 1.0 / (d2 * d2);
  return std::pow(d2, -0.5 * alpha);
}

}  // namespace detail

// One SINR draw. Serving signal = direct NLoS link plus the incoherent sum
// of two-hop reflected powers from the serving deployment; interference =
// direct links from PPP interferers on the truncation annulus plus, when
// interfering cells carry reflector rings, the Bernoulli(xi)-thinned
// reflected contributions (sampled directly as a Poisson(xi * mean) ring).
inline double simulate_sinr(const Scene& sc, TrialRngs& rng) {
  const auto& net = sc.net;
  const auto& pl = net.pathloss;
  const double p0 = net.p0_watts;

  double signal =
      p0 * path_loss(sc.serving_r, pl.alpha_nlos, pl) * rng.direct.exponential();
  if (sc.has_serving_ris()) {
    const auto& dep = *sc.ris;
    std::vector<Vec2> pts;
    if (dep.region.kind == Region::Kind::kCircle) {
      pts = sample_ris_on_circle(dep.process, dep.region.center,
                                 dep.region.radius, rng.geom);
    } else if (dep.region.kind == Region::Kind::kSquare) {
      pts = sample_square(dep.process, dep.region, rng.geom);
    } else {
      throw DomainError(
          "simulate_sinr: reflector region must be a circle or square");
    }
    if (dep.process.kind == PointProcess::Kind::kBestSelection && !pts.empty())
      pts = {select_best_reflector(pts, sc.bs_pos(), sc.ue_pos(), pl)};
    const double m2p0 =
        static_cast<double>(dep.elements) * dep.elements * p0;
    for (const auto& q : pts) {
      const double mu = m2p0 *
                        path_loss(distance(q, sc.bs_pos()), pl.alpha_los, pl) *
                        path_loss(distance(q, sc.ue_pos()), pl.alpha_los, pl);
      signal += mu * sample_fading_power(dep.fading, rng.serving);
    }
  }

  double interference = 0.0;
  if (net.lambda_bs > 0.0) {
    const double r_max = sc.truncation_radius();
    const auto x2s =
        sample_ppp_annulus_sq(net.lambda_bs, sc.serving_r, r_max, rng.geom);
    const double p0beta = p0 * pl.beta;
    if (!sc.interferer_ris) {
      for (double x2 : x2s) {
        interference += p0beta * detail::inv_pow_from_sq(x2, pl.alpha_nlos) *
                        rng.direct.exponential();
      }
    } else {
      const auto& ir = *sc.interferer_ris;
      const double xi = overlap_probability(ir.overlap, ir.elements);
      const double mean_kept = xi * ir.mean_per_cell;
      const double R = ir.ring_radius;
      const double R2 = R * R;
      const double front = p0 * static_cast<double>(ir.elements) *
                           ir.elements * pl.beta * pl.beta *
                           std::pow(R, -pl.alpha_los);
      for (double x2 : x2s) {
        interference += p0beta * detail::inv_pow_from_sq(x2, pl.alpha_nlos) *
                        rng.direct.exponential();
        const std::uint64_t kept = rng.interferer.poisson(mean_kept);
        if (kept == 0) continue;
        const double x = std::sqrt(x2);
        for (std::uint64_t k = 0; k < kept; ++k) {
          const double psi = rng.interferer.uniform(0.0, 2.0 * kPi);
          const double d2 = x2 + R2 + 2.0 * x * R * std::cos(psi);
          interference += front * detail::inv_pow_from_sq(d2, pl.alpha_ir) *
                          rng.interferer.exponential();
        }
      }
    }
  }
  return signal / (interference + net.sigma2_watts);
}

struct CoverageEstimate {
  std::vector<double> thresholds;
  std::vector<double> p;
  std::vector<double> std_err;
  std::uint64_t trials = 0;
};

struct RateEstimate {
  double mean_nats = 0.0;
  double std_err = 0.0;
  std::uint64_t trials = 0;
};

struct BatchEstimate {
  CoverageEstimate coverage;
  RateEstimate rate;
};

// Single pass over the trials serving both estimators: per-threshold
// exceedance counts and a Welford accumulator for log(1 + SINR).
inline BatchEstimate estimate_batch(const Scenario& sc,
                                    const std::vector<double>& t_grid) {
  validate_scene(sc.scene);
  if (sc.trials == 0) throw DomainError("estimate_batch: trials must be > 0");
  for (double t : t_grid)
    if (t < 0.0) throw DomainError("estimate_batch: thresholds must be >= 0");

  std::vector<std::uint64_t> counts(t_grid.size(), 0);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t trial = 0; trial < sc.trials; ++trial) {
    auto rngs = trial_rngs(sc.seed, trial);
    const double sinr = simulate_sinr(sc.scene, rngs);
    for (std::size_t i = 0; i < t_grid.size(); ++i)
      if (sinr > t_grid[i]) ++counts[i];
    const double v = std::log1p(sinr);
    const double d = v - mean;
    mean += d / static_cast<double>(trial + 1);
    m2 += d * (v - mean);
  }

  BatchEstimate out;
  out.coverage.thresholds = t_grid;
  out.coverage.trials = sc.trials;
  const double n = static_cast<double>(sc.trials);
  out.coverage.p.reserve(t_grid.size());
  out.coverage.std_err.reserve(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double p = static_cast<double>(counts[i]) / n;
    out.coverage.p.push_back(p);
    out.coverage.std_err.push_back(std::sqrt(p * (1.0 - p) / n));
  }
  out.rate.trials = sc.trials;
  out.rate.mean_nats = mean;
  out.rate.std_err = sc.trials > 1 ? std::sqrt(m2 / (n * (n - 1.0))) : 0.0;
  return out;
}

inline CoverageEstimate estimate_coverage(const Scenario& sc,
                                          const std::vector<double>& t_grid) {
  if (t_grid.empty())
    throw DomainError("estimate_coverage: threshold grid is empty");
  return estimate_batch(sc, t_grid).coverage;
}

inline RateEstimate estimate_rate(const Scenario& sc) {
  return estimate_batch(sc, {}).rate;
}

}  // namespace riscov

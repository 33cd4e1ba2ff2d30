#pragma once

#include <cmath>
#include <vector>

#include "riscov/channel.hpp"
#include "riscov/errors.hpp"
#include "riscov/math/rng.hpp"

namespace riscov {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Supports for point processes. Circle is the 1-D ring (RIS ring around a
// BS); Disc and Annulus are 2-D (BS field); Square is 2-D (RIS clusters).
struct Region {
  enum class Kind { kCircle, kAnnulus, kSquare, kDisc };
  Kind kind = Kind::kCircle;
  Vec2 center{};
  double radius = 0.0;  // Circle, Disc
  double r_in = 0.0, r_out = 0.0;  // Annulus
  double width = 0.0;  // Square

  static Region circle(Vec2 c, double radius) {
    if (!(radius > 0.0)) throw DomainError("circle radius must be positive");
    Region r;
    r.kind = Kind::kCircle;
    r.center = c;
    r.radius = radius;
    return r;
  }
  static Region disc(Vec2 c, double radius) {
    if (!(radius > 0.0)) throw DomainError("disc radius must be positive");
    Region r;
    r.kind = Kind::kDisc;
    r.center = c;
    r.radius = radius;
    return r;
  }
  static Region annulus(Vec2 c, double r_in, double r_out) {
    if (!(r_in >= 0.0) || !(r_out > r_in))
      throw DomainError("annulus requires 0 <= r_in < r_out");
    Region r;
    r.kind = Kind::kAnnulus;
    r.center = c;
    r.r_in = r_in;
    r.r_out = r_out;
    return r;
  }
  static Region square(Vec2 c, double width) {
    if (!(width > 0.0)) throw DomainError("square width must be positive");
    Region r;
    r.kind = Kind::kSquare;
    r.center = c;
    r.width = width;
    return r;
  }
};

// Point-process law on a support region. PPP intensity is per unit measure
// of the support: per m^2 on areas, per m of arc on the circle.
struct PointProcess {
  enum class Kind { kPpp, kBpp, kEquidistant, kBestSelection };
  Kind kind = Kind::kPpp;
  double intensity = 0.0;
  int n = 0;

  static PointProcess ppp(double intensity) {
    if (intensity < 0.0) throw DomainError("PPP intensity must be >= 0");
    PointProcess p;
    p.kind = Kind::kPpp;
    p.intensity = intensity;
    return p;
  }
  static PointProcess bpp(int n) {
    if (n < 0) throw DomainError("BPP count must be >= 0");
    PointProcess p;
    p.kind = Kind::kBpp;
    p.n = n;
    return p;
  }
  static PointProcess equidistant(int n) {
    if (n < 0) throw DomainError("Equidistant count must be >= 0");
    PointProcess p;
    p.kind = Kind::kEquidistant;
    p.n = n;
    return p;
  }
  static PointProcess best_selection(int n) {
    if (n < 0) throw DomainError("BestSelection count must be >= 0");
    PointProcess p;
    p.kind = Kind::kBestSelection;
    p.n = n;
    return p;
  }
};

inline std::vector<Vec2> sample_ppp_disc(double lambda, const Region& disc,
                                         rng::Stream& g) {
  if (disc.kind != Region::Kind::kDisc)
    throw DomainError("sample_ppp_disc: region must be a disc");
  if (lambda < 0.0) throw DomainError("sample_ppp_disc: lambda must be >= 0");
  const double mean = lambda * kPi * disc.radius * disc.radius;
  const std::uint64_t count = g.poisson(mean);
  std::vector<Vec2> pts;
  pts.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double rad = disc.radius * std::sqrt(g.uniform());
    const double ang = g.uniform(0.0, 2.0 * kPi);
    pts.push_back({disc.center.x + rad * std::cos(ang),
                   disc.center.y + rad * std::sin(ang)});
  }
  return pts;
}

inline std::vector<double> equidistant_angles(int n, double rotation) {
  std::vector<double> a;
  a.reserve(n);
  for (int k = 0; k < n; ++k) a.push_back(rotation + 2.0 * kPi * k / n);
  return a;
}

// Reflector ring around a BS. PPP intensity is per arc length (mean count
// = intensity * 2 pi R); BPP and BestSelection place exactly n uniform
// angles; Equidistant places n regular angles with a common random rotation.
inline std::vector<Vec2> sample_ris_on_circle(const PointProcess& pp,
                                              Vec2 center, double R,
                                              rng::Stream& g) {
  if (!(R > 0.0)) throw DomainError("sample_ris_on_circle: R must be positive");
  std::vector<double> angles;
  switch (pp.kind) {
    case PointProcess::Kind::kPpp: {
      const std::uint64_t count = g.poisson(pp.intensity * 2.0 * kPi * R);
      angles.reserve(count);
      for (std::uint64_t i = 0; i < count; ++i)
        angles.push_back(g.uniform(0.0, 2.0 * kPi));
      break;
    }
    case PointProcess::Kind::kBpp:
    case PointProcess::Kind::kBestSelection: {
      angles.reserve(pp.n);
      for (int i = 0; i < pp.n; ++i) angles.push_back(g.uniform(0.0, 2.0 * kPi));
      break;
    }
    case PointProcess::Kind::kEquidistant: {
      angles = equidistant_angles(pp.n, g.uniform(0.0, 2.0 * kPi));
      break;
    }
  }
  std::vector<Vec2> pts;
  pts.reserve(angles.size());
  for (double a : angles)
    pts.push_back({center.x + R * std::cos(a), center.y + R * std::sin(a)});
  return pts;
}

inline std::vector<Vec2> sample_square(const PointProcess& pp,
                                       const Region& square, rng::Stream& g) {
  if (square.kind != Region::Kind::kSquare)
    throw DomainError("sample_square: region must be a square");
  std::uint64_t count = 0;
  switch (pp.kind) {
    case PointProcess::Kind::kPpp:
      count = g.poisson(pp.intensity * square.width * square.width);
      break;
    case PointProcess::Kind::kBpp:
    case PointProcess::Kind::kBestSelection:
      count = static_cast<std::uint64_t>(pp.n);
      break;
    case PointProcess::Kind::kEquidistant:
      throw DomainError("sample_square: equidistant law is circle-only");
  }
  const double h = 0.5 * square.width;
  std::vector<Vec2> pts;
  pts.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    pts.push_back({square.center.x + g.uniform(-h, h),
                   square.center.y + g.uniform(-h, h)});
  }
  return pts;
}

// Deployment policy: among candidate reflectors pick the one maximizing the
// two-hop gain g(d1) g(d2) toward the UE. Both legs share alpha_los, so this
// is the candidate minimizing d1*d2.
inline Vec2 select_best_reflector(const std::vector<Vec2>& candidates, Vec2 bs,
                                  Vec2 ue, const PathLossParams& p) {
  if (candidates.empty())
    throw DomainError("select_best_reflector: no candidates");
  double best = -1.0;
  Vec2 pick = candidates.front();
  for (const auto& c : candidates) {
    const double gain = path_loss(distance(c, bs), p.alpha_los, p) *
                        path_loss(distance(c, ue), p.alpha_los, p);
    if (gain > best) {
      best = gain;
      pick = c;
    }
  }
  return pick;
}

// Interferer-field truncation radius: the expected interference from PPP
// interferers beyond rho, relative to the full field beyond r, is
// (rho/r)^(2-alpha). Solving for a target tail fraction gives
// rho = r * fraction^(-1/(alpha-2)). Diverges as alpha -> 2: callers must
// supply an explicit radius for alpha <= 2.
inline double interference_truncation_radius(double r, double alpha_nlos,
                                             double tail_fraction) {
  if (!(r > 0.0)) throw DomainError("truncation: r must be positive");
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
    throw DomainError("truncation: tail fraction must be in (0,1)");
  if (!(alpha_nlos > 2.0))
    throw DomainError(
        "truncation: alpha_nlos must exceed 2 (mean interference diverges); "
        "set an explicit truncation radius");
  return r * std::pow(tail_fraction, -1.0 / (alpha_nlos - 2.0));
}

// Hot-path sampler for the simulator: squared distances of PPP interferers
// on an annulus. Avoids angles entirely (isotropic direct links need only
// the distance); x^2 is uniform on [r_in^2, r_out^2].
inline std::vector<double> sample_ppp_annulus_sq(double lambda, double r_in,
                                                 double r_out, rng::Stream& g) {
  if (!(r_in >= 0.0) || !(r_out > r_in))
    throw DomainError("sample_ppp_annulus_sq: need 0 <= r_in < r_out");
  const double lo = r_in * r_in;
  const double hi = r_out * r_out;
  const double mean = lambda * kPi * (hi - lo);
  const std::uint64_t count = g.poisson(mean);
  std::vector<double> d2(count);
  for (auto& v : d2) v = g.uniform(lo, hi);
  return d2;
}

}  // namespace riscov

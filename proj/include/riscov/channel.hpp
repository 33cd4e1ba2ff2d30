#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "riscov/errors.hpp"
#include "riscov/math/rng.hpp"

namespace riscov {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.141592653589793238462643383279503;

// Large-scale propagation constants. beta is the power gain at 1 m; when a
// carrier frequency is given it is (c / (4 pi f_c))^2.
struct PathLossParams {
  double beta = 0.0;
  double alpha_los = 2.0;
  double alpha_nlos = 3.0;
  double alpha_ir = 3.0;
  double carrier_hz = 0.0;

  static PathLossParams from_carrier(double carrier_hz, double alpha_los = 2.0,
                                     double alpha_nlos = 3.0,
                                     double alpha_ir = 3.0) {
    if (!(carrier_hz > 0.0))
      throw DomainError("carrier_hz must be positive");
    if (alpha_los < 2.0 || alpha_nlos < 2.0 || alpha_ir < 2.0)
      throw DomainError("path loss exponents must be >= 2");
    PathLossParams p;
    const double lam = kSpeedOfLight / (4.0 * kPi * carrier_hz);
    p.beta = lam * lam;
    p.alpha_los = alpha_los;
    p.alpha_nlos = alpha_nlos;
    p.alpha_ir = alpha_ir;
    p.carrier_hz = carrier_hz;
    return p;
  }
};

enum class FadingKind { kRayleigh, kNakagami, kConstantPower };

// Unit-mean fading power models. Rayleigh power is exponential(1);
// Nakagami-m power is Gamma(shape m, scale 1/m); ConstantPower is the
// channel-hardening limit (point mass at 1). m is kept integral so the
// closed-form paths stay exact.
struct FadingModel {
  FadingKind kind = FadingKind::kRayleigh;
  int m = 1;

  static FadingModel rayleigh() { return {FadingKind::kRayleigh, 1}; }
  static FadingModel nakagami(int m) {
    if (m < 1) throw DomainError("Nakagami m must be a positive integer");
    return {FadingKind::kNakagami, m};
  }
  static FadingModel constant_power() { return {FadingKind::kConstantPower, 1}; }
};

// g(d) = beta * d^(-alpha).
inline double path_loss(double d, double alpha, const PathLossParams& p) {
  if (!(d > 0.0)) throw DomainError("path_loss: distance must be positive");
  return p.beta * std::pow(d, -alpha);
}

// Two-hop reflected power gain for a reflector at angle psi on a circle of
// radius R around the serving BS, observed from a UE at distance r from
// that BS: beta^2 R^(-2) |r + R e^(-i psi)|^(-2). Both legs use exponent 2;
// |r + R e^(-i psi)|^2 = r^2 + R^2 + 2 r R cos(psi).
inline double reflected_gain(double r, double R, double psi,
                             const PathLossParams& p) {
  if (!(r > 0.0) || !(R > 0.0))
    throw DomainError("reflected_gain: r and R must be positive");
  const double d2 = r * r + R * R + 2.0 * r * R * std::cos(psi);
  if (d2 <= 1e-12 * r * R)
    throw SingularityError("reflected_gain: reflector coincides with the UE");
  return p.beta * p.beta / (R * R * d2);
}

// Laplace transform of the fading power, L(s) = E[e^(-s X)].
// Rayleigh: 1/(1+s), Re(s) > -1. Nakagami-m: (1+s/m)^(-m), Re(s) > -m.
// ConstantPower: e^(-s), entire.
inline std::complex<double> fading_power_laplace(const FadingModel& f,
                                                 std::complex<double> s) {
  switch (f.kind) {
    case FadingKind::kRayleigh: {
      if (s.real() <= -1.0)
        throw DivergenceError("fading transform diverges: Re(s) <= -1", -1.0);
      return 1.0 / (1.0 + s);
    }
    case FadingKind::kNakagami: {
      const double m = static_cast<double>(f.m);
      if (s.real() <= -m)
        throw DivergenceError(
            "fading transform diverges: Re(s) <= -" + std::to_string(f.m), -m);
      const std::complex<double> base = 1.0 + s / m;
      std::complex<double> pw = 1.0;
      for (int i = 0; i < f.m; ++i) pw *= base;
      return 1.0 / pw;
    }
    case FadingKind::kConstantPower:
      return std::exp(-s);
  }
  throw DomainError("fading_power_laplace: unknown kind");
}

inline double sample_fading_power(const FadingModel& f, rng::Stream& g) {
  switch (f.kind) {
    case FadingKind::kRayleigh:
      return g.exponential();
    case FadingKind::kNakagami:
      return g.gamma_integer(f.m) / static_cast<double>(f.m);
    case FadingKind::kConstantPower:
      return 1.0;
  }
  throw DomainError("sample_fading_power: unknown kind");
}

}  // namespace riscov

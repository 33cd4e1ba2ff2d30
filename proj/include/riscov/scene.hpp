#pragma once

#include <optional>

#include "riscov/channel.hpp"
#include "riscov/errors.hpp"
#include "riscov/spatial.hpp"

namespace riscov {

struct NetworkParams {
  double p0_watts = 1.0;
  double sigma2_watts = 1e-13;
  double lambda_bs = 1e-5;  // BS density per m^2
  PathLossParams pathloss;
};

// Probability that an interfering cell's reflector beam illuminates the
// tagged UE. Either a fixed value or beam-width driven (C_beam / M).
struct OverlapModel {
  enum class Kind { kFixed, kBeamWidth };
  Kind kind = Kind::kBeamWidth;
  double value = 1.0;

  static OverlapModel fixed(double xi) {
    if (xi < 0.0) throw DomainError("overlap xi must be >= 0");
    return {Kind::kFixed, xi};
  }
  static OverlapModel beam_width(double c_beam) {
    if (c_beam < 0.0) throw DomainError("overlap C_beam must be >= 0");
    return {Kind::kBeamWidth, c_beam};
  }
};

inline double overlap_probability(const OverlapModel& m, int elements) {
  switch (m.kind) {
    case OverlapModel::Kind::kFixed:
      return std::min(1.0, m.value);
    case OverlapModel::Kind::kBeamWidth:
      if (elements < 1)
        throw DomainError("overlap_probability: beam-width model needs M >= 1");
      return std::min(1.0, m.value / static_cast<double>(elements));
  }
  throw DomainError("overlap_probability: unknown model");
}

// Serving-cell reflector deployment: where the reflectors sit, how many,
// their element count M (amplitude gain M, power gain M^2) and the fading
// on the reflected path.
struct RisDeployment {
  Region region = Region::circle({100.0, 0.0}, 20.0);
  PointProcess process = PointProcess::ppp(5.0 / (2.0 * kPi * 20.0));
  int elements = 80;
  FadingModel fading = FadingModel::rayleigh();
};

// Reflected interference from other cells: every interfering BS carries a
// reflector ring of this radius with PPP reflectors (mean count per cell),
// thinned by the overlap probability.
struct InterfererRis {
  double ring_radius = 20.0;
  double mean_per_cell = 5.0;
  int elements = 80;
  OverlapModel overlap = OverlapModel::fixed(0.3);
};

// Full scenario. The tagged UE sits at the origin and its serving BS at
// (serving_r, 0); everything else is relative to that frame.
struct Scene {
  NetworkParams net;
  double serving_r = 100.0;
  std::optional<RisDeployment> ris;
  std::optional<InterfererRis> interferer_ris;

  // Monte Carlo interferer-field truncation: explicit radius, or 0 to derive
  // from the expected-tail rule at mc_tail_fraction.
  double mc_truncation_m = 0.0;
  double mc_tail_fraction = 0.005;
  // Analytic interference upper limit; 0 means infinity. Must be finite when
  // reflected interference uses alpha_ir <= 2 (the aggregate diverges on the
  // infinite plane).
  double analytic_x_max_m = 0.0;

  Vec2 ue_pos() const { return {0.0, 0.0}; }
  Vec2 bs_pos() const { return {serving_r, 0.0}; }

  double truncation_radius() const {
    if (mc_truncation_m > 0.0) return mc_truncation_m;
    return interference_truncation_radius(
        serving_r, net.pathloss.alpha_nlos, mc_tail_fraction);
  }

  bool has_serving_ris() const {
    if (!ris) return false;
    if (ris->elements == 0) return false;
    if (ris->process.kind == PointProcess::Kind::kPpp)
      return ris->process.intensity > 0.0;
    return ris->process.n > 0;
  }
};

inline void validate_scene(const Scene& sc) {
  if (!(sc.serving_r > 0.0)) throw DomainError("scene: serving_r must be > 0");
  if (!(sc.net.p0_watts >= 0.0)) throw DomainError("scene: p0 must be >= 0");
  if (sc.net.sigma2_watts < 0.0) throw DomainError("scene: sigma2 must be >= 0");
  if (sc.net.lambda_bs < 0.0) throw DomainError("scene: lambda_bs must be >= 0");
  if (!(sc.net.pathloss.beta > 0.0)) throw DomainError("scene: beta must be > 0");
  if (sc.ris) {
    if (sc.ris->elements < 0) throw DomainError("scene: M must be >= 0");
    if (sc.ris->region.kind != Region::Kind::kCircle &&
        sc.ris->region.kind != Region::Kind::kSquare)
      throw DomainError("scene: reflector support must be a circle or square");
  }
  if (sc.interferer_ris) {
    if (!(sc.interferer_ris->ring_radius > 0.0))
      throw DomainError("scene: interferer ring radius must be > 0");
    if (sc.interferer_ris->mean_per_cell < 0.0)
      throw DomainError("scene: interferer mean per cell must be >= 0");
    if (sc.interferer_ris->elements < 0)
      throw DomainError("scene: interferer M must be >= 0");
  }
}

}  // namespace riscov

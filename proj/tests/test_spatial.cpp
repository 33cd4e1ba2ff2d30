#include "riscov/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "riscov/channel.hpp"

using riscov::PointProcess;
using riscov::Region;
using riscov::Vec2;
namespace rng = riscov::rng;

TEST(Spatial, ZeroIntensityYieldsEmptyRealizations) {
  rng::Stream g(1, 0, rng::kSubGeometry);
  const auto disc = Region::disc({0.0, 0.0}, 5000.0);
  EXPECT_TRUE(riscov::sample_ppp_disc(0.0, disc, g).empty());
  const auto pts =
      riscov::sample_ris_on_circle(PointProcess::ppp(0.0), {0.0, 0.0}, 20.0, g);
  EXPECT_TRUE(pts.empty());
}

// Disc PPP at 10 BS/km^2 over a 5 km disc: mean count 785.4, and the count
// histogram passes a 10-bin chi-square test against Poisson at the 1% level.
TEST(Spatial, DiscPoissonCountStatistics) {
  const double lambda = 10.0 * 1e-6;
  const double radius = 5000.0;
  const double mu = lambda * riscov::kPi * radius * radius;
  const int reps = 10000;
  const auto disc = Region::disc({0.0, 0.0}, radius);

  std::vector<int> counts(reps);
  double sum = 0.0;
  for (int i = 0; i < reps; ++i) {
    rng::Stream g(2025, static_cast<std::uint64_t>(i), rng::kSubGeometry);
    counts[i] = static_cast<int>(riscov::sample_ppp_disc(lambda, disc, g).size());
    sum += counts[i];
  }
  EXPECT_NEAR(sum / reps, mu, 3.0 * std::sqrt(mu / reps));

  // Exact pmf over a wide window; ten roughly equiprobable bins.
  const int k_lo = 600, k_hi = 1000;
  std::vector<double> pmf(k_hi - k_lo + 1);
  for (int k = k_lo; k <= k_hi; ++k)
    pmf[k - k_lo] =
        std::exp(-mu + k * std::log(mu) - std::lgamma(k + 1.0));
  std::vector<int> edges;  // bin = [edge[j], edge[j+1])
  edges.push_back(k_lo);
  double cum = 0.0;
  for (int k = k_lo; k <= k_hi && edges.size() < 10; ++k) {
    cum += pmf[k - k_lo];
    if (cum >= edges.size() / 10.0) edges.push_back(k + 1);
  }
  edges.push_back(k_hi + 1);
  const int bins = static_cast<int>(edges.size()) - 1;
  std::vector<double> p_bin(bins, 0.0);
  for (int j = 0; j < bins; ++j)
    for (int k = edges[j]; k < edges[j + 1]; ++k) p_bin[j] += pmf[k - k_lo];
  p_bin.front() += 0.0;  // counts below k_lo / above k_hi are ~1e-11
  std::vector<int> obs(bins, 0);
  for (int c : counts) {
    const int k = std::clamp(c, k_lo, k_hi);
    const int j = static_cast<int>(
        std::upper_bound(edges.begin(), edges.end(), k) - edges.begin() - 1);
    obs[std::clamp(j, 0, bins - 1)]++;
  }
  double chi2 = 0.0;
  for (int j = 0; j < bins; ++j) {
    const double expected = reps * p_bin[j];
    ASSERT_GT(expected, 20.0);
    chi2 += (obs[j] - expected) * (obs[j] - expected) / expected;
  }
  // df = bins - 1 = 9, upper 1% point.
  EXPECT_LT(chi2, 21.666);
}

TEST(Spatial, DiscSamplesAreInsideAndCentered) {
  rng::Stream g(7, 0, rng::kSubGeometry);
  const double radius = 1000.0;
  const auto disc = Region::disc({200.0, -300.0}, radius);
  double sx = 0.0, sy = 0.0, sr2 = 0.0;
  int n = 0;
  for (int rep = 0; rep < 200; ++rep) {
    for (const auto& p : riscov::sample_ppp_disc(1e-4, disc, g)) {
      const double dx = p.x - 200.0, dy = p.y + 300.0;
      ASSERT_LE(dx * dx + dy * dy, radius * radius * (1.0 + 1e-12));
      sx += dx;
      sy += dy;
      sr2 += dx * dx + dy * dy;
      ++n;
    }
  }
  ASSERT_GT(n, 50000);
  const double se_xy = radius / 2.0 / std::sqrt(static_cast<double>(n));
  EXPECT_NEAR(sx / n, 0.0, 4.0 * se_xy);
  EXPECT_NEAR(sy / n, 0.0, 4.0 * se_xy);
  // E[rho^2] = R^2 / 2 for uniform points on a disc.
  EXPECT_NEAR(sr2 / n, radius * radius / 2.0,
              4.0 * radius * radius / std::sqrt(12.0 * n));
}

// Five reflectors pinned to the ring: exact count, exact radius.
TEST(Spatial, BinomialRingHasExactCountAndRadius) {
  rng::Stream g(13, 5, rng::kSubGeometry);
  const Vec2 c{100.0, 0.0};
  const double R = 20.0;
  const auto pts =
      riscov::sample_ris_on_circle(PointProcess::bpp(5), c, R, g);
  ASSERT_EQ(pts.size(), 5u);
  for (const auto& p : pts)
    EXPECT_NEAR(riscov::distance(p, c), R, 1e-9 * R);
}

TEST(Spatial, RingPoissonMeanCount) {
  const double R = 20.0;
  const double intensity = 5.0 / (2.0 * riscov::kPi * R);
  const int reps = 10000;
  double sum = 0.0;
  for (int i = 0; i < reps; ++i) {
    rng::Stream g(99, static_cast<std::uint64_t>(i), rng::kSubGeometry);
    sum += static_cast<double>(
        riscov::sample_ris_on_circle(PointProcess::ppp(intensity),
                                     {100.0, 0.0}, R, g)
            .size());
  }
  EXPECT_NEAR(sum / reps, 5.0, 3.0 * std::sqrt(5.0 / reps));
}

TEST(Spatial, EquidistantAnglesAreEvenlySpaced) {
  const auto angles = riscov::equidistant_angles(4, 0.3);
  ASSERT_EQ(angles.size(), 4u);
  for (int k = 0; k < 4; ++k)
    EXPECT_NEAR(angles[k], 0.3 + k * riscov::kPi / 2.0, 1e-12);
}

TEST(Spatial, EquidistantRingGapsAreQuarterTurns) {
  rng::Stream g(55, 2, rng::kSubGeometry);
  const Vec2 c{100.0, 0.0};
  const auto pts =
      riscov::sample_ris_on_circle(PointProcess::equidistant(4), c, 20.0, g);
  ASSERT_EQ(pts.size(), 4u);
  std::vector<double> ang;
  for (const auto& p : pts) ang.push_back(std::atan2(p.y - c.y, p.x - c.x));
  std::sort(ang.begin(), ang.end());
  for (int k = 0; k < 4; ++k) {
    const double gap =
        (k < 3 ? ang[k + 1] - ang[k] : ang[0] + 2.0 * riscov::kPi - ang[3]);
    EXPECT_NEAR(gap, riscov::kPi / 2.0, 1e-9);
  }
}

TEST(Spatial, EquidistantRotationIsDeterministicPerStream) {
  const Vec2 c{100.0, 0.0};
  rng::Stream g1(8, 3, rng::kSubGeometry);
  rng::Stream g2(8, 3, rng::kSubGeometry);
  const auto a =
      riscov::sample_ris_on_circle(PointProcess::equidistant(4), c, 20.0, g1);
  const auto b =
      riscov::sample_ris_on_circle(PointProcess::equidistant(4), c, 20.0, g2);
  for (int k = 0; k < 4; ++k) {
    EXPECT_DOUBLE_EQ(a[k].x, b[k].x);
    EXPECT_DOUBLE_EQ(a[k].y, b[k].y);
  }
  // A different trial draws a different common rotation.
  rng::Stream g3(8, 4, rng::kSubGeometry);
  const auto d =
      riscov::sample_ris_on_circle(PointProcess::equidistant(4), c, 20.0, g3);
  EXPECT_NE(a[0].x, d[0].x);
}

TEST(Spatial, SquarePoissonMeanInsideDocumentedBand) {
  const double width = 10.0;
  const double intensity = 5.0 / (width * width);
  const auto square = Region::square({15.0, 0.0}, width);
  const int reps = 10000;
  double sum = 0.0;
  for (int i = 0; i < reps; ++i) {
    rng::Stream g(314, static_cast<std::uint64_t>(i), rng::kSubGeometry);
    sum += static_cast<double>(
        riscov::sample_square(PointProcess::ppp(intensity), square, g).size());
  }
  const double mean = sum / reps;
  EXPECT_GT(mean, 4.85);
  EXPECT_LT(mean, 5.15);
}

TEST(Spatial, SquareSamplesStayInBounds) {
  const auto square = Region::square({15.0, 0.0}, 10.0);
  for (int i = 0; i < 200; ++i) {
    rng::Stream g(501, static_cast<std::uint64_t>(i), rng::kSubGeometry);
    for (const auto& p :
         riscov::sample_square(PointProcess::ppp(0.05), square, g)) {
      ASSERT_GE(p.x, 10.0);
      ASSERT_LE(p.x, 20.0);
      ASSERT_GE(p.y, -5.0);
      ASSERT_LE(p.y, 5.0);
    }
  }
}

TEST(Spatial, PoissonCountDispersionNearOne) {
  const double R = 20.0;
  const double intensity = 5.0 / (2.0 * riscov::kPi * R);
  const int reps = 10000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < reps; ++i) {
    rng::Stream g(777, static_cast<std::uint64_t>(i), rng::kSubGeometry);
    const double c = static_cast<double>(
        riscov::sample_ris_on_circle(PointProcess::ppp(intensity),
                                     {100.0, 0.0}, R, g)
            .size());
    sum += c;
    sum2 += c * c;
  }
  const double mean = sum / reps;
  const double var = sum2 / reps - mean * mean;
  EXPECT_GT(var / mean, 0.9);
  EXPECT_LT(var / mean, 1.1);
}

TEST(Spatial, BestReflectorMaximizesTwoHopGain) {
  const auto p = riscov::PathLossParams::from_carrier(2.4e9);
  const Vec2 bs{100.0, 0.0}, ue{0.0, 0.0};
  // d1*d2 products: 50*50 = 2500, 10*90 = 900, 80*52.2 ~ 4176.
  const std::vector<Vec2> candidates = {{50.0, 0.0}, {90.0, 0.0}, {20.0, 48.0}};
  const Vec2 best = riscov::select_best_reflector(candidates, bs, ue, p);
  EXPECT_DOUBLE_EQ(best.x, 90.0);
  EXPECT_DOUBLE_EQ(best.y, 0.0);
  EXPECT_THROW(riscov::select_best_reflector({}, bs, ue, p),
               riscov::DomainError);
}

TEST(Spatial, TruncationRadiusFollowsTailRule) {
  EXPECT_NEAR(riscov::interference_truncation_radius(100.0, 3.0, 0.005),
              20000.0, 1e-9);
  EXPECT_NEAR(riscov::interference_truncation_radius(100.0, 4.0, 0.005),
              100.0 / std::sqrt(0.005), 1e-9);
  EXPECT_THROW(riscov::interference_truncation_radius(100.0, 2.0, 0.005),
               riscov::DomainError);
}

TEST(Spatial, AnnulusSquaredDistancesAreUniform) {
  const double r_in = 100.0, r_out = 1000.0, lambda = 1e-5;
  const double mu =
      lambda * riscov::kPi * (r_out * r_out - r_in * r_in);
  const int reps = 10000;
  double count_sum = 0.0, d2_sum = 0.0;
  std::uint64_t n = 0;
  for (int i = 0; i < reps; ++i) {
    rng::Stream g(606, static_cast<std::uint64_t>(i), rng::kSubGeometry);
    for (double d2 : riscov::sample_ppp_annulus_sq(lambda, r_in, r_out, g)) {
      ASSERT_GE(d2, r_in * r_in);
      ASSERT_LE(d2, r_out * r_out);
      d2_sum += d2;
      ++n;
    }
    count_sum += 1.0;  // realization counter
  }
  const double mean_count = static_cast<double>(n) / reps;
  EXPECT_NEAR(mean_count, mu, 3.0 * std::sqrt(mu / reps));
  const double lo = r_in * r_in, hi = r_out * r_out;
  EXPECT_NEAR(d2_sum / static_cast<double>(n), (lo + hi) / 2.0,
              4.0 * (hi - lo) / std::sqrt(12.0 * static_cast<double>(n)));
}

#include "riscov/math/quadrature.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "riscov/errors.hpp"

namespace quad = riscov::quad;
using std::numbers::pi;

TEST(Quadrature, PolynomialIsExact) {
  const auto r = quad::integrate([](double x) { return x * x; }, 0.0, 1.0, {});
  EXPECT_NEAR(r.value, 1.0 / 3.0, 1e-14);
}

TEST(Quadrature, SineOverHalfPeriod) {
  const auto r = quad::integrate([](double x) { return std::sin(x); }, 0.0, pi, {});
  EXPECT_NEAR(r.value, 2.0, 1e-12);
  EXPECT_LT(r.error, 1e-10);
}

TEST(Quadrature, ReversedIntervalIsRejected) {
  EXPECT_THROW(
      quad::integrate([](double x) { return std::exp(x); }, 1.0, 0.0, {}),
      riscov::DomainError);
}

TEST(Quadrature, SemiInfiniteAlgebraicTail) {
  // Integral of y / (1 + y^3) over the half line = 2 pi / (3 sqrt 3),
  // assembled as [0,1] plus the mapped tail from 1.
  const auto f = [](double y) { return y / (1.0 + y * y * y); };
  const auto head = quad::integrate(f, 0.0, 1.0, {});
  const auto tail = quad::integrate_semi_infinite(f, 1.0, {});
  EXPECT_NEAR(head.value + tail.value, 2.0 * pi / (3.0 * std::sqrt(3.0)),
              1e-10);
}

TEST(Quadrature, SemiInfinitePowerTail) {
  const auto r = quad::integrate_semi_infinite(
      [](double x) { return 1.0 / (x * x); }, 1.0, {});
  EXPECT_NEAR(r.value, 1.0, 1e-12);
}

TEST(Quadrature, SemiInfiniteOscillatoryDecay) {
  // Imaginary part of exp(-(1 - 10i) x) integrated from 1.
  const std::complex<double> s(1.0, -10.0);
  const double truth = (std::exp(-s) / s).imag();
  const auto r = quad::integrate_semi_infinite(
      [](double x) { return std::exp(-x) * std::sin(10.0 * x); }, 1.0, {});
  EXPECT_NEAR(r.value, truth, 1e-10);
}

TEST(Quadrature, SeededEdgesHandleKinks) {
  const std::vector<double> edges = {0.0, pi, 2.0 * pi, 3.0 * pi, 10.0};
  const auto r = quad::integrate_seeded(
      [](double x) { return std::abs(std::sin(x)); }, edges, {});
  EXPECT_NEAR(r.value, 7.0 - std::cos(10.0 - 3.0 * pi), 1e-12);
}

TEST(Quadrature, TinyPanelBudgetThrows) {
  // ~160 oscillations per panel cannot converge within a four panel budget;
  // the failure must be loud, not silent.
  quad::Options opt;
  opt.rel_tol = 1e-12;
  opt.max_panels = 4;
  EXPECT_THROW(quad::integrate([](double x) { return std::sin(1000.0 * x); },
                               0.0, 1.0, opt),
               riscov::ConvergenceError);
}

TEST(Quadrature, NodeReplayIsExactForPolynomials) {
  // Nodes built against one integrand re-integrate any smooth function on
  // the same panels; for low-degree polynomials the rule is exact.
  const auto nodes = quad::build_nodes(
      [](double x) { return std::exp(-x); }, {0.0, 1.0, 2.0}, {});
  double w_sum = 0.0;
  for (double w : nodes.w) w_sum += w;
  EXPECT_NEAR(w_sum, 2.0, 1e-13);
  const double val = nodes.apply([](double x) { return x * x; });
  EXPECT_NEAR(val, 8.0 / 3.0, 1e-12);
}

TEST(Quadrature, PeriodicNodesIntegrateTrigExactly) {
  const auto nodes = quad::build_periodic_nodes(
      [](double psi) { return 1.0 / (2.0 + std::cos(psi)); });
  double w_sum = 0.0;
  for (double w : nodes.w) w_sum += w;
  EXPECT_NEAR(w_sum, 2.0 * pi, 1e-12);
  EXPECT_NEAR(nodes.apply([](double p) { return std::cos(p) * std::cos(p); }),
              pi, 1e-12);
  EXPECT_NEAR(nodes.apply([](double p) { return std::sin(p); }), 0.0, 1e-12);
  // The probe itself: exact value 2 pi / sqrt(3).
  EXPECT_NEAR(nodes.apply([](double p) { return 1.0 / (2.0 + std::cos(p)); }),
              2.0 * pi / std::sqrt(3.0), 1e-12);
}

TEST(Quadrature, TwoDimensionalNodesIntegratePolynomials) {
  const auto nodes = quad::build_nodes_2d(
      [](double x, double y) { return std::exp(-(x * x + y * y)); },
      0.0, 1.0, 0.0, 1.0);
  double w_sum = 0.0;
  for (double w : nodes.w) w_sum += w;
  EXPECT_NEAR(w_sum, 1.0, 1e-12);
  const double val =
      nodes.apply([](double x, double y) { return x * y; });
  EXPECT_NEAR(val, 0.25, 1e-12);
}

TEST(Quadrature, ErrorEstimateBoundsTrueError) {
  const auto r = quad::integrate(
      [](double x) { return std::exp(-x * x); }, 0.0, 3.0, {});
  const double truth = 0.8862073482595214;  // sqrt(pi)/2 * erf(3)
  EXPECT_NEAR(r.value, truth, 1e-12);
  EXPECT_GE(r.error, 0.0);
  EXPECT_GT(r.evals, 0);
}

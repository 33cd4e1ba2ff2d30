#pragma once

#include <stdexcept>
#include <string>

namespace riscov {

// Invalid argument outside a function's domain (nonpositive distance, bad
// exponent, malformed config value). Message names the offending parameter.
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// An expectation E[e^{sQ}] does not exist: the argument left the convergence
// strip. Carries the strip boundary so callers can report how far off we are.
class DivergenceError : public std::domain_error {
 public:
  DivergenceError(const std::string& what, double boundary)
      : std::domain_error(what), boundary_(boundary) {}
  double boundary() const noexcept { return boundary_; }

 private:
  double boundary_;
};

// Pole sits on the integration contour (real b inside the forbidden interval
// of the angular elimination integral).
class SingularityError : public std::domain_error {
 public:
  explicit SingularityError(const std::string& what) : std::domain_error(what) {}
};

// Adaptive quadrature or iterative refinement stopped before reaching the
// requested tolerance. Carries both tolerances for diagnostics.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double achieved, double requested)
      : std::runtime_error(what), achieved_(achieved), requested_(requested) {}
  double achieved() const noexcept { return achieved_; }
  double requested() const noexcept { return requested_; }

 private:
  double achieved_;
  double requested_;
};

// A computed probability left [. -tol, 1+tol .]; indicates an upstream
// inconsistency rather than a tolerance problem.
class SanityError : public std::runtime_error {
 public:
  explicit SanityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace riscov

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "greenopt/roots.hpp"
#include "greenopt/tolerance.hpp"

/// Closed forms on the interval D = (-1, 1): Dirichlet Green kernel, torsion
/// function and the right-tail torsion mass.
namespace greenopt::kernel1d {

/// Total torsion mass (1, psi) of the interval.
inline constexpr double kTotalMass = 2.0 / 3.0;

namespace detail {
inline void check_closed(double x, const char *what) {
  if (!(x >= -1.0 && x <= 1.0))
    throw std::domain_error(std::string(what) + ": coordinate outside [-1, 1]");
}
} // namespace detail

/// G(x, y) for -u'' = f with u(+-1) = 0.
inline double green(double x, double y) {
  detail::check_closed(x, "green");
  detail::check_closed(y, "green");
  return x <= y ? 0.5 * (1.0 - y) * (1.0 + x) : 0.5 * (1.0 + y) * (1.0 - x);
}

inline double torsion(double x) {
  detail::check_closed(x, "torsion");
  return 0.5 * (1.0 - x) * (1.0 + x);
}

/// Torsion mass of the tail (x, 1): (2 - 3x + x^3) / 6.
inline double phi(double x) {
  detail::check_closed(x, "phi");
  // (1 - x)^2 (2 + x) / 6, free of cancellation near x = 1
  return (1.0 - x) * (1.0 - x) * (2.0 + x) / 6.0;
}

/// Unique xi in (-1, 1) with phi(xi) = t.
inline double xi_for_budget(double t, const ToleranceConfig &tol = {}) {
  if (!(t > 0.0 && t < kTotalMass))
    throw std::domain_error("xi_for_budget: budget must lie in (0, 2/3)");
  // phi is strictly decreasing with phi' = -torsion
  auto residual = [t](double x) { return phi(x) - t; };
  auto slope = [](double x) { return -torsion(x); };
  double x = solve_bracketed(residual, slope, -1.0, 1.0, tol.root_tol).x;
  // one Newton polish; the stopping test above only bounds the residual
  const double s = slope(x);
  if (s != 0.0) {
    const double y = x - residual(x) / s;
    if (y > -1.0 && y < 1.0 && std::abs(residual(y)) <= std::abs(residual(x)))
      x = y;
  }
  return x;
}

} // namespace greenopt::kernel1d

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "greenopt/forms.hpp"
#include "greenopt/intervals.hpp"
#include "greenopt/kernel1d.hpp"
#include "greenopt/optimize1d.hpp"

/// Two-fluid exchange flow in a duct with cross-section (-1, 1). The heavy
/// fluid occupies A; velocities are rescaled so that u'' = lambda + 1 on A and
/// u'' = lambda - 1 on the complement, u(+-1) = 0, with zero net flux.
namespace greenopt::exchangeflow {

struct PhysicalParams {
  double rho_heavy;
  double rho_light;
  double g;
  double pressure_gradient; ///< G = -dp/dz

  void validate() const {
    if (!(rho_heavy > rho_light && rho_light > 0.0))
      throw std::domain_error("PhysicalParams: need rho_heavy > rho_light > 0");
    if (!(g > 0.0))
      throw std::domain_error("PhysicalParams: gravity must be positive");
    if (!(pressure_gradient > rho_light * g && pressure_gradient < rho_heavy * g))
      throw std::domain_error(
          "PhysicalParams: pressure gradient must lie in (rho_light g, rho_heavy g)");
  }
};

/// Dimensionless pressure proxy ((rho' + rho) g - 2 G) / ((rho - rho') g).
inline double lambda_from_physical(const PhysicalParams &p) {
  p.validate();
  return ((p.rho_light + p.rho_heavy) * p.g - 2.0 * p.pressure_gradient) /
         ((p.rho_heavy - p.rho_light) * p.g);
}

/// lambda enforced by the flux balance (u, 1) = 0: 1 - 3 (chi_A, psi).
inline double lambda_from_region(const IntervalUnion &a) {
  return 1.0 - 3.0 * psi_mass(a);
}

/// Velocity u = (1 - lambda) psi - 2 G chi_A. Positive values move with the
/// light fluid (upwards); on the optimal regions the light fluid carries
/// Q >= 0.
struct FlowSolution {
  IntervalUnion region;
  double lambda = 0.0;
  double flux = 0.0;
  forms::PotentialProfile profile{IntervalUnion{}};

  double velocity(double x) const {
    return (1.0 - lambda) * kernel1d::torsion(x) - 2.0 * profile.value(x);
  }
  double velocity_derivative(double x) const {
    return -(1.0 - lambda) * x - 2.0 * profile.derivative(x);
  }
};

/// Q = (chi_{D \ A}, u), which equals 2 J(chi_A) - (1 - lambda)^2 / 3.
/// Evaluated on the complement so that Q vanishes exactly for A = D.
inline double flux(const IntervalUnion &a) {
  const IntervalUnion rest = complement(a);
  const double one_minus_lambda = 3.0 * psi_mass(a);
  return one_minus_lambda * psi_mass(rest) - 2.0 * forms::cross_energy(rest, a);
}

inline FlowSolution solve_flow(const IntervalUnion &a) {
  FlowSolution s;
  s.region = a;
  s.lambda = lambda_from_region(a);
  s.profile = forms::PotentialProfile(a);
  s.flux = flux(a);
  return s;
}

/// Flux of the optimal region (xi, 1) as a function of xi:
/// 1/12 - xi^2/4 + xi^4/4 - xi^6/12.
inline double optimal_flux_of_xi(double xi) {
  const double s = xi * xi;
  return 1.0 / 12.0 + s * (-0.25 + s * (0.25 - s / 12.0));
}

/// Left end of the region optimising the flux at fixed lambda.
inline double optimal_xi(double lambda, const ToleranceConfig &tol = {}) {
  if (!(lambda > -1.0 && lambda < 1.0))
    throw std::domain_error("optimal_xi: lambda must lie in (-1, 1)");
  return kernel1d::xi_for_budget((1.0 - lambda) / 3.0, tol);
}

/// Optimal flux at fixed lambda, 2 alpha_{(1 - lambda)/3} - (1 - lambda)^2 / 3,
/// evaluated through the sextic in xi, which avoids the cancellation.
inline double gamma_lambda(double lambda, const ToleranceConfig &tol = {}) {
  if (!(lambda > -1.0 && lambda < 1.0))
    throw std::domain_error("gamma_lambda: lambda must lie in (-1, 1)");
  return optimal_flux_of_xi(optimal_xi(lambda, tol));
}

struct SweepRow {
  double lambda;
  double xi;
  double gamma;
  double region_left;
  double region_right;
};

/// n interior samples lambda_i = -1 + 2 (i + 1) / (n + 1); odd n contains 0.
inline std::vector<SweepRow> gamma_sweep(int n, const ToleranceConfig &tol = {}) {
  if (n < 3)
    throw std::invalid_argument("gamma_sweep: need at least 3 samples");
  std::vector<SweepRow> rows;
  rows.reserve(n);
  for (int i = 0; i < n; ++i) {
    double lam = -1.0 + 2.0 * (i + 1) / (n + 1);
    if (2 * (i + 1) == n + 1)
      lam = 0.0;
    const double xi = optimal_xi(lam, tol);
    rows.push_back({lam, xi, gamma_lambda(lam, tol), xi, 1.0});
  }
  return rows;
}

struct GammaOptimum {
  double value;
  double lambda;
  IntervalUnion region;        ///< representative (0, 1)
  IntervalUnion mirror_region; ///< the co-optimal reflection (-1, 0)
};

/// Global optimum over lambda: value 1/12 at lambda = 0 on (0, 1) or (-1, 0).
inline GammaOptimum gamma(const ToleranceConfig &tol = {}) {
  const double xi = optimal_xi(0.0, tol);
  IntervalUnion region = IntervalUnion::normalize({{xi, 1.0}}, tol);
  IntervalUnion mirror = reflect(region, tol);
  return {gamma_lambda(0.0, tol), 0.0, std::move(region), std::move(mirror)};
}

} // namespace greenopt::exchangeflow

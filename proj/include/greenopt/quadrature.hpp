#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace greenopt::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Builds the n-point rule by Newton iteration on P_n from Chebyshev guesses.
inline Rule gauss_legendre(int n) {
  if (n < 1)
    throw std::invalid_argument("gauss_legendre: n must be positive");
  Rule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16)
        break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

/// Fixed-order rule mapped onto [a, b].
template <class F>
double integrate(const F &f, double a, double b, const Rule &rule) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * f(c + h * rule.nodes[i]);
  return h * sum;
}

namespace detail {

template <class F>
double adaptive_step(const F &f, double a, double b, double whole, double tol,
                     const Rule &rule, int depth) {
  const double m = 0.5 * (a + b);
  const double left = integrate(f, a, m, rule);
  const double right = integrate(f, m, b, rule);
  const double refined = left + right;
  if (depth <= 0 || std::abs(refined - whole) <= tol)
    return refined;
  return adaptive_step(f, a, m, left, 0.5 * tol, rule, depth - 1) +
         adaptive_step(f, m, b, right, 0.5 * tol, rule, depth - 1);
}

} // namespace detail

/// Adaptive bisection driven by the difference between a panel and its two
/// halves, both evaluated with the same Gauss-Legendre rule.
template <class F>
double adaptive(const F &f, double a, double b, double tol, const Rule &rule,
                int max_depth = 40) {
  if (!(b > a))
    return 0.0;
  return detail::adaptive_step(f, a, b, integrate(f, a, b, rule), tol, rule,
                               max_depth);
}

/// Iterated adaptive double integral of f(x, y) over x in [ax, bx] and
/// y in [ay(x), by(x)]. `inner_breaks(x)` returns interior y-values where the
/// integrand is known to lose smoothness; the inner integral is split there.
template <class F, class Lo, class Hi, class Breaks>
double adaptive_2d(const F &f, double ax, double bx, const Lo &ay, const Hi &by,
                   const Breaks &inner_breaks, double tol, const Rule &rule) {
  auto outer = [&](double x) {
    const double lo = ay(x);
    const double hi = by(x);
    std::vector<double> cuts{lo};
    for (double c : inner_breaks(x))
      if (c > lo && c < hi)
        cuts.push_back(c);
    cuts.push_back(hi);
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
      s += adaptive([&](double y) { return f(x, y); }, cuts[k], cuts[k + 1],
                    tol, rule);
    return s;
  };
  return adaptive(outer, ax, bx, tol, rule);
}

} // namespace greenopt::quad

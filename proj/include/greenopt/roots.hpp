#pragma once

#include <cmath>
#include <stdexcept>

namespace greenopt {

struct RootResult {
  double x;
  int iterations;
  bool converged;
};

/// Safeguarded Newton iteration for a monotone function on a bracket.
///
/// `f` and `df` must be callable as double(double). The root is assumed to be
/// bracketed by [lo, hi] (sign change or an exact zero at an end). A Newton
/// step is taken whenever it stays strictly inside the current bracket;
/// otherwise the bracket is bisected. Stops once |f(x)| <= ftol or the bracket
/// cannot be split further in double precision.
template <class F, class DF>
RootResult solve_bracketed(F &&f, DF &&df, double lo, double hi, double ftol,
                           int max_iter = 200) {
  if (!(lo <= hi))
    throw std::invalid_argument("solve_bracketed: empty bracket");
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0)
    return {lo, 0, true};
  if (fhi == 0.0)
    return {hi, 0, true};
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::domain_error("solve_bracketed: root not bracketed");
  const bool increasing = fhi > 0.0;

  double x = 0.5 * (lo + hi);
  double step_old = hi - lo;
  for (int it = 1; it <= max_iter; ++it) {
    const double fx = f(x);
    if (std::abs(fx) <= ftol)
      return {x, it, true};
    if ((fx > 0.0) == increasing)
      hi = x;
    else
      lo = x;

    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      return {x, it, true}; // bracket exhausted at machine resolution

    const double d = df(x);
    double next = mid;
    if (d != 0.0 && std::isfinite(d) && std::abs(2.0 * fx) < std::abs(step_old * d)) {
      const double cand = x - fx / d;
      if (cand == x)
        return {x, it, true}; // Newton step below resolution
      if (cand > lo && cand < hi)
        next = cand;
    }
    step_old = std::abs(next - x);
    x = next;
  }
  return {x, max_iter, false};
}

} // namespace greenopt

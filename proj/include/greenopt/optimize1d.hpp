#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "greenopt/forms.hpp"
#include "greenopt/intervals.hpp"
#include "greenopt/kernel1d.hpp"
#include "greenopt/tolerance.hpp"

/// Maximisation of J(chi_A) under the torsion budget (chi_A, psi) <= t.
namespace greenopt::optimize1d {

struct OptimizeParams {
  double t = 1.0 / 3.0;
  int m = 1;             ///< maximum number of pieces
  int max_iters = 20000;
  double step = 0.02;    ///< initial exchanged torsion mass
  double shrink = 0.5;   ///< backtracking factor for the exchanged mass
  ToleranceConfig tol{};

  void validate() const {
    if (!(t > 0.0 && t < kernel1d::kTotalMass))
      throw std::domain_error("OptimizeParams: t must lie in (0, 2/3)");
    if (m < 1)
      throw std::invalid_argument("OptimizeParams: m must be positive");
    if (max_iters < 0)
      throw std::invalid_argument("OptimizeParams: max_iters must be non-negative");
    if (!(step > 0.0))
      throw std::invalid_argument("OptimizeParams: step must be positive");
    if (!(shrink > 0.0 && shrink < 1.0))
      throw std::invalid_argument("OptimizeParams: shrink must lie in (0, 1)");
    tol.validate();
  }
};

struct TracePoint {
  int iteration;
  double energy;
};

struct OptimizeResult {
  IntervalUnion config;
  double energy = 0.0;
  double mass = 0.0;
  int iterations = 0;
  std::vector<TracePoint> trace;
  bool converged = false;
};

/// Optimal value alpha_t = J(chi_{(xi_t, 1)}).
inline double alpha_value(double t, const ToleranceConfig &tol = {}) {
  if (!(t > 0.0 && t < kernel1d::kTotalMass))
    throw std::domain_error("alpha_value: t must lie in (0, 2/3)");
  if (t > 1.0 / 3.0)
    return 2.0 * (t - 1.0 / 3.0) + alpha_value(kernel1d::kTotalMass - t, tol);
  const double x = kernel1d::xi_for_budget(t, tol);
  return (((-x / 8.0 + 1.0 / 6.0) * x + 0.25) * x - 0.5) * x + 5.0 / 24.0;
}

/// One exchange candidate between two boundary sites of the current set.
struct ExchangeMove {
  double from; ///< removal site
  double to;   ///< insertion site
  double gain; ///< 2 (h(to) - h(from))
  double room; ///< largest exchangeable torsion mass
};

/// All admissible moves of A ordered as boundary sites are enumerated. Moves
/// that cannot carry more than root_tol of torsion mass are left out.
inline std::vector<ExchangeMove> exchange_moves(const IntervalUnion &a,
                                                const ToleranceConfig &tol = {}) {
  std::vector<ExchangeMove> moves;
  if (a.empty())
    return moves;
  const forms::PotentialProfile u(a);
  const auto sites = forms::boundary_sites(a);
  std::vector<double> h(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i)
    h[i] = u.h(sites[i].x);
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = 0; j < sites.size(); ++j) {
      const auto &from = sites[i];
      const auto &to = sites[j];
      if (i == j || !to.insertable() || from.x == to.x)
        continue;
      const double piece_mass = psi_mass(a[from.piece]);
      const Interval &owner = a[to.piece];
      const Interval gap =
          to.lower ? Interval{to.piece == 0 ? -1.0 : a[to.piece - 1].hi, owner.lo}
                   : Interval{owner.hi, to.piece + 1 == a.size() ? 1.0
                                                                 : a[to.piece + 1].lo};
      const double room = std::min(piece_mass, psi_mass(gap));
      if (room > tol.root_tol)
        moves.push_back({from.x, to.x, 2.0 * (h[j] - h[i]), room});
    }
  return moves;
}

/// Largest first-order gain over admissible boundary pairs (-inf if none).
inline double max_exchange_gain(const IntervalUnion &a, const ToleranceConfig &tol = {}) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto &mv : exchange_moves(a, tol))
    best = std::max(best, mv.gain);
  return best;
}

namespace detail {

/// Tries the move with exchanged mass step, step*shrink, ... and returns the
/// first configuration that strictly increases J.
inline std::optional<std::pair<IntervalUnion, double>>
try_move(const IntervalUnion &a, double energy, const ExchangeMove &mv,
         const OptimizeParams &p) {
  double eps = std::min(p.step, mv.room);
  while (eps >= p.tol.root_tol) {
    IntervalUnion next = forms::perturbed_config(a, mv.from, mv.to, eps, p.tol);
    if (static_cast<int>(next.size()) <= p.m) {
      const double e = forms::j_energy(next);
      if (e > energy)
        return std::make_pair(std::move(next), e);
    }
    eps *= p.shrink;
  }
  return std::nullopt;
}

/// Fills gaps whose torsion mass is at most root_tol, typically slivers left
/// next to +-1 where psi vanishes.
inline IntervalUnion absorb_slivers(const IntervalUnion &a, const ToleranceConfig &tol) {
  if (a.empty())
    return a;
  std::vector<Interval> pieces(a.pieces().begin(), a.pieces().end());
  if (psi_mass(Interval{-1.0, pieces.front().lo}) <= tol.root_tol)
    pieces.front().lo = -1.0;
  if (psi_mass(Interval{pieces.back().hi, 1.0}) <= tol.root_tol)
    pieces.back().hi = 1.0;
  std::vector<Interval> out{pieces.front()};
  for (std::size_t k = 1; k < pieces.size(); ++k) {
    if (psi_mass(Interval{out.back().hi, pieces[k].lo}) <= tol.root_tol)
      out.back().hi = pieces[k].hi;
    else
      out.push_back(pieces[k]);
  }
  ToleranceConfig exact;
  exact.merge_tol = exact.root_tol = std::numeric_limits<double>::min();
  return IntervalUnion::normalize(out, exact);
}

/// Removes any torsion-mass excess over t from the leftmost piece.
inline IntervalUnion enforce_budget(const IntervalUnion &a, double t) {
  const double excess = psi_mass(a) - t;
  if (!(excess > 0.0) || a.empty())
    return a;
  std::vector<Interval> pieces(a.pieces().begin(), a.pieces().end());
  Interval &first = pieces.front();
  if (excess >= psi_mass(first))
    return a; // not reachable from exchange drift
  const double w = forms::detail::width_for_mass(first.lo, +1, excess, first.length());
  first.lo = std::nextafter(first.lo + w, 1.0);
  ToleranceConfig exact;
  exact.merge_tol = exact.root_tol = std::numeric_limits<double>::min();
  return IntervalUnion::normalize(pieces, exact);
}

} // namespace detail

/// Single interval of torsion mass t centred at the origin.
inline IntervalUnion centered_seed(double t, const ToleranceConfig &tol = {}) {
  const double c = kernel1d::xi_for_budget(1.0 / 3.0 - 0.5 * t, tol);
  return IntervalUnion::normalize({{-c, c}}, tol);
}

/// Exchange-move local search. Each iteration right-polarises the current set
/// and applies the best boundary-to-boundary exchange whose first-order gain
/// exceeds conv_tol, backtracking on the exchanged mass. When no first-order
/// gain is available (e.g. on even sets, where the gain vanishes by symmetry)
/// the moves are retried on their exact energy change before declaring
/// convergence.
inline OptimizeResult exchange_local_search(const OptimizeParams &params,
                                            std::optional<IntervalUnion> seed = {}) {
  params.validate();
  IntervalUnion a = seed ? *seed : centered_seed(params.t, params.tol);
  if (psi_mass(a) > params.t + params.tol.root_tol)
    throw std::domain_error("exchange_local_search: seed exceeds the budget");
  if (static_cast<int>(a.size()) > params.m)
    throw std::domain_error("exchange_local_search: seed has too many pieces");

  OptimizeResult res;
  double energy = forms::j_energy(a);
  res.trace.push_back({0, energy});

  int it = 0;
  for (; it < params.max_iters; ++it) {
    IntervalUnion polarized = polarize_right(a, params.tol);
    if (static_cast<int>(polarized.size()) <= params.m) {
      const double pe = forms::j_energy(polarized);
      if (pe >= energy) {
        a = std::move(polarized);
        energy = pe;
      }
    }

    auto moves = exchange_moves(a, params.tol);
    // descending gain, ties resolved by enumeration order
    std::stable_sort(moves.begin(), moves.end(),
                     [](const ExchangeMove &l, const ExchangeMove &r) {
                       return l.gain > r.gain;
                     });
    std::optional<std::pair<IntervalUnion, double>> accepted;
    for (const auto &mv : moves) {
      if (mv.gain <= params.tol.conv_tol)
        break;
      if ((accepted = detail::try_move(a, energy, mv, params)))
        break;
    }
    if (!accepted) {
      // second-order escape: pick the move with the largest exact increase
      double best_gain = 0.0;
      for (const auto &mv : moves) {
        auto cand = detail::try_move(a, energy, mv, params);
        if (cand && cand->second - energy > best_gain) {
          best_gain = cand->second - energy;
          accepted = std::move(cand);
        }
      }
    }
    if (!accepted) {
      res.converged = true;
      break;
    }
    a = detail::enforce_budget(detail::absorb_slivers(accepted->first, params.tol), params.t);
    energy = forms::j_energy(a);
    res.trace.push_back({it + 1, energy});
  }

  res.config = std::move(a);
  res.energy = energy;
  res.mass = psi_mass(res.config);
  res.iterations = it;
  return res;
}

/// Exhaustive search over grid endpoints with the budget active: all but the
/// last endpoint range over x_i = -1 + 2 i / grid_n and the last one is solved
/// so that the torsion mass equals t.
inline OptimizeResult brute_force_best(double t, int m, int grid_n,
                                       const ToleranceConfig &tol = {}) {
  if (!(t > 0.0 && t < kernel1d::kTotalMass))
    throw std::domain_error("brute_force_best: t must lie in (0, 2/3)");
  if (m < 1 || m > 2)
    throw std::invalid_argument("brute_force_best: m must be 1 or 2");
  if (grid_n < 16)
    throw std::invalid_argument("brute_force_best: grid_n must be at least 16");

  std::vector<double> grid(grid_n + 1);
  for (int i = 0; i <= grid_n; ++i)
    grid[i] = -1.0 + 2.0 * i / grid_n;

  OptimizeResult best;
  best.energy = -1.0;
  int evaluated = 0;

  // last piece starts at `lo` and must carry torsion mass `need`
  auto close_last = [&](std::vector<Interval> pieces, double lo, double need) {
    if (need <= 0.0 || need > kernel1d::phi(lo))
      return;
    double hi;
    if (need == kernel1d::phi(lo)) {
      hi = 1.0;
    } else {
      const double w = forms::detail::width_for_mass(lo, +1, need, 1.0 - lo);
      hi = lo + w;
    }
    pieces.push_back({lo, hi});
    ToleranceConfig exact;
    exact.merge_tol = exact.root_tol = std::numeric_limits<double>::min();
    IntervalUnion cfg = IntervalUnion::normalize(pieces, exact);
    const double e = forms::j_energy(cfg);
    ++evaluated;
    if (e > best.energy) {
      best.energy = e;
      best.config = std::move(cfg);
    }
  };

  for (int i = 0; i < grid_n; ++i)
    close_last({}, grid[i], t);
  if (m == 2) {
    for (int i = 0; i < grid_n; ++i)
      for (int j = i + 1; j < grid_n; ++j) {
        const Interval first{grid[i], grid[j]};
        const double rest = t - psi_mass(first);
        if (rest <= 0.0)
          break;
        for (int k = j + 1; k < grid_n; ++k)
          close_last({first}, grid[k], rest);
      }
  }
  best.mass = psi_mass(best.config);
  best.iterations = evaluated;
  best.converged = true;
  best.trace.push_back({evaluated, best.energy});
  return best;
}

struct RelaxedResult {
  std::vector<double> density; ///< cell values in [0, 1]
  std::vector<double> centers;
  double energy = 0.0;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

/// Projection of v onto {0 <= f <= 1, sum w_i f_i <= budget} (w > 0) in the
/// norm sum m_i x_i^2 (m = 1 when `metric` is empty): clip, and if the budget
/// is violated find mu with sum w_i clip(v_i - mu w_i / m_i) = budget by
/// bisection.
inline std::vector<double> project_box_budget(const std::vector<double> &v,
                                              const std::vector<double> &w,
                                              double budget,
                                              const std::vector<double> &metric = {}) {
  if (w.size() != v.size() || (!metric.empty() && metric.size() != v.size()))
    throw std::invalid_argument("project_box_budget: size mismatch");
  auto clipped = [&](double mu) {
    std::vector<double> f(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double shift = metric.empty() ? w[i] : w[i] / metric[i];
      f[i] = std::clamp(v[i] - mu * shift, 0.0, 1.0);
    }
    return f;
  };
  auto load = [&](const std::vector<double> &f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      s += w[i] * f[i];
    return s;
  };
  std::vector<double> f = clipped(0.0);
  if (load(f) <= budget)
    return f;
  double lo = 0.0, hi = 1.0;
  while (load(clipped(hi)) > budget)
    hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (load(clipped(mid)) > budget)
      lo = mid;
    else
      hi = mid;
  }
  return clipped(hi);
}

/// Projected gradient ascent for the relaxed problem on grid_n midpoint cells.
/// J is convex, so every projected step with any positive step size is
/// non-decreasing in energy.
inline RelaxedResult relaxed_projected_ascent(double t, int grid_n,
                                              const OptimizeParams &params = {}) {
  if (!(t > 0.0 && t < kernel1d::kTotalMass))
    throw std::domain_error("relaxed_projected_ascent: t must lie in (0, 2/3)");
  if (grid_n < 32)
    throw std::invalid_argument("relaxed_projected_ascent: grid_n must be at least 32");

  const int n = grid_n;
  const double dx = 2.0 / n;
  RelaxedResult res;
  res.centers.resize(n);
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    res.centers[i] = -1.0 + (i + 0.5) * dx;
    w[i] = kernel1d::torsion(res.centers[i]) * dx;
  }
  // collocated operator: (G f)_i = sum_j green(x_i, x_j) f_j dx
  std::vector<double> g(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g[static_cast<std::size_t>(i) * n + j] =
          kernel1d::green(res.centers[i], res.centers[j]) * dx;

  auto apply = [&](const std::vector<double> &f) {
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j)
        s += g[static_cast<std::size_t>(i) * n + j] * f[j];
      out[i] = s;
    }
    return out;
  };
  auto energy_of = [&](const std::vector<double> &f, const std::vector<double> &gf) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      s += f[i] * gf[i] * dx;
    return s;
  };

  // right-leaning ramp breaks the reflection symmetry of the problem
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i)
    f[i] = 0.5 * (1.0 + res.centers[i]);
  f = project_box_budget(f, w, t);

  double scale = 0.0; // Gershgorin bound on the Hessian 2 G dx
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j)
      row += g[static_cast<std::size_t>(i) * n + j] * dx;
    scale = std::max(scale, 2.0 * row);
  }
  const double step = 10.0 / scale;

  std::vector<double> gf = apply(f);
  double energy = energy_of(f, gf);
  res.trace.push_back(energy);
  const int max_iters = std::max(1, params.max_iters);
  int it = 0;
  for (; it < max_iters; ++it) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
      v[i] = f[i] + step * 2.0 * gf[i] * dx;
    std::vector<double> next = project_box_budget(v, w, t);
    std::vector<double> gnext = apply(next);
    const double e = energy_of(next, gnext);
    double change = 0.0;
    for (int i = 0; i < n; ++i)
      change = std::max(change, std::abs(next[i] - f[i]));
    if (e < energy) // rounding only; keep the monotone trace
      break;
    f = std::move(next);
    gf = std::move(gnext);
    energy = e;
    res.trace.push_back(energy);
    if (change <= 1e-13) {
      res.converged = true;
      ++it;
      break;
    }
  }
  res.density = std::move(f);
  res.energy = energy;
  res.iterations = it;
  return res;
}

} // namespace greenopt::optimize1d

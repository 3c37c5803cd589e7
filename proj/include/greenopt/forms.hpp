#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "greenopt/intervals.hpp"
#include "greenopt/kernel1d.hpp"
#include "greenopt/quadrature.hpp"
#include "greenopt/roots.hpp"
#include "greenopt/tolerance.hpp"

/// Potentials u = G chi_A, the energy J(chi_A) = (chi_A, G chi_A), the ratio
/// h = u / psi and the local exchange perturbations built on them.
namespace greenopt::forms {

/// u = G chi_A as a piecewise quadratic on the breakpoints of A.
///
/// With L(x) = int_{A n (-1,x)} (1 + y) dy and R(x) = int_{A n (x,1)} (1 - y) dy
/// the potential is u = ((1 - x) L + (1 + x) R) / 2, u' = (R - L) / 2 and
/// h = u / psi = L / (1 + x) + R / (1 - x). L is accumulated from the left and
/// R from the right so that neither suffers cancellation near +-1.
class PotentialProfile {
public:
  struct Segment {
    double lo, hi;
    bool inside;     ///< segment lies in the source set
    double left_lo;  ///< L(lo)
    double right_hi; ///< R(hi)
  };

  explicit PotentialProfile(IntervalUnion source) : source_(std::move(source)) {
    std::vector<double> bp{-1.0};
    for (double e : source_.endpoints())
      if (e > bp.back())
        bp.push_back(e);
    if (bp.back() < 1.0)
      bp.push_back(1.0);
    segments_.reserve(bp.size() - 1);
    double left = 0.0;
    for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
      const bool in = source_.contains(0.5 * (bp[k] + bp[k + 1]));
      segments_.push_back({bp[k], bp[k + 1], in, left, 0.0});
      if (in)
        left += left_weight(bp[k], bp[k + 1]);
    }
    double right = 0.0;
    for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
      it->right_hi = right;
      if (it->inside)
        right += right_weight(it->lo, it->hi);
    }
  }

  const IntervalUnion &source() const { return source_; }
  const std::vector<Segment> &segments() const { return segments_; }

  double left_moment(double x) const {
    const Segment &s = locate(x);
    return s.inside ? s.left_lo + left_weight(s.lo, x) : s.left_lo;
  }

  double right_moment(double x) const {
    const Segment &s = locate(x);
    return s.inside ? s.right_hi + right_weight(x, s.hi) : s.right_hi;
  }

  double value(double x) const {
    return 0.5 * ((1.0 - x) * left_moment(x) + (1.0 + x) * right_moment(x));
  }

  double derivative(double x) const {
    return 0.5 * (right_moment(x) - left_moment(x));
  }

  /// -chi_A(x) away from breakpoints.
  double second_derivative(double x) const { return locate(x).inside ? -1.0 : 0.0; }

  /// h = u / psi on (-1, 1), extended by u'(-1) and -u'(1) at the ends.
  double h(double x) const {
    const double l = left_moment(x);
    const double r = right_moment(x);
    const double left_term = x <= -1.0 ? 0.0 : l / (1.0 + x);
    const double right_term = x >= 1.0 ? 0.0 : r / (1.0 - x);
    return left_term + right_term;
  }

  /// Coefficients (c0, c1, c2) of u = c0 + c1 x + c2 x^2 on segment k.
  std::array<double, 3> coefficients(std::size_t k) const {
    const Segment &s = segments_.at(k);
    if (!s.inside) {
      const double l = s.left_lo, r = s.right_hi;
      return {0.5 * (l + r), 0.5 * (r - l), 0.0};
    }
    // L = l0 + x + x^2/2, R = r0 - x + x^2/2 on the segment
    const double l0 = s.left_lo - s.lo - 0.5 * s.lo * s.lo;
    const double r0 = s.right_hi + s.hi - 0.5 * s.hi * s.hi;
    return {0.5 * (l0 + r0), 0.5 * (r0 - l0), -0.5};
  }

  /// Exact integral of u over [lo, hi] (3-point Gauss per segment).
  double integrate(double lo, double hi) const {
    static const quad::Rule rule = quad::gauss_legendre(3);
    double s = 0.0;
    for (const auto &seg : segments_) {
      const double a = std::max(lo, seg.lo), b = std::min(hi, seg.hi);
      if (b > a)
        s += quad::integrate([this](double x) { return value(x); }, a, b, rule);
    }
    return s;
  }

  static double left_weight(double a, double b) {
    return (b - a) * (1.0 + 0.5 * (a + b));
  }
  static double right_weight(double a, double b) {
    return (b - a) * (1.0 - 0.5 * (a + b));
  }

private:
  const Segment &locate(double x) const {
    if (!(x >= -1.0 && x <= 1.0))
      throw std::domain_error("PotentialProfile: coordinate outside [-1, 1]");
    std::size_t lo = 0, hi = segments_.size();
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (segments_[mid].lo <= x)
        lo = mid;
      else
        hi = mid;
    }
    return segments_[lo];
  }

  IntervalUnion source_;
  std::vector<Segment> segments_;
};

inline PotentialProfile potential(const IntervalUnion &a) {
  return PotentialProfile(a);
}

/// Energy of one piece against itself:
/// ((1+a)(1-a) w^2 - (1 + 3a) w^3 / 3 - w^4 / 4) / 2 with w = b - a.
inline double self_energy(const Interval &p) {
  const double w = p.length();
  const double alpha = 1.0 + p.lo, gamma = 1.0 - p.lo;
  return 0.5 * w * w * (alpha * gamma - (1.0 + 3.0 * p.lo) * w / 3.0 - 0.25 * w * w);
}

/// J(chi_A) from the separable form of the kernel: pieces i < j contribute
/// (int_i (1 + x)) (int_j (1 - y)).
inline double j_energy(const IntervalUnion &a) {
  double total = 0.0;
  double left_acc = 0.0;
  for (const auto &p : a.pieces()) {
    total += self_energy(p);
    total += left_acc * PotentialProfile::right_weight(p.lo, p.hi);
    left_acc += PotentialProfile::left_weight(p.lo, p.hi);
  }
  return total;
}

/// (chi_S, G chi_T) for disjoint S and T.
inline double cross_energy(const IntervalUnion &s, const IntervalUnion &t) {
  double total = 0.0;
  for (const auto &p : s.pieces())
    for (const auto &q : t.pieces()) {
      if (p.hi <= q.lo)
        total += 0.5 * PotentialProfile::left_weight(p.lo, p.hi) *
                 PotentialProfile::right_weight(q.lo, q.hi);
      else if (q.hi <= p.lo)
        total += 0.5 * PotentialProfile::left_weight(q.lo, q.hi) *
                 PotentialProfile::right_weight(p.lo, p.hi);
      else
        throw std::invalid_argument("cross_energy: sets overlap");
    }
  return total;
}

/// Numerical double integral of G over A x A, splitting the inner integral
/// at the kink y = x. Independent of the closed forms above.
inline double j_energy_quadrature(const IntervalUnion &a, int nodes) {
  if (nodes < 4)
    throw std::invalid_argument("j_energy_quadrature: need at least 4 nodes");
  const quad::Rule rule = quad::gauss_legendre(nodes);
  auto kernel = [](double x, double y) { return kernel1d::green(x, y); };
  double total = 0.0;
  for (const auto &p : a.pieces())
    for (const auto &q : a.pieces()) {
      total += quad::adaptive_2d(
          kernel, p.lo, p.hi, [&](double) { return q.lo; },
          [&](double) { return q.hi; },
          [](double x) { return std::array<double, 1>{x}; }, 1e-15, rule);
    }
  return total;
}

/// (u'(-1), u'(1)) from the mass and first moment of A.
inline std::pair<double, double> boundary_derivatives(const IntervalUnion &a) {
  const double m = measure(a), mom = moment(a);
  return {0.5 * (m - mom), -0.5 * (m + mom)};
}

inline double h_ratio(const IntervalUnion &a, double x) {
  if (!(x >= -1.0 && x <= 1.0))
    throw std::domain_error("h_ratio: coordinate outside [-1, 1]");
  return PotentialProfile(a).h(x);
}

/// A boundary point of A identified with a piece end.
struct BoundarySite {
  double x;
  std::size_t piece;
  bool lower; ///< true for the left end of the piece

  /// Mass can be inserted next to the site only if it is not +-1.
  bool insertable() const { return x > -1.0 && x < 1.0; }
};

inline std::vector<BoundarySite> boundary_sites(const IntervalUnion &a) {
  std::vector<BoundarySite> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.push_back({a[i].lo, i, true});
    out.push_back({a[i].hi, i, false});
  }
  return out;
}

inline BoundarySite find_site(const IntervalUnion &a, double x,
                              const ToleranceConfig &tol) {
  for (const auto &s : boundary_sites(a))
    if (std::abs(s.x - x) <= tol.merge_tol)
      return s;
  throw std::invalid_argument("not a boundary point of the set");
}

/// First-order rate 2 (h(b) - h(a)) of exchanging mass from a to b.
inline double exchange_gain(const IntervalUnion &a_set, double a, double b,
                            const ToleranceConfig &tol = {}) {
  const BoundarySite sa = find_site(a_set, a, tol);
  const BoundarySite sb = find_site(a_set, b, tol);
  if (sa.x == sb.x)
    throw std::invalid_argument("exchange_gain: a and b coincide");
  if (!sb.insertable())
    throw std::invalid_argument("exchange_gain: no room to insert mass at b");
  const PotentialProfile u(a_set);
  return 2.0 * (u.h(sb.x) - u.h(sa.x));
}

namespace detail {

inline double solve_tight(auto &&f, auto &&df, double lo, double hi) {
  return solve_bracketed(f, df, lo, hi, 0.0).x;
}

/// Width w in [0, max_w] such that the torsion mass of (x0, x0 + w) (dir = +1)
/// or (x0 - w, x0) (dir = -1) equals `mass`.
inline double width_for_mass(double x0, int dir, double mass, double max_w) {
  auto piece = [=](double w) {
    return dir > 0 ? Interval{x0, x0 + w} : Interval{x0 - w, x0};
  };
  auto f = [&](double w) { return psi_mass(piece(w)) - mass; };
  auto df = [&](double w) {
    const double end = x0 + dir * w;
    return 0.5 * (1.0 - end) * (1.0 + end);
  };
  return solve_tight(f, df, 0.0, max_w);
}

} // namespace detail

/// Moves torsion mass `eps` from the inner side of boundary point `a` to the
/// outer side of boundary point `b`, keeping the total torsion mass.
inline IntervalUnion perturbed_config(const IntervalUnion &a_set, double a,
                                      double b, double eps,
                                      const ToleranceConfig &tol = {}) {
  if (!(eps > 0.0))
    throw std::invalid_argument("perturbed_config: eps must be positive");
  const BoundarySite sa = find_site(a_set, a, tol);
  const BoundarySite sb = find_site(a_set, b, tol);
  if (sa.x == sb.x)
    throw std::invalid_argument("perturbed_config: a and b coincide");
  if (!sb.insertable())
    throw std::invalid_argument("perturbed_config: no room to insert mass at b");

  std::vector<Interval> pieces(a_set.pieces().begin(), a_set.pieces().end());

  // removal inside the piece that owns a
  Interval &host = pieces[sa.piece];
  const double host_mass = psi_mass(host);
  if (eps > host_mass + tol.root_tol)
    throw std::domain_error("perturbed_config: eps exceeds removable mass at a");
  double removed;
  bool host_gone = false;
  if (eps >= host_mass) {
    removed = host_mass;
    host_gone = true;
  } else {
    const double w = detail::width_for_mass(sa.x, sa.lower ? +1 : -1, eps,
                                            host.length());
    const Interval cut = sa.lower ? Interval{host.lo, host.lo + w}
                                  : Interval{host.hi - w, host.hi};
    removed = psi_mass(cut);
    if (sa.lower)
      host.lo = cut.hi;
    else
      host.hi = cut.lo;
  }

  // insertion into the gap next to b
  const Interval &owner = a_set[sb.piece];
  const Interval gap =
      sb.lower ? Interval{sb.piece == 0 ? -1.0 : a_set[sb.piece - 1].hi, owner.lo}
               : Interval{owner.hi, sb.piece + 1 == a_set.size()
                                        ? 1.0
                                        : a_set[sb.piece + 1].lo};
  const double gap_mass = psi_mass(gap);
  if (removed > gap_mass + tol.root_tol)
    throw std::domain_error("perturbed_config: eps exceeds insertable mass at b");
  Interval added;
  if (removed >= gap_mass) {
    added = gap;
  } else {
    const double w = detail::width_for_mass(sb.x, sb.lower ? -1 : +1, removed,
                                            gap.length());
    added = sb.lower ? Interval{sb.x - w, sb.x} : Interval{sb.x, sb.x + w};
  }

  if (host_gone)
    pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(sa.piece));
  pieces.push_back(added);
  // touching endpoints are glued by normalisation; use an exact-contact
  // tolerance so that tiny perturbations are not swallowed
  ToleranceConfig exact = tol;
  exact.merge_tol = std::numeric_limits<double>::min();
  exact.root_tol = exact.merge_tol;
  return IntervalUnion::normalize(pieces, exact);
}

/// Width zeta with psi-mass of [b, b + zeta] equal to that of [-b, -b + eta].
inline double matched_offset(double b, double eta) {
  if (!(b > 0.0 && b < 1.0))
    throw std::domain_error("matched_offset: b must lie in (0, 1)");
  if (!(eta > 0.0) || -b + eta > 1.0)
    throw std::domain_error("matched_offset: eta out of range");
  const double target = psi_mass(Interval{-b, -b + eta});
  if (target > psi_mass(Interval{b, 1.0}))
    throw std::domain_error("matched_offset: eta too large for the right tail");
  return detail::width_for_mass(b, +1, target, 1.0 - b);
}

/// Limit of (J(f_eps) - J(f)) / eps^2 for the even-configuration move from -b
/// to b: (2 / psi(b)^2) (b h(b) + u'(b) + b (1 - b)).
inline double symmetric_second_order(const IntervalUnion &a, double b,
                                     const ToleranceConfig &tol = {}) {
  if (!is_even(a, tol))
    throw std::invalid_argument("symmetric_second_order: set is not even");
  if (!(b > 0.0 && b < 1.0))
    throw std::domain_error("symmetric_second_order: b must lie in (0, 1)");
  const PotentialProfile u(a);
  const double psi_b = kernel1d::torsion(b);
  return 2.0 / (psi_b * psi_b) * (b * u.h(b) + u.derivative(b) + b * (1.0 - b));
}

// Quantities whose small-neighbourhood limits characterise the exchange
// move. They operate on the one-sided neighbourhood of a boundary point that
// lies inside A (resp. inside the complement).

/// Part of A within [a - eta, a + eta].
inline IntervalUnion local_part(const IntervalUnion &a_set, double a, double eta,
                                const ToleranceConfig &tol = {}) {
  return intersect(a_set, IntervalUnion::normalize({{a - eta, a + eta}}, tol), tol);
}

/// (chi_{A_eta}, G chi_{A_eta}) / (chi_{A_eta}, psi)^2, tends to 1 / psi(a).
inline double self_interaction_ratio(const IntervalUnion &a_set, double a,
                                     double eta, const ToleranceConfig &tol = {}) {
  const IntervalUnion local = local_part(a_set, a, eta, tol);
  const double m = psi_mass(local);
  return j_energy(local) / (m * m);
}

/// (chi_{A_eta}, u) / (chi_{A_eta}, psi), tends to h(a).
inline double first_order_ratio(const IntervalUnion &a_set, double a, double eta,
                                const ToleranceConfig &tol = {}) {
  const IntervalUnion local = local_part(a_set, a, eta, tol);
  const PotentialProfile u(a_set);
  double num = 0.0;
  for (const auto &p : local.pieces())
    num += u.integrate(p.lo, p.hi);
  return num / psi_mass(local);
}

/// (chi_{A_eta}, G chi_{B_zeta}) / eps^2 where both neighbourhoods carry
/// torsion mass eps, A_eta inside A at a and B_zeta inside the complement
/// at b. Tends to G(a, b) / (psi(a) psi(b)).
inline double cross_interaction_ratio(const IntervalUnion &a_set, double a,
                                      double b, double eps,
                                      const ToleranceConfig &tol = {}) {
  const BoundarySite sa = find_site(a_set, a, tol);
  const BoundarySite sb = find_site(a_set, b, tol);
  if (!sb.insertable() || sa.x == sb.x)
    throw std::invalid_argument("cross_interaction_ratio: invalid boundary pair");
  const Interval host = a_set[sa.piece];
  const double wa = detail::width_for_mass(sa.x, sa.lower ? +1 : -1, eps,
                                           host.length());
  const Interval in_a = sa.lower ? Interval{sa.x, sa.x + wa} : Interval{sa.x - wa, sa.x};
  const double gap_room =
      sb.lower ? sb.x - (sb.piece == 0 ? -1.0 : a_set[sb.piece - 1].hi)
               : (sb.piece + 1 == a_set.size() ? 1.0 : a_set[sb.piece + 1].lo) - sb.x;
  const double wb = detail::width_for_mass(sb.x, sb.lower ? -1 : +1, eps, gap_room);
  const Interval in_b = sb.lower ? Interval{sb.x - wb, sb.x} : Interval{sb.x, sb.x + wb};
  const IntervalUnion s = IntervalUnion::normalize({in_a}, tol);
  const IntervalUnion t = IntervalUnion::normalize({in_b}, tol);
  return cross_energy(s, t) / (eps * eps);
}

} // namespace greenopt::forms

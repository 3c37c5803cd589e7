#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "greenopt/kernel1d.hpp"
#include "greenopt/tolerance.hpp"

namespace greenopt {

struct Interval {
  double lo;
  double hi;

  double length() const { return hi - lo; }
  friend bool operator==(const Interval &, const Interval &) = default;
};

/// Finite union of disjoint open subintervals of (-1, 1) in canonical form:
/// sorted, strictly separated, no degenerate pieces. Immutable once built.
class IntervalUnion {
public:
  IntervalUnion() = default;

  /// Canonicalises raw pairs: clamps to [-1, 1], snaps endpoints within
  /// merge_tol of +-1, merges pieces whose gap is at most merge_tol and drops
  /// pieces of length at most merge_tol.
  static IntervalUnion normalize(std::span<const Interval> raw,
                                 const ToleranceConfig &tol = {}) {
    const double eps = tol.merge_tol;
    std::vector<Interval> v;
    v.reserve(raw.size());
    for (auto [p, q] : raw) {
      if (std::isnan(p) || std::isnan(q))
        throw std::invalid_argument("IntervalUnion: NaN endpoint");
      p = std::clamp(p, -1.0, 1.0);
      q = std::clamp(q, -1.0, 1.0);
      if (p > q + eps)
        throw std::invalid_argument("IntervalUnion: reversed interval");
      if (p <= -1.0 + eps)
        p = -1.0;
      if (q >= 1.0 - eps)
        q = 1.0;
      if (q - p <= eps)
        continue;
      v.push_back({p, q});
    }
    std::sort(v.begin(), v.end(),
              [](const Interval &l, const Interval &r) { return l.lo < r.lo; });
    std::vector<Interval> out;
    for (const auto &piece : v) {
      if (!out.empty() && piece.lo <= out.back().hi + eps)
        out.back().hi = std::max(out.back().hi, piece.hi);
      else
        out.push_back(piece);
    }
    return IntervalUnion(std::move(out));
  }

  static IntervalUnion normalize(std::initializer_list<Interval> raw,
                                 const ToleranceConfig &tol = {}) {
    return normalize(std::span<const Interval>(raw.begin(), raw.size()), tol);
  }

  static IntervalUnion full() { return IntervalUnion({{-1.0, 1.0}}); }

  std::span<const Interval> pieces() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }
  bool empty() const { return pieces_.empty(); }
  const Interval &operator[](std::size_t i) const { return pieces_[i]; }

  /// Membership in the open set.
  bool contains(double x) const {
    auto it = std::upper_bound(
        pieces_.begin(), pieces_.end(), x,
        [](double v, const Interval &p) { return v < p.hi; });
    return it != pieces_.end() && it->lo < x;
  }

  /// Sorted piece endpoints, including +-1 when a piece reaches them.
  std::vector<double> endpoints() const {
    std::vector<double> e;
    e.reserve(2 * pieces_.size());
    for (const auto &p : pieces_) {
      e.push_back(p.lo);
      e.push_back(p.hi);
    }
    return e;
  }

  friend bool operator==(const IntervalUnion &, const IntervalUnion &) = default;

private:
  explicit IntervalUnion(std::vector<Interval> pieces)
      : pieces_(std::move(pieces)) {}

  std::vector<Interval> pieces_;
};

/// Endpoint-wise comparison within `tol`.
inline bool approx_equal(const IntervalUnion &a, const IntervalUnion &b,
                         double tol) {
  if (a.size() != b.size())
    return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i].lo - b[i].lo) > tol || std::abs(a[i].hi - b[i].hi) > tol)
      return false;
  return true;
}

/// Torsion mass of a single interval, (b - a)(1 - (a^2 + ab + b^2)/3) / 2.
inline double psi_mass(const Interval &p) {
  const double w = p.hi - p.lo;
  return 0.5 * w * (1.0 - (p.lo * p.lo + p.lo * p.hi + p.hi * p.hi) / 3.0);
}

inline double psi_mass(const IntervalUnion &a) {
  double s = 0.0;
  for (const auto &p : a.pieces())
    s += psi_mass(p);
  return s;
}

inline double measure(const IntervalUnion &a) {
  double s = 0.0;
  for (const auto &p : a.pieces())
    s += p.length();
  return s;
}

/// First moment, the integral of x over the set.
inline double moment(const IntervalUnion &a) {
  double s = 0.0;
  for (const auto &p : a.pieces())
    s += 0.5 * p.length() * (p.lo + p.hi);
  return s;
}

namespace detail {

/// Endpoint sweep: keeps every elementary segment whose midpoint satisfies
/// `keep(in_a, in_b)`.
template <class Op>
IntervalUnion combine(const IntervalUnion &a, const IntervalUnion &b, Op keep,
                      const ToleranceConfig &tol) {
  std::vector<double> ev{-1.0, 1.0};
  for (double e : a.endpoints())
    ev.push_back(e);
  for (double e : b.endpoints())
    ev.push_back(e);
  std::sort(ev.begin(), ev.end());
  ev.erase(std::unique(ev.begin(), ev.end()), ev.end());
  std::vector<Interval> raw;
  for (std::size_t k = 0; k + 1 < ev.size(); ++k) {
    const double mid = 0.5 * (ev[k] + ev[k + 1]);
    if (keep(a.contains(mid), b.contains(mid)))
      raw.push_back({ev[k], ev[k + 1]});
  }
  return IntervalUnion::normalize(raw, tol);
}

} // namespace detail

inline IntervalUnion unite(const IntervalUnion &a, const IntervalUnion &b,
                           const ToleranceConfig &tol = {}) {
  return detail::combine(a, b, [](bool x, bool y) { return x || y; }, tol);
}

inline IntervalUnion intersect(const IntervalUnion &a, const IntervalUnion &b,
                               const ToleranceConfig &tol = {}) {
  return detail::combine(a, b, [](bool x, bool y) { return x && y; }, tol);
}

inline IntervalUnion subtract(const IntervalUnion &a, const IntervalUnion &b,
                              const ToleranceConfig &tol = {}) {
  return detail::combine(a, b, [](bool x, bool y) { return x && !y; }, tol);
}

/// D minus the closure of A.
inline IntervalUnion complement(const IntervalUnion &a,
                                const ToleranceConfig &tol = {}) {
  return subtract(IntervalUnion::full(), a, tol);
}

/// Image under x -> -x.
inline IntervalUnion reflect(const IntervalUnion &a,
                             const ToleranceConfig &tol = {}) {
  std::vector<Interval> raw;
  raw.reserve(a.size());
  for (const auto &p : a.pieces())
    raw.push_back({-p.hi, -p.lo});
  return IntervalUnion::normalize(raw, tol);
}

inline bool is_even(const IntervalUnion &a, const ToleranceConfig &tol = {}) {
  return approx_equal(a, reflect(a, tol), tol.merge_tol);
}

/// Polarisation towards the half-line [0, 1): (A n -A) u ((A u -A) n (0, 1)).
inline IntervalUnion polarize_right(const IntervalUnion &a,
                                    const ToleranceConfig &tol = {}) {
  const IntervalUnion mirror = reflect(a, tol);
  const IntervalUnion right_half = IntervalUnion::normalize({{0.0, 1.0}}, tol);
  return unite(intersect(a, mirror, tol),
               intersect(unite(a, mirror, tol), right_half, tol), tol);
}

/// Mirror image of polarize_right: pushes the non-symmetric part to (-1, 0).
inline IntervalUnion polarize_left(const IntervalUnion &a,
                                   const ToleranceConfig &tol = {}) {
  return reflect(polarize_right(reflect(a, tol), tol), tol);
}

inline bool is_right_polarized(const IntervalUnion &a,
                               const ToleranceConfig &tol = {}) {
  return approx_equal(a, polarize_right(a, tol), tol.merge_tol);
}

struct SymmetricSplit {
  IntervalUnion symmetric;     ///< A n -A
  IntervalUnion non_symmetric; ///< the rest, contained in (0, 1)
};

/// Splits a right-polarised set into its even part and its remainder.
inline SymmetricSplit decompose_symmetric(const IntervalUnion &a,
                                          const ToleranceConfig &tol = {}) {
  if (!is_right_polarized(a, tol))
    throw std::invalid_argument("decompose_symmetric: set is not right-polarised");
  const IntervalUnion mirror = reflect(a, tol);
  IntervalUnion sym = intersect(a, mirror, tol);
  const IntervalUnion right_half = IntervalUnion::normalize({{0.0, 1.0}}, tol);
  IntervalUnion rest =
      subtract(intersect(unite(a, mirror, tol), right_half, tol), sym, tol);
  return {std::move(sym), std::move(rest)};
}

} // namespace greenopt

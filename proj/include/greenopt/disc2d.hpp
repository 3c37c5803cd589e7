#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "greenopt/optimize1d.hpp"

/// Grid explorer for the relaxed problem on the unit disc.
namespace greenopt::disc2d {

inline constexpr double kPi = std::numbers::pi;

struct Point {
  double x;
  double y;
};

/// Dirichlet Green kernel of the unit disc,
/// (1/4pi) log((|x|^2 |y|^2 - 2 x.y + 1) / |x - y|^2).
inline double green_disc(Point p, Point q) {
  const double rp2 = p.x * p.x + p.y * p.y, rq2 = q.x * q.x + q.y * q.y;
  if (!(rp2 < 1.0) || !(rq2 < 1.0))
    throw std::domain_error("green_disc: points must lie in the open disc");
  const double dx = p.x - q.x, dy = p.y - q.y;
  const double dist2 = dx * dx + dy * dy;
  if (dist2 < 1e-28)
    throw std::domain_error("green_disc: singular at coincident points");
  const double dot = p.x * q.x + p.y * q.y;
  return std::log((rp2 * rq2 - 2.0 * dot + 1.0) / dist2) / (4.0 * kPi);
}

/// Same kernel from polar data; `one_minus_cos` = 1 - cos of the angle
/// between the points. Free of cancellation for nearby points.
inline double green_polar(double r1, double r2, double one_minus_cos) {
  const double rr = r1 * r2;
  const double num = (1.0 - rr) * (1.0 - rr) + 2.0 * rr * one_minus_cos;
  const double den = (r1 - r2) * (r1 - r2) + 2.0 * rr * one_minus_cos;
  return std::log(num / den) / (4.0 * kPi);
}

/// Torsion function of the disc, (1 - |x|^2) / 4.
inline double torsion_disc(Point p) {
  const double r2 = p.x * p.x + p.y * p.y;
  if (!(r2 <= 1.0))
    throw std::domain_error("torsion_disc: point outside the closed disc");
  return 0.25 * (1.0 - r2);
}

/// Uniform rings r_k = k / n_r split into n_theta equal sectors. Cell index
/// i = ring * n_theta + sector; sector j spans [j, j + 1) * 2pi / n_theta.
class PolarGrid {
public:
  PolarGrid(int n_r, int n_theta) : n_r_(n_r), n_theta_(n_theta) {
    if (n_r < 1)
      throw std::invalid_argument("PolarGrid: need at least one ring");
    if (n_theta < 4 || n_theta % 2 != 0)
      throw std::invalid_argument("PolarGrid: n_theta must be even and >= 4");
    dtheta_ = 2.0 * kPi / n_theta;
    for (int k = 0; k < n_r; ++k) {
      const double r1 = static_cast<double>(k) / n_r;
      const double r2 = static_cast<double>(k + 1) / n_r;
      area_.push_back(0.5 * (r2 * r2 - r1 * r1) * dtheta_);
      // centroid radius of an annular sector
      const double half = 0.5 * dtheta_;
      centroid_r_.push_back(2.0 / 3.0 * (r2 * r2 * r2 - r1 * r1 * r1) /
                            (r2 * r2 - r1 * r1) * std::sin(half) / half);
      // exact torsion mass (dtheta / 4) int (1 - r^2) r dr
      psi_mass_.push_back(0.25 * dtheta_ *
                          (0.5 * (r2 * r2 - r1 * r1) -
                           0.25 * (r2 * r2 * r2 * r2 - r1 * r1 * r1 * r1)));
    }
  }

  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  int size() const { return n_r_ * n_theta_; }
  double dtheta() const { return dtheta_; }

  int ring(int i) const { return i / n_theta_; }
  int sector(int i) const { return i % n_theta_; }
  int index(int ring, int sector) const { return ring * n_theta_ + sector; }

  double ring_area(int ring) const { return area_[ring]; }
  double area(int i) const { return area_[ring(i)]; }
  double centroid_radius(int ring) const { return centroid_r_[ring]; }
  double cell_psi_mass(int i) const { return psi_mass_[ring(i)]; }
  double sector_angle(int sector) const { return (sector + 0.5) * dtheta_; }

  Point centroid(int i) const {
    const double r = centroid_r_[ring(i)];
    const double a = sector_angle(sector(i));
    return {r * std::cos(a), r * std::sin(a)};
  }

  double total_area() const {
    double s = 0.0;
    for (int k = 0; k < n_r_; ++k)
      s += area_[k] * n_theta_;
    return s;
  }

  double total_psi_mass() const {
    double s = 0.0;
    for (int k = 0; k < n_r_; ++k)
      s += psi_mass_[k] * n_theta_;
    return s;
  }

  double max_cell_area() const { return *std::max_element(area_.begin(), area_.end()); }

  /// Index in units of pi / n_theta for a lattice-aligned angle.
  int lattice_index(double angle) const {
    const double u = angle / (kPi / n_theta_);
    const double k = std::round(u);
    if (std::abs(u - k) > 1e-9)
      throw std::invalid_argument("direction is not aligned with the angular lattice");
    const int m = 2 * n_theta_;
    return ((static_cast<int>(k) % m) + m) % m;
  }

  double lattice_angle(int k) const { return k * kPi / n_theta_; }

private:
  int n_r_, n_theta_;
  double dtheta_;
  std::vector<double> area_, centroid_r_, psi_mass_;
};

/// Relaxed density with cell values in [0, 1].
struct GridDensity {
  PolarGrid grid;
  std::vector<double> values;

  GridDensity(PolarGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (static_cast<int>(values.size()) != grid.size())
      throw std::invalid_argument("GridDensity: value count does not match grid");
    for (double x : values)
      if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("GridDensity: values must lie in [0, 1]");
  }

  static GridDensity constant(const PolarGrid &g, double c) {
    return GridDensity(g, std::vector<double>(g.size(), c));
  }
};

/// Unit direction given by its angle.
struct Direction {
  double angle;
};

/// Closed half-space {x . nu >= 0} through the origin, nu at `normal_angle`.
struct HalfSpace {
  double normal_angle;
};

/// Galerkin-type matrix K_ij ~ int_{cell i} int_{cell j} G. Each cell is cut
/// into s x s subcells; subcell pairs use the kernel at their centroids and a
/// subcell paired with itself uses
///   a^2 / (2 pi) (1/4 - log rho + log(1 - |c|^2)),  rho = sqrt(a / pi),
/// the exact self-interaction of the logarithmic part over the disc of equal
/// area plus the regular part at the centroid. Without subdivision the
/// boundary ring is badly underestimated and K loses definiteness.
/// Entries depend only on the two rings and the sector offset, which makes J
/// exactly invariant under lattice rotations and reflections.
class DiscKernel {
public:
  explicit DiscKernel(const PolarGrid &g, int subdivisions = 4)
      : grid_(g), half_(g.n_theta() / 2) {
    if (subdivisions < 1)
      throw std::invalid_argument("DiscKernel: subdivisions must be positive");
    const int nr = g.n_r(), nt = g.n_theta(), s = subdivisions;
    const double sub_dtheta = g.dtheta() / s;

    struct Sub {
      double r, theta, area, self;
    };
    auto subcells = [&](int ring) {
      std::vector<Sub> out;
      const double r1 = static_cast<double>(ring) / nr, w = 1.0 / (static_cast<double>(nr) * s);
      const double half = 0.5 * sub_dtheta;
      for (int k = 0; k < s; ++k) {
        const double lo = r1 + k * w, hi = r1 + (k + 1) * w;
        const double area = 0.5 * (hi * hi - lo * lo) * sub_dtheta;
        const double rc = 2.0 / 3.0 * (hi * hi * hi - lo * lo * lo) / (hi * hi - lo * lo) *
                          std::sin(half) / half;
        const double rho = std::sqrt(area / kPi);
        const double self =
            area * area / (2.0 * kPi) * (0.25 - std::log(rho) + std::log1p(-rc * rc));
        for (int q = 0; q < s; ++q)
          out.push_back({rc, (q + 0.5) * sub_dtheta, area, self});
      }
      return out;
    };
    std::vector<std::vector<Sub>> subs;
    for (int a = 0; a < nr; ++a)
      subs.push_back(subcells(a));

    table_.assign(static_cast<std::size_t>(nr) * nr * (half_ + 1), 0.0);
    for (int a = 0; a < nr; ++a)
      for (int b = a; b < nr; ++b)
        for (int d = 0; d <= half_; ++d) {
          const double shift = d * g.dtheta();
          double v = 0.0;
          for (std::size_t p = 0; p < subs[a].size(); ++p)
            for (std::size_t q = 0; q < subs[b].size(); ++q) {
              const Sub &x = subs[a][p], &y = subs[b][q];
              if (a == b && d == 0 && p == q) {
                v += x.self;
                continue;
              }
              const double sn = std::sin(0.5 * (y.theta + shift - x.theta));
              v += green_polar(x.r, y.r, 2.0 * sn * sn) * x.area * y.area;
            }
          table_[slot(a, b, d)] = v;
          table_[slot(b, a, d)] = v;
        }

    // full circulant rows for apply()
    rows_.assign(static_cast<std::size_t>(nr) * nr * nt, 0.0);
    for (int a = 0; a < nr; ++a)
      for (int b = 0; b < nr; ++b)
        for (int q = 0; q < nt; ++q)
          rows_[(static_cast<std::size_t>(a) * nr + b) * nt + q] = table_[slot(a, b, offset(0, q))];
  }

  const PolarGrid &grid() const { return grid_; }

  double entry(int i, int j) const {
    return table_[slot(grid_.ring(i), grid_.ring(j),
                       offset(grid_.sector(i), grid_.sector(j)))];
  }

  /// (K f)_i; the energy gradient is 2 K f.
  std::vector<double> apply(const std::vector<double> &f) const {
    const int nt = grid_.n_theta(), nr = grid_.n_r();
    std::vector<double> out(f.size(), 0.0);
    for (int a = 0; a < nr; ++a)
      for (int b = 0; b < nr; ++b) {
        const double *row = &rows_[(static_cast<std::size_t>(a) * nr + b) * nt];
        const double *fb = &f[static_cast<std::size_t>(b) * nt];
        double *oa = &out[static_cast<std::size_t>(a) * nt];
        // out[s] += sum_q row[(q - s) mod nt] fb[q]
        for (int s = 0; s < nt; ++s) {
          double acc = 0.0;
          for (int q = s; q < nt; ++q)
            acc += row[q - s] * fb[q];
          for (int q = 0; q < s; ++q)
            acc += row[q - s + nt] * fb[q];
          oa[s] += acc;
        }
      }
    return out;
  }

  double energy(const std::vector<double> &f) const {
    const std::vector<double> kf = apply(f);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      s += f[i] * kf[i];
    return s;
  }

private:
  std::size_t slot(int a, int b, int d) const {
    return (static_cast<std::size_t>(a) * grid_.n_r() + b) * (half_ + 1) + d;
  }
  int offset(int s, int q) const {
    const int d = std::abs(s - q);
    return std::min(d, grid_.n_theta() - d);
  }

  PolarGrid grid_;
  int half_;
  std::vector<double> table_;
  std::vector<double> rows_;
};

/// Discrete J(f) = sum_ij f_i f_j K_ij.
inline double grid_j(const GridDensity &f) { return DiscKernel(f.grid).energy(f.values); }

inline double l1_distance(const GridDensity &f, const GridDensity &g) {
  double s = 0.0;
  for (int i = 0; i < f.grid.size(); ++i)
    s += f.grid.area(i) * std::abs(f.values[i] - g.values[i]);
  return s;
}

/// Sector paired with `sector` by the reflection of half-space index k
/// (normal angle k pi / n_theta).
inline int reflected_sector(const PolarGrid &g, int k, int sector) {
  const int nt = g.n_theta();
  return (((k + nt / 2 - sector - 1) % nt) + nt) % nt;
}

/// +1 if the sector centre lies in the open half-space, -1 in the open
/// complement, 0 on the bounding line.
inline int halfspace_side(const PolarGrid &g, int k, int sector) {
  const int nt = g.n_theta(), m = 2 * nt;
  const int d = (((2 * sector + 1 - k) % m) + m) % m;
  if (d == nt / 2 || d == 3 * nt / 2)
    return 0;
  return (d < nt / 2 || d > 3 * nt / 2) ? 1 : -1;
}

/// Polarisation: min on the cells of H, max on their mirror images outside H.
inline GridDensity polarize_disc(const GridDensity &f, HalfSpace h) {
  const PolarGrid &g = f.grid;
  const int k = g.lattice_index(h.normal_angle);
  std::vector<double> out = f.values;
  for (int r = 0; r < g.n_r(); ++r)
    for (int s = 0; s < g.n_theta(); ++s) {
      const int side = halfspace_side(g, k, s);
      if (side == 0)
        continue;
      const double mine = f.values[g.index(r, s)];
      const double other = f.values[g.index(r, reflected_sector(g, k, s))];
      out[g.index(r, s)] = side > 0 ? std::min(mine, other) : std::max(mine, other);
    }
  return GridDensity(g, std::move(out));
}

/// Sector order by increasing angular distance to lattice direction q,
/// counterclockwise neighbour first on ties.
inline std::vector<int> cap_order(const PolarGrid &g, int q) {
  const int nt = g.n_theta(), m = 2 * nt;
  std::vector<int> offset(nt);
  for (int s = 0; s < nt; ++s) {
    int d = (((2 * s + 1 - q) % m) + m) % m;
    if (d > nt)
      d -= m;
    offset[s] = d;
  }
  std::vector<int> order(nt);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int l, int r) {
    const int al = std::abs(offset[l]), ar = std::abs(offset[r]);
    if (al != ar)
      return al < ar;
    return offset[l] > offset[r];
  });
  return order;
}

/// Circular cap symmetrisation: on every ring the values are rearranged in
/// decreasing order of closeness to the direction.
inline GridDensity cap_symmetrize(const GridDensity &f, Direction w) {
  const PolarGrid &g = f.grid;
  const std::vector<int> order = cap_order(g, g.lattice_index(w.angle));
  std::vector<double> out(f.values.size());
  std::vector<double> ring(g.n_theta());
  for (int r = 0; r < g.n_r(); ++r) {
    for (int s = 0; s < g.n_theta(); ++s)
      ring[s] = f.values[g.index(r, s)];
    std::sort(ring.begin(), ring.end(), std::greater<>());
    for (int s = 0; s < g.n_theta(); ++s)
      out[g.index(r, order[s])] = ring[s];
  }
  return GridDensity(g, std::move(out));
}

/// Lattice half-spaces adapted to w: those whose complement contains w,
/// so that polarisation moves larger values towards w.
inline std::vector<HalfSpace> adapted_halfspaces(const PolarGrid &g, Direction w) {
  const int q = g.lattice_index(w.angle);
  const int nt = g.n_theta(), m = 2 * nt;
  std::vector<HalfSpace> out;
  for (int k = 0; k < m; ++k) {
    const int d = (((k - q) % m) + m) % m;
    if (d > nt / 2 && d < 3 * nt / 2)
      out.push_back({g.lattice_angle(k)});
  }
  return out;
}

struct CapDeviation {
  double distance;
  Direction direction;
};

/// min over lattice directions of ||f - C_w f||_1.
inline CapDeviation min_cap_deviation(const GridDensity &f) {
  CapDeviation best{std::numeric_limits<double>::infinity(), {0.0}};
  for (int q = 0; q < 2 * f.grid.n_theta(); ++q) {
    const Direction w{f.grid.lattice_angle(q)};
    const double d = l1_distance(f, cap_symmetrize(f, w));
    if (d < best.distance)
      best = {d, w};
  }
  return best;
}

/// An adapted half-space whose polarisation strictly reduces the distance to
/// the cap symmetrisation, if the lattice offers one.
inline std::optional<HalfSpace> improving_halfspace(const GridDensity &f, Direction w) {
  const GridDensity cap = cap_symmetrize(f, w);
  const double base = l1_distance(f, cap);
  for (const HalfSpace &h : adapted_halfspaces(f.grid, w))
    if (l1_distance(polarize_disc(f, h), cap) < base * (1.0 - 1e-12))
      return h;
  return std::nullopt;
}

struct TwoPointResult {
  std::array<double, 2> phi_x; ///< (max, min) of x
  std::array<double, 2> phi_y;
  double sorted_distance;      ///< ||phi x - phi y||_1
  double distance;             ///< ||x - y||_1
  bool strict;                 ///< sorted_distance < distance
  /// x in R and y in closure(S), x in closure(R) and y in S, or the same with
  /// x and y swapped; R = {x2 < x1}, S = {x1 < x2}.
  bool opposite_order;
};

/// The two-point map (x1, x2) -> (max, min) applied to both pairs.
inline TwoPointResult sort_pair(std::array<double, 2> x, std::array<double, 2> y) {
  for (double v : {x[0], x[1], y[0], y[1]})
    if (!(v >= 0.0))
      throw std::invalid_argument("sort_pair: components must be non-negative");
  TwoPointResult r;
  r.phi_x = {std::max(x[0], x[1]), std::min(x[0], x[1])};
  r.phi_y = {std::max(y[0], y[1]), std::min(y[0], y[1])};
  r.sorted_distance = std::abs(r.phi_x[0] - r.phi_y[0]) + std::abs(r.phi_x[1] - r.phi_y[1]);
  r.distance = std::abs(x[0] - y[0]) + std::abs(x[1] - y[1]);
  r.strict = r.sorted_distance < r.distance;
  auto in_r = [](const std::array<double, 2> &p) { return p[1] < p[0]; };
  auto in_s = [](const std::array<double, 2> &p) { return p[0] < p[1]; };
  auto in_r_bar = [](const std::array<double, 2> &p) { return p[1] <= p[0]; };
  auto in_s_bar = [](const std::array<double, 2> &p) { return p[0] <= p[1]; };
  r.opposite_order = (in_r(x) && in_s_bar(y)) || (in_r_bar(x) && in_s(y)) ||
                     (in_r(y) && in_s_bar(x)) || (in_r_bar(y) && in_s(x));
  return r;
}

/// Length of the overlap of the closed ranges spanned by the two pairs when
/// they are ordered oppositely; the l1 contraction defect is twice this value.
inline double opposite_overlap(std::array<double, 2> x, std::array<double, 2> y) {
  const bool x_desc = x[1] <= x[0], y_desc = y[1] <= y[0];
  if (x_desc == y_desc)
    return 0.0;
  const double lo = std::max(std::min(x[0], x[1]), std::min(y[0], y[1]));
  const double hi = std::min(std::max(x[0], x[1]), std::max(y[0], y[1]));
  return std::max(0.0, hi - lo);
}

struct DiscParams {
  int max_iters = 3000;
  double step_scale = 10.0; ///< step = step_scale / (Gershgorin bound of 2K)
  int symmetrize_every = 10;
  double change_tol = 1e-12;
};

struct DiscResult {
  GridDensity density;
  double energy;
  CapDeviation deviation;
  std::vector<double> trace;
  int iterations;
  bool converged;
};

/// Projected gradient ascent on grid_j over {0 <= f <= 1, (f, psi) <= t},
/// interleaved with cap symmetrisation steps that are kept only when they do
/// not lower the energy.
inline DiscResult ascent_disc(double t, const PolarGrid &grid, const DiscParams &params = {}) {
  if (!(t > 0.0 && t < grid.total_psi_mass()))
    throw std::domain_error("ascent_disc: budget must lie in (0, total torsion mass)");
  const DiscKernel kernel(grid);
  const int n = grid.size();
  std::vector<double> w(n), area(n);
  for (int i = 0; i < n; ++i) {
    w[i] = grid.cell_psi_mass(i);
    area[i] = grid.area(i);
  }

  double bound = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j)
      row += std::abs(kernel.entry(i, j));
    bound = std::max(bound, 2.0 * row / grid.area(i));
  }
  const double step = params.step_scale / bound;

  // off-centre seed breaks rotational symmetry
  std::vector<double> f(n);
  double load = 0.0;
  for (int i = 0; i < n; ++i) {
    f[i] = 0.5 + 0.25 * std::cos(grid.sector_angle(grid.sector(i)));
    load += w[i] * f[i];
  }
  for (double &v : f)
    v *= t / load;
  f = optimize1d::project_box_budget(f, w, t, area);

  std::vector<double> kf = kernel.apply(f);
  auto energy_of = [&](const std::vector<double> &v, const std::vector<double> &kv) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      s += v[i] * kv[i];
    return s;
  };
  double energy = energy_of(f, kf);
  std::vector<double> trace{energy};
  bool converged = false;
  int it = 0;
  for (; it < params.max_iters; ++it) {
    std::vector<double> v(n);
    // gradient and projection in the area-weighted L2 metric
    for (int i = 0; i < n; ++i)
      v[i] = f[i] + step * 2.0 * kf[i] / area[i];
    std::vector<double> next = optimize1d::project_box_budget(v, w, t, area);
    double change = 0.0;
    for (int i = 0; i < n; ++i)
      change = std::max(change, std::abs(next[i] - f[i]));
    std::vector<double> knext = kernel.apply(next);
    const double e = energy_of(next, knext);
    if (e >= energy) {
      f = std::move(next);
      kf = std::move(knext);
      energy = e;
    }

    if (params.symmetrize_every > 0 && (it + 1) % params.symmetrize_every == 0) {
      const GridDensity cur(grid, f);
      const GridDensity sym = cap_symmetrize(cur, min_cap_deviation(cur).direction);
      std::vector<double> ks = kernel.apply(sym.values);
      const double es = energy_of(sym.values, ks);
      if (es >= energy) {
        change = std::max(change, l1_distance(cur, sym));
        f = sym.values;
        kf = std::move(ks);
        energy = es;
      }
    }
    trace.push_back(energy);
    if (change <= params.change_tol) {
      converged = true;
      ++it;
      break;
    }
  }
  GridDensity density(grid, std::move(f));
  const CapDeviation dev = min_cap_deviation(density);
  return {std::move(density), energy, dev, std::move(trace), it, converged};
}

} // namespace greenopt::disc2d

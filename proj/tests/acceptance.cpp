// Acceptance suite: one PASS/FAIL line per criterion. Exit status is zero when
// every criterion outside kKnownUnattainable passes.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "greenopt/greenopt.hpp"
#include "test_util.hpp"

using namespace greenopt;
using greenopt::testing::random_union;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char *name;
  double time_limit; ///< seconds, <= 0 for none
  std::function<Outcome()> run;
};

/// Criterion 10 cannot pass: opposite ordering is necessary for a strict
/// contraction but not sufficient.
const std::set<int> kKnownUnattainable{10};

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

double richardson10(double coarse, double fine) { return (10.0 * fine - coarse) / 9.0; }

double pick(std::mt19937_64 &rng, const std::vector<double> &v) {
  std::uniform_int_distribution<std::size_t> i(0, v.size() - 1);
  return v[i(rng)];
}

Outcome exact_constants() {
  constexpr double tol = 1e-12;
  const double xi = kernel1d::xi_for_budget(1.0 / 3.0);
  const double alpha = optimize1d::alpha_value(1.0 / 3.0);
  const auto g = exchangeflow::gamma();
  const double region_err = std::max(std::abs(g.region[0].lo), std::abs(g.region[0].hi - 1.0));
  const double err = std::max({std::abs(xi), std::abs(alpha - 5.0 / 24.0),
                               std::abs(g.value - 1.0 / 12.0), std::abs(g.lambda), region_err});
  const bool ok = g.region.size() == 1 && err <= tol;
  return {ok, fmt("max abs error %.3g (tol %.0e)", err, tol)};
}

Outcome main_theorem() {
  constexpr double xi_tol = 1e-6, energy_tol = 1e-10;
  double worst_xi = 0.0, worst_e = 0.0;
  int bad = 0;
  for (int i = 1; i <= 12; ++i)
    for (int m = 1; m <= 4; ++m) {
      optimize1d::OptimizeParams p;
      p.t = 0.05 * i;
      p.m = m;
      const auto r = optimize1d::exchange_local_search(p);
      if (r.config.size() != 1) {
        ++bad;
        continue;
      }
      const double dx = std::abs(r.config[0].lo - kernel1d::xi_for_budget(p.t));
      const double de = std::abs(r.energy - optimize1d::alpha_value(p.t));
      worst_xi = std::max(worst_xi, dx);
      worst_e = std::max(worst_e, de);
      bad += dx > xi_tol || de > energy_tol;
    }
  return {bad == 0, fmt("48 runs, %d failures, worst endpoint error %.3g, worst energy error %.3g",
                        bad, worst_xi, worst_e)};
}

Outcome oracle_equivalence() {
  constexpr double tol = 1e-9;
  int over = 0, beaten = 0;
  double worst_gap = -1.0;
  for (int i = 1; i <= 10; ++i)
    for (int m = 1; m <= 2; ++m) {
      const double t = 0.06 * i;
      const auto brute = optimize1d::brute_force_best(t, m, 200);
      optimize1d::OptimizeParams p;
      p.t = t;
      p.m = m;
      const auto local = optimize1d::exchange_local_search(p);
      over += brute.energy > optimize1d::alpha_value(t) + tol;
      beaten += local.energy < brute.energy - tol;
      worst_gap = std::max(worst_gap, brute.energy - local.energy);
    }
  return {over == 0 && beaten == 0,
          fmt("20 instances, oracle above alpha %d, local search below oracle %d, "
              "max(oracle - local) %.3g",
              over, beaten, worst_gap)};
}

Outcome first_order_gain() {
  std::mt19937_64 rng(4);
  double worst = 0.0; // max |difference quotient - gain| / eps
  for (int i = 0; i < 50; ++i) {
    const IntervalUnion a_set = random_union(rng, 3, -0.6, 0.6, 0.05);
    const auto ends = a_set.endpoints();
    double a = pick(rng, ends), b = pick(rng, ends);
    while (b == a)
      b = pick(rng, ends);
    const double gain = forms::exchange_gain(a_set, a, b);
    const double j0 = forms::j_energy(a_set);
    for (double eps : {1e-3, 1e-4}) {
      const double dj = forms::j_energy(forms::perturbed_config(a_set, a, b, eps)) - j0;
      worst = std::max(worst, std::abs(dj / eps - gain) / eps);
    }
  }
  return {worst <= 10.0, fmt("50 cases, max |dJ/eps - gain| / eps = %.3g (limit 10)", worst)};
}

Outcome asymptotic_limits() {
  constexpr double tol = 1e-4;
  std::mt19937_64 rng(5);
  double self_err = 0.0, cross_err = 0.0, offset_err = 0.0;
  for (int i = 0; i < 10; ++i) {
    const IntervalUnion a_set = random_union(rng, 3, -0.9, 0.9, 0.05);
    const double a = pick(rng, a_set.endpoints());
    const double r = richardson10(forms::self_interaction_ratio(a_set, a, 1e-3),
                                  forms::self_interaction_ratio(a_set, a, 1e-4));
    self_err = std::max(self_err, rel_err(r, 1.0 / kernel1d::torsion(a)));
  }
  for (int i = 0; i < 10; ++i) {
    const IntervalUnion a_set = random_union(rng, 3, -0.9, 0.9, 0.05);
    const auto ends = a_set.endpoints();
    double a = pick(rng, ends), b = pick(rng, ends);
    while (b == a)
      b = pick(rng, ends);
    const double r = richardson10(forms::cross_interaction_ratio(a_set, a, b, 1e-4),
                                  forms::cross_interaction_ratio(a_set, a, b, 1e-5));
    const double want = kernel1d::green(a, b) / (kernel1d::torsion(a) * kernel1d::torsion(b));
    cross_err = std::max(cross_err, rel_err(r, want));
  }
  std::uniform_real_distribution<double> ub(0.05, 0.9);
  for (int i = 0; i < 10; ++i) {
    const double b = ub(rng);
    auto coef = [b](double eta) { return (forms::matched_offset(b, eta) - eta) / (eta * eta); };
    const double r = richardson10(coef(1e-3), coef(1e-4));
    offset_err = std::max(offset_err, rel_err(r, 2.0 * b / (1.0 - b * b)));
  }
  const bool ok = self_err <= tol && cross_err <= tol && offset_err <= tol;
  return {ok, fmt("max relative error: self %.3g, cross %.3g, offset %.3g (tol %.0e)", self_err,
                  cross_err, offset_err, tol)};
}

Outcome identities() {
  constexpr double tol = 1e-12;
  double dual = 0.0, sym = 0.0;
  for (int i = 0; i < 101; ++i) {
    const double t = (2.0 / 3.0) * (i + 1) / 102.0;
    const double lhs = optimize1d::alpha_value(t);
    const double rhs = 2.0 * (t - 1.0 / 3.0) + optimize1d::alpha_value(2.0 / 3.0 - t);
    dual = std::max(dual, std::abs(lhs - rhs));
    const double lam = -1.0 + 2.0 * (i + 1) / 102.0;
    sym = std::max(sym, std::abs(exchangeflow::gamma_lambda(lam) -
                                 exchangeflow::gamma_lambda(-lam)));
  }
  return {dual <= tol && sym <= tol,
          fmt("duality %.3g, gamma symmetry %.3g (tol %.0e)", dual, sym, tol)};
}

Outcome flow_physics() {
  constexpr double balance_tol = 1e-10, flux_tol = 1e-12;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-0.98, 0.98);
  const auto rule = quad::gauss_legendre(6);
  double balance = 0.0, flux_err = 0.0, pde = 0.0; // pde: max residual / step^2
  for (int i = 0; i < 50; ++i) {
    const IntervalUnion a = random_union(rng, 4, -1.0, 1.0, 0.01);
    const auto s = exchangeflow::solve_flow(a);
    const auto ends = a.endpoints();
    std::vector<double> cuts{-1.0};
    cuts.insert(cuts.end(), ends.begin(), ends.end());
    cuts.push_back(1.0);
    double net = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
      if (cuts[k + 1] > cuts[k])
        net += quad::integrate([&](double x) { return s.velocity(x); }, cuts[k], cuts[k + 1],
                               rule);
    balance = std::max(balance, std::abs(net));
    const double lam = s.lambda;
    const double want_q = 2.0 * forms::j_energy(a) - (1.0 - lam) * (1.0 - lam) / 3.0;
    flux_err = std::max(flux_err, std::abs(s.flux - want_q));
    for (double h : {1e-2, 1e-3})
      for (int k = 0; k < 20; ++k) {
        const double x = ux(rng);
        bool near = x - h <= -1.0 || x + h >= 1.0;
        for (double e : ends)
          near = near || std::abs(e - x) <= 2.0 * h;
        if (near)
          continue;
        const double d2 = (s.velocity(x + h) - 2.0 * s.velocity(x) + s.velocity(x - h)) / (h * h);
        const double want = a.contains(x) ? lam + 1.0 : lam - 1.0;
        pde = std::max(pde, std::abs(d2 - want) / (h * h));
      }
  }
  const bool ok = balance <= balance_tol && flux_err <= flux_tol && pde <= 1.0;
  return {ok, fmt("50 regions, |(u,1)| %.3g, flux identity %.3g, PDE residual / step^2 %.3g",
                  balance, flux_err, pde)};
}

Outcome polarization() {
  std::mt19937_64 rng(8);
  double worst_1d = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const IntervalUnion a = random_union(rng, 5);
    worst_1d = std::max(worst_1d, forms::j_energy(a) - forms::j_energy(polarize_right(a)));
  }
  using namespace disc2d;
  const PolarGrid g(12, 24);
  const DiscKernel kernel(g);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> lattice(0, 2 * g.n_theta() - 1);
  double worst_2d = 0.0;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> v(g.size());
    for (double &x : v)
      x = u(rng);
    const GridDensity f(g, std::move(v));
    const GridDensity p = polarize_disc(f, {g.lattice_angle(lattice(rng))});
    worst_2d = std::max(worst_2d, kernel.energy(f.values) - kernel.energy(p.values));
  }
  const bool ok = worst_1d <= 1e-12 && worst_2d <= 1e-10;
  return {ok, fmt("max energy loss: 1D %.3g (tol 1e-12), disc %.3g (tol 1e-10)", worst_1d,
                  worst_2d)};
}

Outcome disc_symmetry() {
  const disc2d::PolarGrid g(32, 64);
  const auto r = disc2d::ascent_disc(0.25 * g.total_psi_mass(), g);
  const double limit = 2.0 * g.max_cell_area();
  return {r.deviation.distance < limit,
          fmt("%d iterations, cap deviation %.3g, limit %.3g", r.iterations,
              r.deviation.distance, limit)};
}

Outcome two_point() {
  constexpr double kRound = 1e-12;
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> cont(0.0, 1.0);
  std::uniform_int_distribution<int> lattice(0, 4);
  long expand = 0, necessity = 0, sufficiency = 0, overlap_bad = 0;
  std::array<double, 2> ex{}, ey{};
  for (int i = 0; i < 100000; ++i) {
    // half the pairs on a coarse lattice so that ties and equalities occur
    auto draw = [&] {
      return i % 2 ? std::array<double, 2>{cont(rng), cont(rng)}
                   : std::array<double, 2>{double(lattice(rng)), double(lattice(rng))};
    };
    const auto x = draw(), y = draw();
    const auto r = disc2d::sort_pair(x, y);
    // equal sums of disjoint ranges may differ in the last bit
    const bool strict = r.distance - r.sorted_distance > kRound;
    expand += r.sorted_distance > r.distance + kRound;
    necessity += strict && !r.opposite_order;
    if (r.opposite_order && !strict && sufficiency++ == 0) {
      ex = x;
      ey = y;
    }
    overlap_bad += std::abs(r.distance - r.sorted_distance - 2.0 * disc2d::opposite_overlap(x, y)) >
                   kRound;
  }
  const bool ok = expand == 0 && necessity == 0 && sufficiency == 0;
  std::string d = fmt("1e5 pairs, expansions %ld, strict outside region %ld, region without "
                      "strictness %ld, defect != 2*overlap %ld",
                      expand, necessity, sufficiency, overlap_bad);
  if (sufficiency)
    d += fmt("; e.g. x=(%g,%g) y=(%g,%g)", ex[0], ex[1], ey[0], ey[1]);
  return {ok, d};
}

} // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "exact constants", 1.0, exact_constants},
      {2, "single-interval optimum", 30.0, main_theorem},
      {3, "brute-force oracle", 120.0, oracle_equivalence},
      {4, "first-order gain", 0.0, first_order_gain},
      {5, "asymptotic limits", 0.0, asymptotic_limits},
      {6, "duality and symmetry", 0.0, identities},
      {7, "flow physics", 0.0, flow_physics},
      {8, "polarization monotonicity", 0.0, polarization},
      {9, "disc cap symmetry", 300.0, disc_symmetry},
      {10, "two-point strictness", 0.0, two_point},
  };
  int failed = 0, expected = 0;
  for (const auto &c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0.0 && secs > c.time_limit) {
      o.pass = false;
      o.detail += fmt("; over time limit %.0f s", c.time_limit);
    }
    const bool known = kKnownUnattainable.count(c.id) > 0;
    if (!o.pass)
      ++(known ? expected : failed);
    std::printf("criterion %2d %s  %s: %s (%.3f s)%s\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs, !o.pass && known ? " [known unattainable]" : "");
    std::fflush(stdout);
  }
  std::printf("summary: %d unexpected failure(s), %d known unattainable failure(s)\n", failed,
              expected);
  return failed == 0 ? 0 : 1;
}

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "greenopt/greenopt.hpp"

namespace {

using namespace greenopt;
using io::fmt;
using io::json;

enum ExitCode { kOk = 0, kUsage = 1, kDomain = 2, kNotConverged = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  double t = 1.0 / 3.0;
  bool t_given = false;
  int m = 1;
  int lambda_samples = 101;
  std::string grid = "32x64";
  std::string format; ///< empty: json for optimize, csv otherwise
  std::string out;
  std::string intervals;
  std::string seed;
  int max_iters = 0;
};

std::string read_source(const std::string &arg) {
  if (arg.empty() || arg[0] != '@')
    return arg;
  std::ifstream in(arg.substr(1));
  if (!in)
    throw UsageError("cannot read " + arg.substr(1));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::pair<int, int> parse_grid(const std::string &s) {
  const auto x = s.find('x');
  int nr = 0, nt = 0;
  try {
    if (x == std::string::npos)
      throw UsageError("");
    std::size_t used = 0;
    nr = std::stoi(s.substr(0, x), &used);
    if (used != x)
      throw UsageError("");
    nt = std::stoi(s.substr(x + 1), &used);
    if (used != s.size() - x - 1)
      throw UsageError("");
  } catch (const std::exception &) {
    throw UsageError("--grid must look like NRxNTHETA, e.g. 32x64");
  }
  if (nr < 1 || nt < 4 || nt % 2 != 0)
    throw UsageError("--grid needs NR >= 1 and an even NTHETA >= 4");
  return {nr, nt};
}

void emit(const Options &o, const std::string &text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f)
    throw UsageError("cannot open " + o.out);
  f << text;
}

int cmd_xi(const Options &o) {
  if (!(o.t > 0.0 && o.t < kernel1d::kTotalMass))
    throw UsageError("--t must lie in (0, 2/3)");
  const double xi = kernel1d::xi_for_budget(o.t);
  const double alpha = optimize1d::alpha_value(o.t);
  std::ostringstream ss;
  if (o.format == "json") {
    json doc{{"t", io::number(o.t)},
             {"xi", io::number(xi)},
             {"A", json::array({io::number(xi), 1})},
             {"alpha", io::number(alpha)}};
    ss << doc.dump(2) << '\n';
  } else {
    ss << "t,xi,A_left,A_right,alpha\n"
       << fmt(o.t) << ',' << fmt(xi) << ',' << fmt(xi) << ",1," << fmt(alpha) << '\n';
  }
  emit(o, ss.str());
  return kOk;
}

int cmd_energy(const Options &o) {
  if (o.intervals.empty())
    throw UsageError("--intervals is required");
  const IntervalUnion a = io::parse_intervals(read_source(o.intervals));
  const double j = forms::j_energy(a);
  const double mass = psi_mass(a);
  const double lam = exchangeflow::lambda_from_region(a);
  const double q = exchangeflow::flux(a);
  std::ostringstream ss;
  if (o.format == "json") {
    json doc = io::to_json(a);
    doc["J"] = io::number(j);
    doc["psi_mass"] = io::number(mass);
    doc["lambda"] = io::number(lam);
    doc["Q"] = io::number(q);
    ss << doc.dump(2) << '\n';
  } else {
    ss << "J,psi_mass,lambda,Q\n"
       << fmt(j) << ',' << fmt(mass) << ',' << fmt(lam) << ',' << fmt(q) << '\n';
  }
  emit(o, ss.str());
  return kOk;
}

int cmd_optimize(const Options &o) {
  if (!(o.t > 0.0 && o.t < kernel1d::kTotalMass))
    throw UsageError("--t must lie in (0, 2/3)");
  if (o.m < 1)
    throw UsageError("--m must be at least 1");
  optimize1d::OptimizeParams p;
  p.t = o.t;
  p.m = o.m;
  if (o.max_iters > 0)
    p.max_iters = o.max_iters;
  std::optional<IntervalUnion> seed;
  if (!o.seed.empty())
    seed = io::parse_intervals(read_source(o.seed));
  const auto r = optimize1d::exchange_local_search(p, seed);
  std::ostringstream ss;
  if (o.format == "json") {
    ss << io::to_json(r, o.t).dump(2) << '\n';
  } else {
    ss << "lo,hi\n";
    for (const Interval &iv : r.config.pieces())
      ss << fmt(iv.lo) << ',' << fmt(iv.hi) << '\n';
  }
  emit(o, ss.str());
  return r.converged ? kOk : kNotConverged;
}

int cmd_sweep(const Options &o) {
  if (o.lambda_samples < 3)
    throw UsageError("--lambda-samples must be at least 3");
  const auto rows = exchangeflow::gamma_sweep(o.lambda_samples);
  std::ostringstream ss;
  if (o.format == "json")
    ss << io::sweep_json(rows).dump(2) << '\n';
  else
    io::write_sweep_csv(ss, rows);
  emit(o, ss.str());
  return kOk;
}

int cmd_disc(const Options &o) {
  const auto [nr, nt] = parse_grid(o.grid);
  const disc2d::PolarGrid grid(nr, nt);
  const double total = grid.total_psi_mass();
  const double t = o.t_given ? o.t : 0.25 * total;
  if (!(t > 0.0 && t < total))
    throw UsageError("--t must lie in (0, total torsion mass of the grid)");
  disc2d::DiscParams p;
  if (o.max_iters > 0)
    p.max_iters = o.max_iters;
  const auto r = disc2d::ascent_disc(t, grid, p);
  const double cell = grid.max_cell_area();

  std::ostringstream report;
  if (o.format == "json") {
    json doc{{"t", io::number(t)},
             {"n_r", nr},
             {"n_theta", nt},
             {"energy", io::number(r.energy)},
             {"cap_deviation", io::number(r.deviation.distance)},
             {"cap_deviation_cells", io::number(r.deviation.distance / cell)},
             {"direction", io::number(r.deviation.direction.angle)},
             {"iterations", r.iterations},
             {"converged", r.converged}};
    report << doc.dump(2) << '\n';
  } else {
    report << "t=" << fmt(t) << '\n'
           << "energy=" << fmt(r.energy) << '\n'
           << "cap_deviation=" << fmt(r.deviation.distance) << '\n'
           << "cap_deviation_cells=" << fmt(r.deviation.distance / cell) << '\n'
           << "direction=" << fmt(r.deviation.direction.angle) << '\n'
           << "iterations=" << r.iterations << '\n'
           << "converged=" << (r.converged ? "true" : "false") << '\n';
  }
  std::ostringstream density;
  io::write_density_csv(density, r.density);
  if (o.out.empty()) {
    std::cout << density.str();
    std::cerr << report.str();
  } else {
    emit(o, density.str());
    std::cout << report.str();
  }
  return r.converged ? kOk : kNotConverged;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Green-energy shape optimisation toolkit"};
  app.require_subcommand(1, 1);
  Options o;

  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--format", o.format, "Output format (optimize: json, others: csv)")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", o.out, "Output path (default: standard output)");
  };

  auto *xi = app.add_subcommand("xi", "Optimal interval and value for budget t");
  xi->add_option("--t", o.t, "Torsion budget in (0, 2/3)")->required();
  add_common(xi);

  auto *energy = app.add_subcommand("energy", "Energy, torsion mass, lambda and flux of a set");
  energy->add_option("--intervals", o.intervals, "Interval JSON or @file")->required();
  add_common(energy);

  auto *opt = app.add_subcommand("optimize", "Exchange local search");
  opt->add_option("--t", o.t, "Torsion budget in (0, 2/3)");
  opt->add_option("--m", o.m, "Maximum number of intervals");
  opt->add_option("--seed", o.seed, "Seed intervals as JSON or @file");
  opt->add_option("--max-iters", o.max_iters, "Iteration cap");
  add_common(opt);

  auto *sweep = app.add_subcommand("sweep", "Optimal flux over a lambda grid");
  sweep->add_option("--lambda-samples", o.lambda_samples, "Number of interior lambda samples");
  add_common(sweep);

  auto *disc = app.add_subcommand("disc", "Relaxed ascent on a polar grid of the disc");
  disc->add_option("--t", o.t, "Torsion budget (default: a quarter of the total)");
  disc->add_option("--grid", o.grid, "Grid as NRxNTHETA");
  disc->add_option("--max-iters", o.max_iters, "Iteration cap");
  add_common(disc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kUsage;
  }
  o.t_given = disc->count("--t") > 0;
  if (o.format.empty())
    o.format = opt->parsed() ? "json" : "csv";

  try {
    if (xi->parsed())
      return cmd_xi(o);
    if (energy->parsed())
      return cmd_energy(o);
    if (opt->parsed())
      return cmd_optimize(o);
    if (sweep->parsed())
      return cmd_sweep(o);
    return cmd_disc(o);
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const io::ParseError &e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error &e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const std::invalid_argument &e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomain;
  }
}

#pragma once

#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "greenopt/disc2d.hpp"
#include "greenopt/exchangeflow.hpp"
#include "greenopt/intervals.hpp"
#include "greenopt/optimize1d.hpp"

namespace greenopt::io {

using json = nlohmann::ordered_json;

/// Raised for malformed interval documents.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Decimal text with 15 significant digits.
inline std::string fmt(double v) {
  if (v == 0.0)
    v = 0.0; // drop the sign of negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

/// JSON number rounded to 15 significant digits.
inline json number(double v) { return json::parse(fmt(v)); }

inline json to_json(const IntervalUnion &a) {
  json arr = json::array();
  for (const Interval &iv : a.pieces())
    arr.push_back(json::array({number(iv.lo), number(iv.hi)}));
  return json{{"intervals", arr}};
}

/// Accepts {"intervals": [[a,b], ...]} or a bare [[a,b], ...].
inline IntervalUnion intervals_from_json(const json &doc, const ToleranceConfig &tol = {}) {
  const json *arr = &doc;
  if (doc.is_object()) {
    if (!doc.contains("intervals"))
      throw ParseError("missing \"intervals\" key");
    arr = &doc.at("intervals");
  }
  if (!arr->is_array())
    throw ParseError("\"intervals\" must be an array");
  std::vector<Interval> pieces;
  for (const json &p : *arr) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw ParseError("each interval must be a pair of numbers");
    pieces.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  try {
    return IntervalUnion::normalize(pieces, tol);
  } catch (const std::invalid_argument &e) {
    throw ParseError(e.what());
  }
}

inline IntervalUnion parse_intervals(const std::string &text, const ToleranceConfig &tol = {}) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError(e.what());
  }
  return intervals_from_json(doc, tol);
}

inline json to_json(const optimize1d::OptimizeResult &r, double t) {
  json doc = to_json(r.config);
  doc["t"] = number(t);
  doc["energy"] = number(r.energy);
  doc["mass"] = number(r.mass);
  doc["iterations"] = r.iterations;
  doc["converged"] = r.converged;
  return doc;
}

inline void write_sweep_csv(std::ostream &os, const std::vector<exchangeflow::SweepRow> &rows) {
  os << "lambda,xi,gamma_lambda,region_left,region_right\n";
  for (const auto &r : rows)
    os << fmt(r.lambda) << ',' << fmt(r.xi) << ',' << fmt(r.gamma) << ','
       << fmt(r.region_left) << ',' << fmt(r.region_right) << '\n';
}

inline json sweep_json(const std::vector<exchangeflow::SweepRow> &rows) {
  json arr = json::array();
  for (const auto &r : rows)
    arr.push_back(json{{"lambda", number(r.lambda)},
                       {"xi", number(r.xi)},
                       {"gamma_lambda", number(r.gamma)},
                       {"region_left", number(r.region_left)},
                       {"region_right", number(r.region_right)}});
  return json{{"rows", arr}};
}

inline void write_density_csv(std::ostream &os, const disc2d::GridDensity &f) {
  os << "ring,sector,value\n";
  for (int i = 0; i < f.grid.size(); ++i)
    os << f.grid.ring(i) << ',' << f.grid.sector(i) << ',' << fmt(f.values[i]) << '\n';
}

} // namespace greenopt::io

#pragma once

#include <stdexcept>

namespace greenopt {

/// Tolerances shared by the root solvers, the interval canonicaliser and the
/// optimisers.
struct ToleranceConfig {
  double root_tol = 1e-14;  ///< absolute residual for monotone root solves
  double merge_tol = 1e-12; ///< endpoint gluing / degenerate-piece threshold
  double conv_tol = 1e-10;  ///< exchange-gain threshold for stationarity

  void validate() const {
    if (!(root_tol > 0.0) || !(merge_tol > 0.0) || !(conv_tol > 0.0))
      throw std::invalid_argument("ToleranceConfig: tolerances must be positive");
    if (!(root_tol <= merge_tol) || !(merge_tol <= 1e-6))
      throw std::invalid_argument(
          "ToleranceConfig: require root_tol <= merge_tol <= 1e-6");
  }
};

} // namespace greenopt

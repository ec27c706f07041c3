#pragma once

#include <cstddef>
#include <functional>

namespace nergpsa {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // sum of per-interval |Kronrod - Gauss|
  std::size_t intervals = 0;
  bool converged = false;
};

// Globally adaptive 7/15-point Gauss-Kronrod: the interval with the largest
// error estimate is bisected until the total estimate drops below
// max(abs_tol, rel_tol |value|) or max_intervals is reached.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, double rel_tol,
                                    std::size_t max_intervals = 2000);

}  // namespace nergpsa

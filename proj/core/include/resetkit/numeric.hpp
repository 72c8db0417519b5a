#pragma once

// Small scalar/vector optimizers used by the peak search, the correction
// factor fit and the b-solver. Sizes here are tiny (1-2 unknowns).

#include <cstddef>
#include <functional>
#include <vector>

namespace resetkit::numeric {

struct ScalarOptimum {
  double x;
  double value;
};

/// Golden-section minimization of a unimodal f on [lo, hi].
ScalarOptimum golden_section_minimize(const std::function<double(double)>& f,
                                      double lo, double hi, double x_tol);

struct SimplexOptions {
  double initial_step = 0.1;
  double x_tol = 1e-9;
  double f_tol = 1e-12;
  int max_evaluations = 4000;
};

struct SimplexResult {
  std::vector<double> x;
  double value;
  int evaluations;
  bool converged;
};

/// Nelder–Mead downhill simplex (standard reflection/expansion/contraction/
/// shrink coefficients 1, 2, 1/2, 1/2).
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> start, const SimplexOptions& options = {});

/// Bisection for a sign change of f on [lo, hi]; f(lo) and f(hi) must differ
/// in sign. Stops when the bracket is narrower than x_tol.
double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol,
              int max_iterations = 200);

/// Evaluates f(i) for i in [0, count) on up to `threads` worker threads
/// (0 = hardware concurrency). Results keep index order.
template <typename T>
std::vector<T> parallel_map(std::size_t count, const std::function<T(std::size_t)>& f,
                            unsigned threads = 0);

}  // namespace resetkit::numeric

#include "resetkit/detail/parallel_map.hpp"

#pragma once

#include <cmath>

namespace survsplit {

struct ScalarOptimum {
  double x = 0.0;
  double fx = 0.0;
  long evaluations = 0;
};

/// Golden-section search for a maximum of a unimodal `f` on [lo, hi].
/// Stops once the bracket is narrower than `tol`; only interior points are
/// evaluated.
template <class F>
ScalarOptimum golden_section_maximize(F&& f, double lo, double hi, double tol,
                                      int max_iter = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  long evals = 2;
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
    ++evals;
  }
  return f1 >= f2 ? ScalarOptimum{x1, f1, evals} : ScalarOptimum{x2, f2, evals};
}

}  // namespace survsplit

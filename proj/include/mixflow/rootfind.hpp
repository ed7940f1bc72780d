#ifndef MIXFLOW_ROOTFIND_HPP
#define MIXFLOW_ROOTFIND_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "mixflow/errors.hpp"

namespace mixflow::detail {

/// Residual and (optional) derivative of a scalar function at x.
struct FEval {
  double f;
  double df; // set to NaN when unavailable
};

/// Safeguarded Newton for a strictly monotone residual with a sign-changing
/// bracket [lo, hi]. Newton steps are clipped to the current bracket and the
/// bracket shrinks by bisection whenever the step stalls. Converges on
/// |f| <= tol.
inline double solve_monotone(const std::function<FEval(double)>& fn, double lo,
                             double hi, double x0, double tol, int maxiter,
                             const char* what) {
  if (lo > hi) std::swap(lo, hi);
  double x = std::min(std::max(x0, lo), hi);
  double flo = fn(lo).f;
  if (std::abs(flo) <= tol) return lo;
  double fhi = fn(hi).f;
  if (std::abs(fhi) <= tol) return hi;
  if (flo * fhi > 0.0)
    throw ConvergenceError(std::string(what) + ": bracket does not enclose a root");

  for (int it = 0; it < maxiter; ++it) {
    FEval e = fn(x);
    if (std::abs(e.f) <= tol) return x;
    if (e.f * flo > 0.0) {
      lo = x;
      flo = e.f;
    } else {
      hi = x;
      fhi = e.f;
    }
    double xn;
    if (std::isfinite(e.df) && e.df != 0.0) {
      xn = x - e.f / e.df;
      if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    } else {
      xn = 0.5 * (lo + hi);
    }
    if (xn == x) xn = 0.5 * (lo + hi);
    x = xn;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                       (std::abs(lo) + std::abs(hi)))
      return 0.5 * (lo + hi);
  }
  throw ConvergenceError(std::string(what) + ": no convergence after " +
                         std::to_string(maxiter) + " iterations");
}

} // namespace mixflow::detail

#endif

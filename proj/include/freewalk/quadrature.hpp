#pragma once

#include <cstddef>
#include <functional>

namespace freewalk {

struct QuadResult {
  double value = 0.0;
  double abserr = 0.0;
  long evals = 0;
};

// Adaptive Gauss-Kronrod 7/15 bisection on [a, b]. The tolerance is split
// across subdivisions so the returned abserr bounds the true total estimate.
QuadResult integrate_interval(const std::function<double(double)>& f, double a,
                              double b, double abs_tol, int max_depth = 48);

// Integral over [0, infinity): head [0, split] plus the algebraic-tail
// substitution u = split / v^2 on (0, 1]. The integrand must decay at least
// like u^{-3/2} for the tail to converge; callers are expected to rule out
// divergent cases before calling.
QuadResult integrate_halfline(const std::function<double(double)>& f,
                              double split, double abs_tol);

// Adaptive tensor-product integration of an even integrand over [-pi, pi]^d.
// f receives a point in [0, pi]^d; the result accounts for the 2^d mirror
// copies. Cells are split along their longest edge, worst estimated error
// first, so refinement concentrates near an integrable singularity at the
// origin without help from the caller.
QuadResult integrate_torus_even(const std::function<double(const double*)>& f,
                                int dim, double abs_tol, long max_evals);

}  // namespace freewalk

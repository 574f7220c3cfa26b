#pragma once

#include <map>
#include <memory>

#include "freewalk/green_lattice.hpp"

namespace freewalk {

// Per-factor evaluation context: caches Green-function quadrature and the
// inversion of t = r G(r), both of which are hammered by the free-product
// solvers. Purely memoizing, so everything stays deterministic.
class FactorContext {
 public:
  explicit FactorContext(FactorMeasure m, GreenOptions opt = {});

  const FactorMeasure& measure() const { return m_; }
  double theta() const { return theta_; }

  // Cached green_eval at r in [0, 1]. Derivatives are computed lazily:
  // max_order 1 covers Phi/Psi; order 2 is fetched only by phi_second.
  const GreenPoint& green(double r, int max_order = 1) const;

  // Unique r with r G(r) = t, for t in [0, theta].
  double radius_of_t(double t) const;

  // Phi(t) = G(r(t)); Phi'(t) = G'/(r G' + G); Phi''(t) per the implicit
  // second-derivative formula. Infinite derivatives of G at the endpoint
  // propagate as infinite flags.
  double phi(double t) const;
  Extended phi_prime(double t) const;
  Extended phi_second(double t) const;

  // Psi(t) = Phi(t) - t Phi'(t); equals G^2 / (r G' + G) at r = r(t).
  // At the endpoint of a divergent factor (G'(1) infinite) this is exactly 0.
  double psi(double t) const;

  // Psi via the Green-quotient route, as an independent algebraic path.
  double psi_green_route(double t) const;

 private:
  struct CacheEntry {
    GreenPoint gp;
    int order = 0;
  };
  FactorMeasure m_;
  GreenOptions opt_;
  double theta_;
  mutable std::map<double, CacheEntry> green_cache_;
  mutable std::map<double, double> radius_cache_;
};

// One-shot convenience wrappers.
double phi_factor(const FactorMeasure& m, double t);
Extended phi_factor_prime(const FactorMeasure& m, double t);
Extended phi_factor_second(const FactorMeasure& m, double t);
double psi_factor(const FactorMeasure& m, double t);

}  // namespace freewalk

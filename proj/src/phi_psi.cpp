#include "freewalk/phi_psi.hpp"

#include <cmath>

#include "freewalk/errors.hpp"

namespace freewalk {

namespace {
constexpr double kDomainSlack = 1e-9;
}

FactorContext::FactorContext(FactorMeasure m, GreenOptions opt)
    : m_(std::move(m)), opt_(opt) {
  if (m_.dim <= 2)
    raise(errc::infinite_theta, "factor context needs a transient walk (d >= 3)");
  theta_ = green(1.0).G.v;
}

const GreenPoint& FactorContext::green(double r, int max_order) const {
  auto it = green_cache_.find(r);
  if (it != green_cache_.end() && it->second.order >= max_order)
    return it->second.gp;
  GreenOptions o = opt_;
  o.max_order = max_order;
  CacheEntry entry{green_eval(m_, r, o), max_order};
  auto [pos, inserted] = green_cache_.insert_or_assign(r, std::move(entry));
  return pos->second.gp;
}

double FactorContext::radius_of_t(double t) const {
  if (t < 0.0 || t > theta_ + kDomainSlack * (1.0 + theta_))
    raise(errc::domain_error, "t outside [0, theta_i]");
  if (t <= 0.0) return 0.0;
  if (t >= theta_) return 1.0;
  auto it = radius_cache_.find(t);
  if (it != radius_cache_.end()) return it->second;

  double lo = 0.0, hi = 1.0;
  double r = t / theta_;  // starting guess, exact for linear f
  const double tol = 1e-14 * (1.0 + theta_);
  for (int iter = 0; iter < 200; ++iter) {
    const GreenPoint& gp = green(r);
    const double f = r * gp.G.v - t;
    if (std::abs(f) <= tol) break;
    if (f > 0)
      hi = r;
    else
      lo = r;
    double next = r;
    if (gp.dG.finite) {
      const double fp = gp.G.v + r * gp.dG.v;
      next = r - f / fp;
    }
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - r) < 1e-16) break;
    r = next;
  }
  radius_cache_.emplace(t, r);
  return r;
}

double FactorContext::phi(double t) const { return green(radius_of_t(t)).G.v; }

Extended FactorContext::phi_prime(double t) const {
  const double r = radius_of_t(t);
  const GreenPoint& gp = green(r);
  if (!gp.dG.finite) return ext(1.0);  // G'/(r G' + G) -> 1 as G' diverges
  return ext(gp.dG.v / (r * gp.dG.v + gp.G.v));
}

Extended FactorContext::phi_second(double t) const {
  const double r = radius_of_t(t);
  const GreenPoint& gp = green(r, 2);
  if (!gp.dG.finite)
    raise(errc::domain_error,
          "Phi'' at the divergent endpoint of a d <= 4 factor");
  if (!gp.d2G.finite) return ext_inf();
  const double i1 = r * gp.dG.v + gp.G.v;
  return ext((gp.G.v * gp.d2G.v - 2.0 * gp.dG.v * gp.dG.v) / (i1 * i1 * i1));
}

double FactorContext::psi(double t) const {
  return phi(t) - t * phi_prime(t).v;
}

double FactorContext::psi_green_route(double t) const {
  const double r = radius_of_t(t);
  const GreenPoint& gp = green(r);
  if (!gp.dG.finite) return 0.0;
  return gp.G.v * gp.G.v / (r * gp.dG.v + gp.G.v);
}

double phi_factor(const FactorMeasure& m, double t) {
  return FactorContext(m).phi(t);
}
Extended phi_factor_prime(const FactorMeasure& m, double t) {
  return FactorContext(m).phi_prime(t);
}
Extended phi_factor_second(const FactorMeasure& m, double t) {
  return FactorContext(m).phi_second(t);
}
double psi_factor(const FactorMeasure& m, double t) {
  return FactorContext(m).psi(t);
}

}  // namespace freewalk

#include "freewalk/freeprod.hpp"

#include <cmath>

#include "freewalk/errors.hpp"

namespace freewalk {

const char* to_string(Classification c) noexcept {
  switch (c) {
    case Classification::NonDegenerateDivergent: return "NonDegenerateDivergent";
    case Classification::DegenerateDivergent: return "DegenerateDivergent";
    case Classification::DegenerateConvergent: return "DegenerateConvergent";
  }
  return "?";
}

FreeProductAnalyzer::FreeProductAnalyzer(FreeProductConfig cfg, Tolerances tol)
    : alpha_(cfg.alpha), tol_(tol) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    raise(errc::bad_config, "alpha must lie in (0, 1)");
  GreenOptions go;
  go.tol = tol.quad_tol;
  f1_ = std::make_shared<FactorContext>(std::move(cfg.factor1), go);
  f2_ = std::make_shared<FactorContext>(std::move(cfg.factor2), go);
}

FreeProductAnalyzer::FreeProductAnalyzer(std::shared_ptr<const FactorContext> f1,
                                         std::shared_ptr<const FactorContext> f2,
                                         double alpha, Tolerances tol)
    : f1_(std::move(f1)), f2_(std::move(f2)), alpha_(alpha), tol_(tol) {
  if (!(alpha > 0.0 && alpha < 1.0))
    raise(errc::bad_config, "alpha must lie in (0, 1)");
}

ThetaBarInfo FreeProductAnalyzer::theta_bar() const {
  ThetaBarInfo info;
  const double q1 = f1_->theta() / alpha_i(1);
  const double q2 = f2_->theta() / alpha_i(2);
  info.value = std::min(q1, q2);
  info.argmin_factor = (q1 <= q2) ? 1 : 2;
  info.alpha_c = f1_->theta() / (f1_->theta() + f2_->theta());
  return info;
}

double FreeProductAnalyzer::phi(double t) const {
  return f1_->phi(alpha_i(1) * t) + f2_->phi(alpha_i(2) * t) - 1.0;
}

Extended FreeProductAnalyzer::phi_prime(double t) const {
  const Extended p1 = f1_->phi_prime(alpha_i(1) * t);
  const Extended p2 = f2_->phi_prime(alpha_i(2) * t);
  return ext(alpha_i(1) * p1.v + alpha_i(2) * p2.v);
}

Extended FreeProductAnalyzer::phi_second(double t) const {
  const Extended s1 = f1_->phi_second(alpha_i(1) * t);
  const Extended s2 = f2_->phi_second(alpha_i(2) * t);
  if (!s1.finite || !s2.finite) return ext_inf();
  const double a1 = alpha_i(1), a2 = alpha_i(2);
  return ext(a1 * a1 * s1.v + a2 * a2 * s2.v);
}

double FreeProductAnalyzer::psi(double t) const {
  return f1_->psi(alpha_i(1) * t) + f2_->psi(alpha_i(2) * t) - 1.0;
}

const SpectralSolution& FreeProductAnalyzer::classify() const {
  if (solution_) return *solution_;
  auto sol = std::make_shared<SpectralSolution>();
  const ThetaBarInfo tb = theta_bar();
  sol->theta_bar = tb.value;
  sol->alpha_c = tb.alpha_c;
  const double s = psi(tb.value);
  sol->psi_at_theta_bar = s;

  if (s < -tol_.critical_band) {
    sol->classification = Classification::NonDegenerateDivergent;
    // Psi is strictly decreasing with Psi(0) = 1, so the root is bracketed.
    double lo = tb.value * 1e-6, hi = tb.value;
    if (psi(lo) <= 0.0)
      raise(errc::root_bracket_failure, "Psi not positive near t = 0");
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * tb.value; ++it) {
      const double mid = 0.5 * (lo + hi);
      (psi(mid) > 0.0 ? lo : hi) = mid;
    }
    double theta = 0.5 * (lo + hi);
    // Newton polish with Psi' = -t Phi''
    for (int it = 0; it < 4; ++it) {
      const Extended p2 = phi_second(theta);
      if (!p2.finite || p2.v == 0.0) break;
      const double step = psi(theta) / (theta * p2.v);
      const double next = theta + step;
      if (next > lo && next < hi) theta = next;
    }
    sol->theta = theta;
  } else {
    sol->classification = (s > tol_.critical_band)
                              ? Classification::DegenerateConvergent
                              : Classification::DegenerateDivergent;
    sol->theta = tb.value;
  }

  sol->G_at_R = phi(sol->theta);
  sol->R = sol->theta / sol->G_at_R;
  // zeta_i(R) inverts t G_i(t) at alpha_i * theta (subordination identity:
  // zeta_i G_i(zeta_i) = alpha_i R G(R) = alpha_i theta).
  sol->zeta1_at_R = f1_->radius_of_t(alpha_i(1) * sol->theta);
  sol->zeta2_at_R = f2_->radius_of_t(alpha_i(2) * sol->theta);
  if (sol->classification != Classification::NonDegenerateDivergent) {
    const double tol_edge = 1e-7;
    if (alpha_i(1) * sol->theta >= f1_->theta() * (1.0 - tol_edge))
      sol->degenerate_along.push_back(1);
    if (alpha_i(2) * sol->theta >= f2_->theta() * (1.0 - tol_edge))
      sol->degenerate_along.push_back(2);
  }
  solution_ = std::move(sol);
  return *solution_;
}

GreenPoint FreeProductAnalyzer::green(double r) const {
  const SpectralSolution& sol = classify();
  if (r < 0.0) raise(errc::domain_error, "negative r");
  if (r > sol.R * (1.0 + 1e-12))
    raise(errc::no_convergence, "r beyond the radius of convergence R");
  r = std::min(r, sol.R);
  auto it = green_cache_.find(r);
  if (it != green_cache_.end()) return it->second;

  GreenPoint gp;
  gp.r = r;
  if (r == 0.0) {
    gp.G = ext(1.0);
    gp.dG = ext(alpha_i(1) * f1_->measure().origin_weight +
                alpha_i(2) * f2_->measure().origin_weight);
    // G''(0) = 2 c_2; cheapest through Phi''(0)
    const Extended p2 = phi_second(0.0);
    const Extended p1 = phi_prime(0.0);
    gp.d2G = ext(p2.v + 2.0 * p1.v * p1.v);
    green_cache_.emplace(r, gp);
    return gp;
  }

  // At the radius itself the fixed point is already known from classify().
  if (r == sol.R) {
    gp.G = ext(sol.G_at_R);
    const Extended p1R = phi_prime(sol.theta);
    const double epsR = 1.0 - r * p1R.v;
    if (epsR < 3.0 * tol_.critical_band) {
      gp.dG = ext_inf();
      gp.d2G = ext_inf();
    } else {
      const double dg = sol.G_at_R * p1R.v / epsR;
      gp.dG = ext(dg);
      const Extended p2R = phi_second(sol.theta);
      if (!p2R.finite) {
        gp.d2G = ext_inf();
      } else {
        const double i1 = r * dg + sol.G_at_R;
        gp.d2G = ext((2.0 * dg * p1R.v + i1 * i1 * p2R.v) / epsR);
      }
    }
    green_cache_.emplace(r, gp);
    return gp;
  }

  // Minimal fixed point of g = Phi(r g): h(g) = g - Phi(r g) is increasing and
  // concave on the physical branch, so Newton from g = 1 approaches the root
  // from the left. r g stays below theta the whole way.
  double g = 1.0;
  const double scale = 1.0 + sol.G_at_R;
  bool converged = false;
  for (int iter = 0; iter < 200; ++iter) {
    const double t = r * g;
    const double h = g - phi(t);
    if (std::abs(h) < tol_.fixed_point_tol * scale) {
      converged = true;
      break;
    }
    const double hp = 1.0 - r * phi_prime(t).v;
    double next;
    if (hp > 1e-16) {
      next = g - h / hp;
    } else {
      next = g - h;  // slide along the monotone branch
    }
    if (next <= g) {
      // Newton stalled (critical point); monotone fallback
      next = phi(t);
      if (next <= g) {
        converged = std::abs(h) < 1e4 * tol_.fixed_point_tol * scale;
        break;
      }
    }
    if (r * next > sol.theta) next = sol.theta / r;
    g = next;
  }
  if (!converged) {
    const double resid = std::abs(g - phi(r * g));
    if (resid > 1e-9 * scale)
      raise(errc::no_convergence, "fixed point residual " + std::to_string(resid));
  }
  gp.G = ext(g);

  const double t = r * g;
  const Extended p1 = phi_prime(t);
  const double eps = 1.0 - r * p1.v;
  if (eps < 3.0 * tol_.critical_band) {
    gp.dG = ext_inf();
    gp.d2G = ext_inf();
  } else {
    const double dg = g * p1.v / eps;
    gp.dG = ext(dg);
    const Extended p2 = phi_second(t);
    if (!p2.finite) {
      gp.d2G = ext_inf();
    } else {
      const double i1 = r * dg + g;
      gp.d2G = ext((2.0 * dg * p1.v + i1 * i1 * p2.v) / eps);
    }
  }
  green_cache_.emplace(r, gp);
  return gp;
}

double FreeProductAnalyzer::zeta(int i, double r) const {
  const GreenPoint gp = green(r);
  const double target = alpha_i(i) * r * gp.G.v;
  const double ti = factor(i).theta();
  // Degenerate endpoint: within the same edge tolerance classify() uses, the
  // true value is exactly R_i = 1 and the finiteness flags must see that.
  if (target >= ti - 1e-7 * (1.0 + ti)) return 1.0;
  return factor(i).radius_of_t(target);
}

MomentReport FreeProductAnalyzer::moments(double r) const {
  MomentReport rep;
  const GreenPoint gp = green(r);

  const auto mul = [](const Extended& a, double k) {
    return a.finite ? ext(a.v * k) : ext_inf();
  };
  // I1 = r G' + G ; 2 r I2 = 2 r G + 4 r^2 G' + r^3 G''
  rep.I1 = gp.dG.finite ? ext(r * gp.dG.v + gp.G.v) : ext_inf();
  if (r == 0.0) {
    rep.I2 = ext(1.0);
  } else if (gp.dG.finite && gp.d2G.finite) {
    rep.I2 = ext((2.0 * r * gp.G.v + 4.0 * r * r * gp.dG.v +
                  r * r * r * gp.d2G.v) / (2.0 * r));
  } else {
    rep.I2 = ext_inf();
  }

  Extended* i1g[2] = {&rep.I1G_1, &rep.I1G_2};
  Extended* i2g[2] = {&rep.I2G_1, &rep.I2G_2};
  Extended* i1p[2] = {&rep.I1_1, &rep.I1_2};
  Extended* i2p[2] = {&rep.I2_1, &rep.I2_2};
  double* zs[2] = {&rep.zeta1, &rep.zeta2};
  for (int i = 1; i <= 2; ++i) {
    const double z = zeta(i, r);
    *zs[i - 1] = z;
    const GreenPoint& fg = factor(i).green(z, 2);
    *i1g[i - 1] = fg.dG.finite ? ext(z * fg.dG.v + fg.G.v) : ext_inf();
    if (z == 0.0) {
      *i2g[i - 1] = ext(1.0);
    } else if (fg.dG.finite && fg.d2G.finite) {
      *i2g[i - 1] = ext((2.0 * z * fg.G.v + 4.0 * z * z * fg.dG.v +
                         z * z * z * fg.d2G.v) / (2.0 * z));
    } else {
      *i2g[i - 1] = ext_inf();
    }
    // Factor-to-product correspondence: G(x,y|r) = G(r)/G_i(zeta_i) * G_i(x,y|zeta_i);
    // factor-restricted free-product sums pick up (G/G_i)^{k+1}.
    const double ratio = gp.G.v / fg.G.v;
    *i1p[i - 1] = mul(*i1g[i - 1], ratio * ratio);
    *i2p[i - 1] = mul(*i2g[i - 1], ratio * ratio * ratio);
  }
  rep.J2 = (rep.I2_1.finite && rep.I2_2.finite) ? ext(rep.I2_1.v + rep.I2_2.v)
                                                : ext_inf();
  rep.divergent = !rep.I1.finite;
  rep.spectrally_positive_recurrent = rep.divergent && rep.J2.finite;
  return rep;
}

SpectralSolution classify(const FreeProductConfig& cfg, const Tolerances& tol) {
  return FreeProductAnalyzer(cfg, tol).classify();
}

MomentReport moments_I_J(const FreeProductConfig& cfg, double r, const Tolerances& tol) {
  return FreeProductAnalyzer(cfg, tol).moments(r);
}

AlphaStarResult find_alpha_star(std::shared_ptr<const FactorContext> f1,
                                std::shared_ptr<const FactorContext> f2,
                                const Tolerances& tol) {
  const double theta1 = f1->theta();
  const double theta2 = f2->theta();
  const double alpha_c = theta1 / (theta1 + theta2);

  const auto s = [&](double a) {
    FreeProductAnalyzer an(f1, f2, a, tol);
    return an.psi(an.theta_bar().value);
  };

  const double lo0 = tol.alpha_bracket_delta;
  double hi0 = alpha_c - tol.alpha_bracket_delta;
  if (!(lo0 < hi0))
    raise(errc::bad_config, "alpha bracket collapsed; factors too asymmetric");
  const double s_lo = s(lo0);
  double s_hi = s(hi0);
  // The root can sit arbitrarily close to alpha_c (where Psi(theta_bar)
  // equals Psi_2(theta_2) - 1 < 0); walk the right edge inward until the
  // sign change is captured.
  double delta = tol.alpha_bracket_delta;
  while (s_hi >= 0.0 && delta > 1e-12) {
    delta *= 0.125;
    hi0 = alpha_c - delta;
    s_hi = s(hi0);
  }
  if (!(s_lo > 0.0 && s_hi < 0.0))
    raise(errc::no_sign_change,
          "Psi(theta_bar) does not change sign on the bracket: " +
              std::to_string(s_lo) + " .. " + std::to_string(s_hi));

  // scan for multiple roots; the construction does not promise uniqueness
  constexpr int kScan = 64;
  int count = 0;
  double first_lo = lo0, first_hi = hi0;
  double prev_a = lo0, prev_s = s_lo;
  for (int k = 1; k <= kScan; ++k) {
    const double a = lo0 + (hi0 - lo0) * k / kScan;
    const double v = (k == kScan) ? s_hi : s(a);
    if (prev_s > 0.0 && v <= 0.0) {
      if (count == 0) {
        first_lo = prev_a;
        first_hi = a;
      }
      ++count;
    } else if (prev_s <= 0.0 && v > 0.0) {
      ++count;
    }
    prev_a = a;
    prev_s = v;
  }

  double lo = first_lo, hi = first_hi;
  double mid = 0.5 * (lo + hi), smid = s(mid);
  for (int it = 0; it < 200; ++it) {
    if (std::abs(smid) < tol.alpha_tol || (hi - lo) < 1e-15) break;
    (smid > 0.0 ? lo : hi) = mid;
    mid = 0.5 * (lo + hi);
    smid = s(mid);
  }
  if (std::abs(smid) >= tol.alpha_tol)
    raise(errc::no_convergence,
          "alpha* bisection stalled at |Psi| = " + std::to_string(std::abs(smid)));

  AlphaStarResult res;
  res.alpha_star = mid;
  res.sign_change_count = count;
  res.alpha_c = alpha_c;
  FreeProductAnalyzer an(f1, f2, mid, tol);
  res.solution = an.classify();
  return res;
}

AlphaStarResult find_alpha_star(const FactorMeasure& f1, const FactorMeasure& f2,
                                const Tolerances& tol) {
  GreenOptions go;
  go.tol = tol.quad_tol;
  return find_alpha_star(std::make_shared<FactorContext>(f1, go),
                         std::make_shared<FactorContext>(f2, go), tol);
}

}  // namespace freewalk

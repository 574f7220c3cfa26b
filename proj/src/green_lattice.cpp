#include "freewalk/green_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "freewalk/bessel.hpp"
#include "freewalk/errors.hpp"
#include "freewalk/quadrature.hpp"

namespace freewalk {

namespace {

constexpr double kHalflineSplit = 40.0;

// psi(z) = d/dz [I1/I0](z) = 1 - rho/z - rho^2, with the small-z expansion
// psi = 1/2 - 3 z^2/16 + ...
double ratio_derivative(double z) {
  if (z < 1e-3) {
    const double z2 = z * z;
    return 0.5 - 3.0 * z2 / 16.0 + 5.0 * z2 * z2 / 96.0;
  }
  const double rho = bessel_ratio_i1_i0(z);
  return 1.0 - rho / z - rho * rho;
}

// ---------------------------------------------------------------------------
// Axis (Bessel) route: G^{(k)}(r) = int_0^inf u^k e^{-u(1-r)}
//   prod_j I0~(2 b_j u r) * sigma-terms du.
// ---------------------------------------------------------------------------

struct AxisIntegrands {
  const FactorMeasure* m;
  double r;

  double base(double u) const {
    double p = std::exp(-u * (1.0 - r));
    for (double b : m->axis_weights) p *= besseli0_scaled(2.0 * b * u * r);
    return p;
  }
  double sigma(double u) const {
    double s = m->origin_weight;
    for (double b : m->axis_weights) s += 2.0 * b * bessel_ratio_i1_i0(2.0 * b * u * r);
    return s;
  }
  double sigma_prime(double u) const {
    double s = 0.0;
    for (double b : m->axis_weights) {
      const double tb = 2.0 * b;
      s += tb * tb * ratio_derivative(tb * u * r);
    }
    return s;
  }
};

QuadResult axis_green(const FactorMeasure& m, double r, int order, double tol) {
  AxisIntegrands gi{&m, r};
  if (order == 0)
    return integrate_halfline([&](double u) { return gi.base(u); }, kHalflineSplit, tol);
  if (order == 1)
    return integrate_halfline([&](double u) { return u * gi.base(u) * gi.sigma(u); },
                              kHalflineSplit, tol);
  return integrate_halfline(
      [&](double u) {
        const double s = gi.sigma(u);
        return u * u * gi.base(u) * (s * s + gi.sigma_prime(u));
      },
      kHalflineSplit, tol);
}

// ---------------------------------------------------------------------------
// Generic tensor route over the torus.
// ---------------------------------------------------------------------------

// Jacobi eigenvalue sweep, enough for the tiny covariance matrices here.
void sym_eigen(std::vector<double> a, int d, double& lam_min, double& det) {
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) off += std::abs(a[static_cast<size_t>(p) * d + q]);
    if (off < 1e-15) break;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) {
        const double apq = a[static_cast<size_t>(p) * d + q];
        if (std::abs(apq) < 1e-18) continue;
        const double app = a[static_cast<size_t>(p) * d + p];
        const double aqq = a[static_cast<size_t>(q) * d + q];
        const double phi = 0.5 * std::atan2(2.0 * apq, aqq - app);
        const double c = std::cos(phi), s = std::sin(phi);
        for (int k = 0; k < d; ++k) {
          const double akp = a[static_cast<size_t>(k) * d + p];
          const double akq = a[static_cast<size_t>(k) * d + q];
          a[static_cast<size_t>(k) * d + p] = c * akp - s * akq;
          a[static_cast<size_t>(k) * d + q] = s * akp + c * akq;
        }
        for (int k = 0; k < d; ++k) {
          const double apk = a[static_cast<size_t>(p) * d + k];
          const double aqk = a[static_cast<size_t>(q) * d + k];
          a[static_cast<size_t>(p) * d + k] = c * apk - s * aqk;
          a[static_cast<size_t>(q) * d + k] = s * apk + c * aqk;
        }
      }
  }
  lam_min = a[0];
  det = 1.0;
  for (int k = 0; k < d; ++k) {
    lam_min = std::min(lam_min, a[static_cast<size_t>(k) * d + k]);
    det *= a[static_cast<size_t>(k) * d + k];
  }
}

// int_0^{s0} s^j / (a + s^2) ds for j >= 0, a >= 0 (j >= 2 required if a = 0).
double radial_power_integral(int j, double a, double s0) {
  if (j == 0) {
    if (a <= 0) raise(errc::domain_error, "divergent radial integral");
    const double ra = std::sqrt(a);
    return std::atan(s0 / ra) / ra;
  }
  if (j == 1) {
    if (a <= 0) raise(errc::domain_error, "divergent radial integral");
    return 0.5 * std::log((a + s0 * s0) / a);
  }
  // s^j/(a+s^2) = s^{j-2} - a s^{j-2}/(a+s^2)
  const double lead = std::pow(s0, j - 1) / (j - 1);
  if (a == 0.0) return lead;
  return lead - a * radial_power_integral(j - 2, a, s0);
}

struct SubtractionModel {
  bool active = false;
  double a = 0.0;           // 1 - r
  double q0 = 0.0;          // bump support level
  double closed_form = 0.0; // integral of the bump model over R^d
  std::vector<double> sigma;  // r/2 * covariance
  int d = 0;

  double q(const double* th) const {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      double row = 0.0;
      for (int j = 0; j < d; ++j) row += sigma[static_cast<size_t>(i) * d + j] * th[j];
      s += th[i] * row;
    }
    return s;
  }
  double bump_model(const double* th) const {
    const double qq = q(th);
    if (qq >= q0) return 0.0;
    const double w = 1.0 - qq / q0;
    return w * w / (a + qq);
  }
};

SubtractionModel make_subtraction(const FactorMeasure& m, double r) {
  SubtractionModel s;
  s.d = m.dim;
  s.a = 1.0 - r;
  std::vector<double> sig = covariance(m);
  double lam_min = 0.0, det = 1.0;
  sym_eigen(sig, m.dim, lam_min, det);
  if (lam_min <= 0) return s;  // degenerate covariance; no subtraction
  s.sigma.resize(sig.size());
  for (size_t i = 0; i < sig.size(); ++i) s.sigma[i] = 0.5 * r * sig[i];
  s.q0 = 0.81 * 0.5 * r * lam_min * M_PI * M_PI;
  const double s0 = std::sqrt(s.q0);
  const int d = m.dim;
  const double detfac = std::pow(0.5 * r, -0.5 * d) / std::sqrt(det);
  const double surface = 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
  const double i0 = radial_power_integral(d - 1, s.a, s0);
  const double i1 = radial_power_integral(d + 1, s.a, s0);
  const double i2 = radial_power_integral(d + 3, s.a, s0);
  s.closed_form = detfac * surface * (i0 - 2.0 * i1 / s.q0 + i2 / (s.q0 * s.q0));
  s.active = true;
  return s;
}

QuadResult tensor_green(const FactorMeasure& m, double r, int order,
                        const GreenOptions& opt) {
  const int d = m.dim;
  const double norm = std::pow(2.0 * M_PI, -d);
  SubtractionModel sub;
  if (order == 0 && (1.0 - r) < 0.05 && d >= 3) sub = make_subtraction(m, r);

  const auto weight = [&](const double* th) {
    const double phi = char_function(m, std::span<const double>(th, static_cast<size_t>(d)));
    const double den = 1.0 - r * phi;
    switch (order) {
      case 0: return 1.0 / den;
      case 1: return phi / (den * den);
      default: return 2.0 * phi * phi / (den * den * den);
    }
  };

  QuadResult q;
  if (sub.active) {
    q = integrate_torus_even(
        [&](const double* th) { return weight(th) - sub.bump_model(th); }, d,
        opt.tensor_tol / norm, opt.tensor_budget);
    q.value += sub.closed_form;
  } else {
    q = integrate_torus_even(weight, d, opt.tensor_tol / norm, opt.tensor_budget);
  }
  q.value *= norm;
  q.abserr *= norm;
  if (q.abserr > 100.0 * opt.tensor_tol)
    raise(errc::quadrature_not_converged,
          "tensor quadrature error " + std::to_string(q.abserr));
  return q;
}

bool derivative_finite(int d, double r, int order) {
  if (r < 1.0) return true;
  switch (order) {
    case 0: return d >= 3;
    case 1: return d >= 5;
    default: return d >= 7;
  }
}

}  // namespace

GreenPoint green_eval(const FactorMeasure& m, double r, const GreenOptions& opt) {
  if (r < 0.0 || r > 1.0 + 1e-12) raise(errc::domain_error, "r outside [0, 1]");
  r = std::min(r, 1.0);
  GreenPoint gp;
  gp.r = r;
  const bool axis = m.axis_affine && !opt.force_tensor;
  Extended* slots[3] = {&gp.G, &gp.dG, &gp.d2G};
  for (int order = 0; order <= std::min(opt.max_order, 2); ++order) {
    if (!derivative_finite(m.dim, r, order)) {
      *slots[order] = ext_inf();
      continue;
    }
    const QuadResult q = axis ? axis_green(m, r, order, opt.tol)
                              : tensor_green(m, r, order, opt);
    *slots[order] = ext(q.value);
    gp.acc += q.abserr;
  }
  return gp;
}

double theta_of_factor(const FactorMeasure& m, const GreenOptions& opt) {
  if (m.dim <= 2)
    raise(errc::infinite_theta, "recurrent walk: G(1) diverges for d <= 2");
  GreenOptions o = opt;
  o.max_order = 0;
  return green_eval(m, 1.0, o).G.v;
}

SingularLawReport factor_singular_constants(const FactorMeasure& m,
                                            const SingularFitOptions& opt,
                                            const GreenOptions& gopt) {
  if (m.dim < 3 || m.dim > 6)
    raise(errc::domain_error, "singular-law grid needs d in {3,4,5,6}");
  if (!m.aperiodic)
    raise(errc::domain_error, "singular-law grid needs an aperiodic measure");
  SingularLawReport rep;
  rep.deriv_order = (m.dim <= 4) ? 1 : 2;
  rep.log_law = (m.dim % 2 == 0);
  if (rep.deriv_order == 1)
    rep.law = rep.log_law ? "G' ~ -C log(1-t)" : "G' ~ C (1-t)^{-1/2}";
  else
    rep.law = rep.log_law ? "G'' ~ -C log(1-t)" : "G'' ~ C (1-t)^{-1/2}";

  GreenOptions go = gopt;
  go.max_order = rep.deriv_order;
  for (int k = opt.k_min; k <= opt.k_max; ++k) {
    const double eps = std::ldexp(1.0, -k);
    const double t = 1.0 - eps;
    const GreenPoint gp = green_eval(m, t, go);
    const double raw = (rep.deriv_order == 1) ? gp.dG.v : gp.d2G.v;
    const double normalized = rep.log_law ? raw / (-std::log(eps)) : raw * std::sqrt(eps);
    rep.grid_one_minus_t.push_back(eps);
    rep.grid_normalized.push_back(normalized);
  }
  // final decade = last ~3.3 grid doublings
  const size_t n = rep.grid_normalized.size();
  const size_t w = std::min<size_t>(4, n);
  double lo = rep.grid_normalized[n - w], hi = lo;
  for (size_t i = n - w; i < n; ++i) {
    lo = std::min(lo, rep.grid_normalized[i]);
    hi = std::max(hi, rep.grid_normalized[i]);
  }
  rep.constant = rep.grid_normalized.back();
  rep.drift = (hi - lo) / std::abs(rep.constant);
  if (rep.drift > opt.max_drift)
    raise(errc::fit_unstable,
          "normalized singular law drifts " + std::to_string(rep.drift * 100.0) +
              "% over the last decade");
  return rep;
}

}  // namespace freewalk

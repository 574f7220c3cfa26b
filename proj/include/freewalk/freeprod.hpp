#pragma once

#include <memory>
#include <vector>

#include "freewalk/phi_psi.hpp"

namespace freewalk {

// mu_alpha = alpha mu_1 + (1 - alpha) mu_2 on the free product Gamma_1 * Gamma_2.
struct FreeProductConfig {
  FactorMeasure factor1;
  FactorMeasure factor2;
  double alpha = 0.5;
};

enum class Classification {
  NonDegenerateDivergent,
  DegenerateDivergent,
  DegenerateConvergent,
};

const char* to_string(Classification c) noexcept;

struct ThetaBarInfo {
  double value = 0.0;
  double alpha_c = 0.0;   // crossover theta_1/alpha = theta_2/(1-alpha)
  int argmin_factor = 0;  // 1 or 2 (1 on the exact tie)
};

struct SpectralSolution {
  double theta = 0.0;
  double theta_bar = 0.0;
  double alpha_c = 0.0;
  double R = 0.0;
  double G_at_R = 0.0;
  double zeta1_at_R = 0.0;
  double zeta2_at_R = 0.0;
  double psi_at_theta_bar = 0.0;
  Classification classification = Classification::NonDegenerateDivergent;
  std::vector<int> degenerate_along;  // subset of {1, 2}
};

struct MomentReport {
  Extended I1, I2;          // free-product moment sums
  Extended I1_1, I1_2;      // factor-restricted first moments
  Extended I2_1, I2_2;      // factor-restricted second moments
  Extended J2;              // I2_1 + I2_2
  Extended I1G_1, I1G_2;    // factor-Green versions at zeta_i(r)
  Extended I2G_1, I2G_2;
  double zeta1 = 0.0, zeta2 = 0.0;
  bool divergent = false;
  bool spectrally_positive_recurrent = false;
};

struct Tolerances {
  double quad_tol = 1e-12;        // factor quadrature target
  double critical_band = 1e-9;    // |Psi(theta_bar)| band for criticality
  double fixed_point_tol = 5e-14; // free-product Green solve residual
  double alpha_tol = 1e-10;       // |Psi(theta_bar)| at alpha*
  double alpha_bracket_delta = 0.01;
};

// Evaluation context for one (factor1, factor2, alpha) configuration.
// Caches factor Green data; all methods are deterministic.
class FreeProductAnalyzer {
 public:
  FreeProductAnalyzer(FreeProductConfig cfg, Tolerances tol = {});
  FreeProductAnalyzer(std::shared_ptr<const FactorContext> f1,
                      std::shared_ptr<const FactorContext> f2, double alpha,
                      Tolerances tol = {});

  double alpha() const { return alpha_; }
  double alpha_i(int i) const { return i == 1 ? alpha_ : 1.0 - alpha_; }
  const FactorContext& factor(int i) const { return i == 1 ? *f1_ : *f2_; }
  const Tolerances& tolerances() const { return tol_; }

  ThetaBarInfo theta_bar() const;

  // Implicit first-visit functions of the free product, combined factor-wise.
  double phi(double t) const;
  Extended phi_prime(double t) const;
  Extended phi_second(double t) const;
  double psi(double t) const;

  const SpectralSolution& classify() const;

  // Free-product Green function at 0 <= r <= R: minimal fixed point of
  // g = Phi(r g), derivatives by implicit differentiation.
  GreenPoint green(double r) const;

  // zeta_i(r) from zeta_i G_i(zeta_i) = alpha_i r G(r).
  double zeta(int i, double r) const;

  MomentReport moments(double r) const;

 private:
  std::shared_ptr<const FactorContext> f1_, f2_;
  double alpha_;
  Tolerances tol_;
  mutable std::shared_ptr<SpectralSolution> solution_;
  mutable std::map<double, GreenPoint> green_cache_;
};

SpectralSolution classify(const FreeProductConfig& cfg, const Tolerances& tol = {});
MomentReport moments_I_J(const FreeProductConfig& cfg, double r, const Tolerances& tol = {});

struct AlphaStarResult {
  double alpha_star = 0.0;
  int sign_change_count = 0;
  double alpha_c = 0.0;
  SpectralSolution solution;
};

// Bisection for the critical mixing weight on (delta, alpha_c - delta).
// Verifies the sign change, reports the number of sign changes seen on a
// scan grid, and returns the smallest root.
AlphaStarResult find_alpha_star(const FactorMeasure& f1, const FactorMeasure& f2,
                                const Tolerances& tol = {});
AlphaStarResult find_alpha_star(std::shared_ptr<const FactorContext> f1,
                                std::shared_ptr<const FactorContext> f2,
                                const Tolerances& tol = {});

}  // namespace freewalk

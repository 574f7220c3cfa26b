#pragma once

#include <string>
#include <vector>

#include "freewalk/conv_series.hpp"
#include "freewalk/freeprod.hpp"

namespace freewalk {

// One row of the approach-to-R grid at a critical configuration.
struct ProfileRow {
  int k = 0;             // R - r = R 2^{-k}
  double r = 0.0;
  double gap = 0.0;      // R - r
  double G = 0.0;
  double dG = 0.0;
  double d2G = 0.0;      // implicit-route proxy, divergent at R
  double G_gap = 0.0;    // G(R) - G(r)
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double one_minus_zeta2 = 0.0;
  double i1_2 = 0.0;     // factor-restricted first moment (free-product form)
  double i1_G2 = 0.0;    // factor-Green first moment at zeta_2(r)
  double i2_2 = 0.0;     // factor-restricted second moment
  double g2z = 0.0;      // G_2(zeta_2(r))
  double dg2z = 0.0;     // G_2'(zeta_2(r))
  double d2g1z = 0.0;    // G_1''(zeta_1(r))
  double d2g2z = 0.0;    // G_2''(zeta_2(r))
};

// Self-contained snapshot: the law checkers are pure functions of this
// record, which keeps them testable on synthetic data.
struct SingularProfile {
  double R = 0.0;
  double G_at_R = 0.0;
  double alpha = 0.0;
  int factor2_dim = 0;
  double zeta1_at_R = 0.0;
  double g1_at_zeta1R = 0.0;   // G_1(zeta_1(R))
  double dg1_at_zeta1R = 0.0;  // G_1'(zeta_1(R))
  double g2_at_1 = 0.0;        // G_2(1)
  double dg2_at_1 = 0.0;       // G_2'(1)
  std::vector<ProfileRow> rows;
};

struct ProfileOptions {
  int k_min = 4;
  int k_max = 22;
};

// Geometric grid R - r = R 2^{-k} at a spectrally degenerate divergent
// configuration; refuses other classifications.
SingularProfile build_profile(const FreeProductAnalyzer& an, const ProfileOptions& opt = {});

struct FitReport {
  std::string model;
  double exponent_a = 0.0;    // fitted power
  double exponent_b = 0.0;    // log-power when applicable
  double constant = 0.0;
  double residual = 0.0;      // rms of log-residuals
  double drift = 0.0;         // relative span over the final decade
  bool pass = false;
  std::string detail;
};

// Ratio-stabilization checks of the asymptotic laws along the profile.
// Each report divides the left side by the right side and measures the drift
// of the ratio over the final decade of the grid.
struct RatioLawOptions {
  double drift_threshold = 0.20;
};

std::vector<FitReport> check_ratio_laws(const SingularProfile& p,
                                        const RatioLawOptions& opt = {});

// Least-squares singular-law identification for G'(r):
// candidate models (R-r)^{-1/2}, (R-r)^{-1/3}, (-(R-r) log(R-r))^{-1/2},
// plus the free-exponent fit G' ~ c (R-r)^{-a}.
struct GreenFitOptions {
  int fit_rows = 12;  // trailing rows used for the fits
};

struct GreenSingularityFit {
  std::vector<FitReport> models;  // one per candidate, residual-ranked order kept
  std::string best_model;
  double free_exponent = 0.0;
  double residual_ratio_second_to_best = 0.0;
};

GreenSingularityFit fit_green_singularity(const SingularProfile& p,
                                          const GreenFitOptions& opt = {});

// Second-order chain: the bracket law G'' ~ C (G')^3 (c1 G_1'' + c2 G_2'' - C')
// and the mixed ratio G''/(G')^2 ~ C d/dr(r^2 I_2^{(1)}). Closed-form
// constants evaluated at R are compared against the fitted plateaus.
struct SecondOrderReport {
  FitReport second_derivative_law;  // fitted C vs the closed form R^3/G(R)
  FitReport derivative_ratio_law;   // drift of the mixed-derivative ratio
  double c1_closed = 0.0, c2_closed = 0.0, Cprime_closed = 0.0;
  double special_constant_closed = 0.0;
};

SecondOrderReport check_second_order_chain(const SingularProfile& p,
                                           double drift_threshold = 0.25,
                                           double constant_band = 0.30);

// Tauberian window fit of log(c_n R^n) = log C - a log n - b log log n for
// b in {0, 1/2} and free (a, b); model preference by residual.
struct TauberianOptions {
  double window_fraction = 0.5;  // trailing fraction of the series
};

struct TauberianReport {
  FitReport fixed_b0;      // b = 0
  FitReport fixed_bhalf;   // b = 1/2
  FitReport free_fit;      // both exponents free
  std::string preferred;   // "b=0" or "b=1/2"
  bool window_stable = false;  // half-window refit moved a less than its error
};

TauberianReport tauberian_fit(const CoefficientSeries& c, double R,
                              const TauberianOptions& opt = {});

}  // namespace freewalk

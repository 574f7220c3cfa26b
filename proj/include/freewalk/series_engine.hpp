#pragma once

#include <gmpxx.h>

#include <vector>

#include "freewalk/conv_series.hpp"
#include "freewalk/freeprod.hpp"

namespace freewalk {

struct SeriesEngineOptions {
  int rational_cap = 300;
  SeriesOptions conv;
};

// Factor return series as a plain power series (wraps return_series).
CoefficientSeries series_from_factor(const FactorMeasure& m, int N,
                                     const SeriesEngineOptions& opt = {});

// Phi_i as a truncated series in t: reversion of w = z G_i(z) composed with
// G_i. Exact in rational mode, order capped by rational_cap.
std::vector<double> phi_series(const FactorMeasure& m, int N,
                               const SeriesEngineOptions& opt = {});
std::vector<mpq_class> phi_series_exact(const FactorMeasure& m, int N,
                                        const SeriesEngineOptions& opt = {});

// Coefficients c_n = mu_alpha^{*n}(e) of the free product: combined Phi via
// the alpha-scaled factor series, then Newton on g = Phi(z g) with doubling
// truncation order.
CoefficientSeries green_series_freeprod(const FreeProductConfig& cfg, int N,
                                        const SeriesEngineOptions& opt = {});
std::vector<mpq_class> green_series_freeprod_exact(const FreeProductConfig& cfg,
                                                   int N,
                                                   const SeriesEngineOptions& opt = {});

struct QnSequence {
  std::vector<double> q;  // q~_n = c_n R^n
  int burn_in = 0;
  int monotone_violations = 0;  // increases after the burn-in
  bool eventually_monotone = true;
};

// Diagnostic rescaled sequence q~_n = c_n R^n; the exact q_n of the Tauberian
// argument differs by an exponentially small term.
QnSequence qn_sequence(const CoefficientSeries& c, double R, int burn_in = 32);

}  // namespace freewalk

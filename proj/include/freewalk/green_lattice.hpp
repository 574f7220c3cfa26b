#pragma once

#include <limits>
#include <string>
#include <vector>

#include "freewalk/factor_measure.hpp"

namespace freewalk {

// A real value that may carry a +infinity flag.
struct Extended {
  double v = 0.0;
  bool finite = true;
};

inline Extended ext_inf() { return {std::numeric_limits<double>::infinity(), false}; }
inline Extended ext(double v) { return {v, true}; }

// (r, G(r), G'(r), G''(r)) with finiteness flags and an accuracy estimate.
struct GreenPoint {
  double r = 0.0;
  Extended G;
  Extended dG;
  Extended d2G;
  double acc = 0.0;
};

struct GreenOptions {
  double tol = 1e-12;           // Bessel-route absolute tolerance per integral
  double tensor_tol = 1e-9;     // tensor-route target
  long tensor_budget = 40000000;
  bool force_tensor = false;    // exercise the generic path on axis measures
  int max_order = 2;            // highest derivative to compute
};

// Green function of the factor walk and its first two derivatives at
// 0 <= r <= 1, via the torus integrals. At r = 1 the classical finiteness
// rules apply: G finite iff d >= 3, G' iff d >= 5, G'' iff d >= 7; divergent
// entries come back flagged infinite instead of being integrated.
GreenPoint green_eval(const FactorMeasure& m, double r, const GreenOptions& opt = {});

// theta_i = R_i G_i(R_i) = G_i(1). Throws InfiniteTheta for d <= 2.
double theta_of_factor(const FactorMeasure& m, const GreenOptions& opt = {});

struct SingularLawReport {
  std::string law;      // human-readable law identifier
  int deriv_order = 0;  // 1 for G', 2 for G''
  bool log_law = false;
  double constant = 0.0;
  double drift = 0.0;   // relative spread over the last decade of the grid
  std::vector<double> grid_one_minus_t;
  std::vector<double> grid_normalized;
};

struct SingularFitOptions {
  int k_min = 4;
  int k_max = 18;
  double max_drift = 0.10;
};

// Estimates the constant in the leading singular law of the lowest-order
// divergent derivative on the geometric grid t = 1 - 2^{-k}.
// d in {3,4}: G'(t); d in {5,6}: G''(t). Square-root law for odd d, log law
// for even d. Throws FitUnstable when the normalized values keep drifting.
SingularLawReport factor_singular_constants(const FactorMeasure& m,
                                            const SingularFitOptions& opt = {},
                                            const GreenOptions& gopt = {});

}  // namespace freewalk

#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <vector>

#include "freewalk/factor_measure.hpp"

namespace freewalk {

// Truncated sequence of return probabilities (or generic nonnegative
// power-series coefficients).
struct CoefficientSeries {
  std::vector<double> c;         // c[0..N]
  double radius_hint = 1.0;
  int order() const { return static_cast<int>(c.size()) - 1; }
};

struct SeriesOptions {
  std::size_t memory_cap_bytes = 2ull << 30;  // convolution box cap
  bool force_box = false;  // disable the axis fast path (testing)
};

// c_n = mu^{*n}(0), exact up to float rounding. Axis-supported measures go
// through an exact binomial recursion; anything else through dense box
// convolution with the halfway symmetry trick, so only mu^{*m} for
// m <= ceil(N/2) is ever materialized.
CoefficientSeries return_series(const FactorMeasure& m, int N,
                                const SeriesOptions& opt = {});

// Exact-rational version of the same coefficients. The box route allocates
// (2L+1)^d rationals, so keep N modest; the axis route is cheap.
std::vector<mpq_class> return_series_exact(const FactorMeasure& m, int N,
                                           const SeriesOptions& opt = {});

}  // namespace freewalk

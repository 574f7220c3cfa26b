#include "freewalk/bessel.hpp"

#include <cmath>

namespace freewalk {

namespace {

constexpr double kCrossover = 21.0;

// I_0(x) = sum_m (x/2)^{2m} / (m!)^2, then scale by e^{-x}.
double i0_series_scaled(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int m = 1; m < 120; ++m) {
    term *= q / (static_cast<double>(m) * m);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum * std::exp(-x);
}

// I_1(x) = (x/2) sum_m (x/2)^{2m} / (m! (m+1)!), scaled by e^{-x}.
double i1_series_scaled(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int m = 1; m < 120; ++m) {
    term *= q / (static_cast<double>(m) * (m + 1.0));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return 0.5 * x * sum * std::exp(-x);
}

// e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum_k a_k(nu) / x^k with
// a_k(nu) = prod_{j=1..k} -(4 nu^2 - (2j-1)^2) / (8 j).
// Truncated at the smallest term; error ~ e^{-2x} relative.
double i_asymptotic_scaled(double x, double mu /* = 4 nu^2 */) {
  double sum = 1.0, term = 1.0;
  double prev = 1e300;
  for (int k = 1; k < 60; ++k) {
    const double num = mu - (2.0 * k - 1.0) * (2.0 * k - 1.0);
    term *= -num / (8.0 * k * x);
    if (std::abs(term) >= prev) break;  // divergence onset
    sum += term;
    prev = std::abs(term);
    if (prev < 1e-17) break;
  }
  return sum / std::sqrt(2.0 * M_PI * x);
}

}  // namespace

double besseli0_scaled(double x) {
  if (x < 0) x = -x;
  if (x <= kCrossover) return i0_series_scaled(x);
  return i_asymptotic_scaled(x, 0.0);
}

double besseli1_scaled(double x) {
  const bool neg = x < 0;
  if (neg) x = -x;
  const double v = (x <= kCrossover) ? i1_series_scaled(x) : i_asymptotic_scaled(x, 4.0);
  return neg ? -v : v;
}

double bessel_ratio_i1_i0(double x) {
  if (x == 0.0) return 0.0;
  return besseli1_scaled(x) / besseli0_scaled(x);
}

}  // namespace freewalk

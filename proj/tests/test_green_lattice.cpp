#include <doctest.h>

#include <cmath>

#include "freewalk/conv_series.hpp"
#include "freewalk/errors.hpp"
#include "freewalk/green_lattice.hpp"

using namespace freewalk;

namespace {

// Watson's closed form for the SRW Green function on Z^3 at r = 1:
// G = (sqrt(6)/(32 pi^3)) Gamma(1/24) Gamma(5/24) Gamma(7/24) Gamma(11/24).
double watson_value() {
  const double lg = std::lgamma(1.0 / 24) + std::lgamma(5.0 / 24) +
                    std::lgamma(7.0 / 24) + std::lgamma(11.0 / 24);
  return std::sqrt(6.0) / (32.0 * M_PI * M_PI * M_PI) * std::exp(lg);
}

double series_sum(const CoefficientSeries& s, double r, int deriv = 0) {
  double acc = 0.0;
  for (int n = s.order(); n >= 0; --n) {
    const double c = s.c[static_cast<size_t>(n)];
    if (deriv == 0)
      acc = acc * 1.0 + c * std::pow(r, n);
    else if (deriv == 1 && n >= 1)
      acc += n * c * std::pow(r, n - 1);
    else if (deriv == 2 && n >= 2)
      acc += static_cast<double>(n) * (n - 1) * c * std::pow(r, n - 2);
  }
  return acc;
}

}  // namespace

TEST_SUITE("green_lattice") {
  TEST_CASE("r = 0 gives the series head: G = 1, G' = mu(0), G'' = 2 c_2") {
    for (int d : {3, 5, 6}) {
      const FactorMeasure m = lazy_srw(d);
      const GreenPoint gp = green_eval(m, 0.0);
      CHECK(gp.G.v == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(gp.dG.v == doctest::Approx(m.origin_weight).epsilon(1e-12));
      const CoefficientSeries s = return_series(m, 2);
      CHECK(gp.d2G.v == doctest::Approx(2.0 * s.c[2]).epsilon(1e-11));
    }
  }

  TEST_CASE("SRW on Z^3 at r = 1 matches the Watson closed form") {
    const GreenPoint gp = green_eval(srw(3), 1.0);
    CHECK(gp.G.v == doctest::Approx(watson_value()).epsilon(1e-10));
    CHECK(gp.G.v == doctest::Approx(1.5163860591519780).epsilon(1e-10));
    CHECK_FALSE(gp.dG.finite);
    CHECK_FALSE(gp.d2G.finite);
  }

  TEST_CASE("lazy walk doubles the SRW value via the holding-time identity") {
    const GreenPoint gp = green_eval(lazy_srw(3), 1.0);
    CHECK(gp.G.v == doctest::Approx(2.0 * watson_value()).epsilon(1e-10));
    // interior identity G_lazy(r) = G_srw(r/(2-r)) / (1 - r/2)
    for (double r : {0.3, 0.7, 0.95}) {
      const double lhs = green_eval(lazy_srw(3), r).G.v;
      const double rhs = green_eval(srw(3), r / (2.0 - r)).G.v / (1.0 - 0.5 * r);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }

  TEST_CASE("green value equals the coefficient series inside the disk") {
    for (int d : {3, 5}) {
      const FactorMeasure m = lazy_srw(d);
      const CoefficientSeries s = return_series(m, 700);
      for (double r : {0.2, 0.5, 0.8}) {
        // tail bound c_N r^N / (1-r) far below 1e-10 at N = 700
        const GreenPoint gp = green_eval(m, r);
        CHECK(gp.G.v == doctest::Approx(series_sum(s, r)).epsilon(1e-9));
        CHECK(gp.dG.v == doctest::Approx(series_sum(s, r, 1)).epsilon(1e-9));
        CHECK(gp.d2G.v == doctest::Approx(series_sum(s, r, 2)).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("finite-difference of G matches quadrature G'") {
    const FactorMeasure m = lazy_srw(5);
    const double r = 0.85, h = 1e-4;
    const double fd = (green_eval(m, r + h).G.v - green_eval(m, r - h).G.v) / (2 * h);
    CHECK(green_eval(m, r).dG.v == doctest::Approx(fd).epsilon(1e-7));
  }

  TEST_CASE("finiteness flags at r = 1 follow the dimension rules") {
    const GreenPoint g5 = green_eval(lazy_srw(5), 1.0);
    CHECK(g5.G.finite);
    CHECK(g5.dG.finite);
    CHECK_FALSE(g5.d2G.finite);
    const GreenPoint g6 = green_eval(lazy_srw(6), 1.0);
    CHECK(g6.dG.finite);
    CHECK_FALSE(g6.d2G.finite);
  }

  TEST_CASE("monotone in r across a profile") {
    const FactorMeasure m = lazy_srw(5);
    double prevG = 0.0, prevD = 0.0;
    for (double r : {0.0, 0.25, 0.5, 0.75, 0.9, 1.0}) {
      const GreenPoint gp = green_eval(m, r);
      CHECK(gp.G.v >= 1.0);
      CHECK(gp.G.v >= prevG);
      CHECK(gp.dG.v >= prevD);
      prevG = gp.G.v;
      prevD = gp.dG.v;
    }
  }

  TEST_CASE("tensor route agrees with the Bessel route") {
    GreenOptions tensor;
    tensor.force_tensor = true;
    tensor.tensor_tol = 1e-9;
    const FactorMeasure m = lazy_srw(3);
    for (double r : {0.5, 0.97}) {
      const GreenPoint a = green_eval(m, r);
      const GreenPoint b = green_eval(m, r, tensor);
      CHECK(b.G.v == doctest::Approx(a.G.v).epsilon(1e-7));
      CHECK(b.dG.v == doctest::Approx(a.dG.v).epsilon(1e-6));
    }
    // singular endpoint, subtraction engaged
    const GreenPoint a1 = green_eval(m, 1.0);
    GreenOptions t1 = tensor;
    t1.max_order = 0;
    const GreenPoint b1 = green_eval(m, 1.0, t1);
    CHECK(b1.G.v == doctest::Approx(a1.G.v).epsilon(5e-6));
  }

  TEST_CASE("theta of factor and the d <= 2 guard") {
    CHECK(theta_of_factor(srw(3)) == doctest::Approx(1.5163860591519780).epsilon(1e-9));
    CHECK(theta_of_factor(lazy_srw(3)) == doctest::Approx(3.0327721183039561).epsilon(1e-9));
    CHECK_THROWS_AS(theta_of_factor(lazy_srw(2)), Error);
  }

  TEST_CASE("domain guard") {
    CHECK_THROWS_AS(green_eval(lazy_srw(3), 1.5), Error);
    CHECK_THROWS_AS(green_eval(lazy_srw(3), -0.1), Error);
  }
}

TEST_SUITE("singular_constants") {
  // Aperiodic lattice LLT: c_n ~ (pi n / d)^{-d/2} for the lazy walk, so the
  // normalized singular constants have Karamata closed forms.
  TEST_CASE("d = 3: G' ~ C (1-t)^{-1/2} with C = (3/pi)^{3/2} sqrt(pi)") {
    const auto rep = factor_singular_constants(lazy_srw(3));
    CHECK(rep.deriv_order == 1);
    CHECK_FALSE(rep.log_law);
    const double expect = std::pow(3.0 / M_PI, 1.5) * std::sqrt(M_PI);
    CHECK(rep.constant == doctest::Approx(expect).epsilon(0.08));
  }

  TEST_CASE("d = 5: G'' ~ C (1-t)^{-1/2}") {
    const auto rep = factor_singular_constants(lazy_srw(5));
    CHECK(rep.deriv_order == 2);
    CHECK_FALSE(rep.log_law);
    const double expect = std::pow(5.0 / M_PI, 2.5) * std::sqrt(M_PI);
    CHECK(rep.constant == doctest::Approx(expect).epsilon(0.08));
  }

  TEST_CASE("d = 6: G'' ~ -C log(1-t)") {
    const auto rep = factor_singular_constants(lazy_srw(6));
    CHECK(rep.deriv_order == 2);
    CHECK(rep.log_law);
    const double expect = std::pow(6.0 / M_PI, 3.0);
    CHECK(rep.constant == doctest::Approx(expect).epsilon(0.15));
  }

  TEST_CASE("periodic measure is refused") {
    CHECK_THROWS_AS(factor_singular_constants(srw(5)), Error);
  }
}

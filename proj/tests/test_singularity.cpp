#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "freewalk/errors.hpp"
#include "freewalk/singularity.hpp"

using namespace freewalk;

namespace {

double hash_noise(std::uint64_t n) {  // deterministic in [-1, 1]
  std::uint64_t z = (n + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return 2.0 * (static_cast<double>(z >> 11) * 0x1.0p-53) - 1.0;
}

// exact d = 5 laws with clean constants
SingularProfile synthetic_profile(double scale_dG = 1.0, bool with_noise = false) {
  SingularProfile p;
  p.R = 1.2;
  p.G_at_R = 3.0;
  p.alpha = 0.33;
  p.factor2_dim = 5;
  p.zeta1_at_R = 0.8;
  p.g1_at_zeta1R = 1.4;
  p.dg1_at_zeta1R = 0.9;
  p.g2_at_1 = 2.3;
  p.dg2_at_1 = 1.7;
  const double C5 = (p.dg2_at_1 + p.g2_at_1) / ((1.0 - p.alpha) * p.R);
  const double Cg = 0.35, C8 = 0.8, C4 = 1.1;
  for (int k = 4; k <= 20; ++k) {
    ProfileRow row;
    row.k = k;
    row.gap = std::ldexp(p.R, -k);
    row.r = p.R - row.gap;
    row.G_gap = Cg * std::pow(row.gap, 2.0 / 3.0);
    row.G = p.G_at_R - row.G_gap;
    const double noise = with_noise ? 1.0 + 0.01 * hash_noise(static_cast<std::uint64_t>(k)) : 1.0;
    row.dG = scale_dG * noise / (C8 * std::sqrt(row.G_gap));
    row.one_minus_zeta2 = row.G_gap / C5;
    row.zeta2 = 1.0 - row.one_minus_zeta2;
    row.g2z = p.g2_at_1 - p.dg2_at_1 * row.one_minus_zeta2;
    row.dg2z = p.dg2_at_1;
    row.i1_G2 = (p.dg2_at_1 + p.g2_at_1) - C4 * std::sqrt(row.one_minus_zeta2);
    row.d2g2z = 5.6 / std::sqrt(row.one_minus_zeta2);
    row.d2G = 2.2 * row.dG * row.dG * row.dG * row.d2g2z;
    row.d2g1z = 1.0;
    row.i1_2 = 1.0;
    row.i2_2 = 1.0;
    p.rows.push_back(row);
  }
  return p;
}

}  // namespace

TEST_SUITE("singularity_synthetic") {
  TEST_CASE("ratio-law checker is exact on its own laws") {
    const SingularProfile p = synthetic_profile();
    const auto reports = check_ratio_laws(p);
    REQUIRE(reports.size() == 5);
    // zeta-gap plateau at 1/G2'(1)
    CHECK(reports[0].pass);
    CHECK(reports[0].drift < 1e-9);
    CHECK(reports[0].constant == doctest::Approx(1.0 / p.dg2_at_1).epsilon(1e-12));
    // comparisonGG2 plateau at the closed form
    CHECK(reports[1].pass);
    CHECK(reports[1].constant == doctest::Approx(reports[1].exponent_a).epsilon(1e-12));
    // moment difference and differential laws
    CHECK(reports[2].pass);
    CHECK(reports[2].drift < 1e-9);
    CHECK(reports[3].pass);
    CHECK(reports[3].constant == doctest::Approx(0.8).epsilon(1e-10));
    // gap ratio decreases
    CHECK(reports[4].pass);
  }

  TEST_CASE("green-singularity fit recovers the cube-root law under 1% noise") {
    const SingularProfile p = synthetic_profile(1.0, true);
    const auto fit = fit_green_singularity(p);
    CHECK(fit.best_model == "(R-r)^{-1/3}");
    CHECK(fit.free_exponent == doctest::Approx(1.0 / 3.0).epsilon(0.03));
    CHECK(std::abs(fit.free_exponent - 1.0 / 3.0) < 0.01);
    CHECK(fit.residual_ratio_second_to_best > 2.0);
  }

  TEST_CASE("model selection is scale invariant") {
    const auto f1 = fit_green_singularity(synthetic_profile(1.0, true));
    const auto f2 = fit_green_singularity(synthetic_profile(7.0, true));
    CHECK(f1.best_model == f2.best_model);
    CHECK(f1.free_exponent == doctest::Approx(f2.free_exponent).epsilon(1e-12));
    // the fitted constant scales, the selection does not
    CHECK(f2.models[1].constant == doctest::Approx(7.0 * f1.models[1].constant).epsilon(1e-10));
  }

  TEST_CASE("second-order chain on a synthetic bracket law") {
    SingularProfile p = synthetic_profile();
    // construct d2G from the bracket law with its closed constants
    const double a1 = p.alpha, a2 = 1.0 - p.alpha;
    const double den1 = p.zeta1_at_R * p.dg1_at_zeta1R + p.g1_at_zeta1R;
    const double den2 = p.dg2_at_1 + p.g2_at_1;
    const double c1 = a1 * a1 * p.g1_at_zeta1R / (den1 * den1 * den1);
    const double c2 = a2 * a2 * p.g2_at_1 / (den2 * den2 * den2);
    const double Cp = 2.0 * a1 * a1 * p.dg1_at_zeta1R * p.dg1_at_zeta1R / (den1 * den1 * den1) +
                      2.0 * a2 * a2 * p.dg2_at_1 * p.dg2_at_1 / (den2 * den2 * den2);
    const double closed = p.R * p.R * p.R / p.G_at_R;
    for (ProfileRow& row : p.rows)
      row.d2G = closed * row.dG * row.dG * row.dG *
                (c1 * row.d2g1z + c2 * row.d2g2z - Cp);
    const auto rep = check_second_order_chain(p);
    CHECK(rep.second_derivative_law.pass);
    CHECK(rep.second_derivative_law.drift < 1e-9);
    CHECK(rep.c2_closed == doctest::Approx(c2).epsilon(1e-12));
  }

  TEST_CASE("profile guards") {
    SingularProfile p = synthetic_profile();
    p.rows.resize(3);
    CHECK_THROWS_AS(check_ratio_laws(p), Error);
    CHECK_THROWS_AS(fit_green_singularity(p), Error);
  }
}

TEST_SUITE("tauberian") {
  namespace {
  CoefficientSeries synth_series(int N, double R, double a, double b) {
    CoefficientSeries s;
    s.c.assign(static_cast<size_t>(N) + 1, 0.0);
    s.c[0] = 1.0;
    for (int n = 1; n <= N; ++n) {
      double v = std::pow(static_cast<double>(n), -a) * std::pow(R, -n);
      if (b != 0.0 && n >= 2) v *= std::pow(std::log(static_cast<double>(n)), -b);
      s.c[static_cast<size_t>(n)] = v;
    }
    return s;
  }
  }  // namespace

  TEST_CASE("pure power law: a = 3/2, b = 0 preferred") {
    const CoefficientSeries s = synth_series(2000, 1.1, 1.5, 0.0);
    const TauberianReport rep = tauberian_fit(s, 1.1);
    CHECK(rep.preferred == "b=0");
    CHECK(std::abs(rep.fixed_b0.exponent_a - 1.5) < 0.02);
    CHECK(rep.window_stable);
  }

  TEST_CASE("log-corrected law: (a, b) = (3/2, 1/2) preferred") {
    const CoefficientSeries s = synth_series(2000, 1.1, 1.5, 0.5);
    const TauberianReport rep = tauberian_fit(s, 1.1);
    CHECK(rep.preferred == "b=1/2");
    CHECK(std::abs(rep.fixed_bhalf.exponent_a - 1.5) < 0.02);
    // the free fit sees the log exponent too
    CHECK(rep.free_fit.exponent_b == doctest::Approx(0.5).epsilon(0.25));
  }

  TEST_CASE("window guard") {
    const CoefficientSeries s = synth_series(300, 1.1, 1.5, 0.0);
    CHECK_THROWS_AS(tauberian_fit(s, 1.1), Error);
  }
}

#include "freewalk/series_engine.hpp"

TEST_SUITE("singularity_real") {
  TEST_CASE("critical profile of z3 * z5: structure and degeneracy marker") {
    const auto f1 = std::make_shared<FactorContext>(lazy_srw(3));
    const auto f2 = std::make_shared<FactorContext>(lazy_srw(5));
    const AlphaStarResult star = find_alpha_star(f1, f2);
    FreeProductAnalyzer an(f1, f2, star.alpha_star);
    ProfileOptions po;
    po.k_min = 4;
    po.k_max = 12;
    const SingularProfile p = build_profile(an, po);
    CHECK(p.rows.size() == 9);
    double prev_zeta2 = 0.0;
    for (const ProfileRow& row : p.rows) {
      CHECK(row.G_gap > 0.0);
      CHECK(row.dG > 0.0);
      CHECK(row.d2G > 0.0);
      CHECK(row.zeta2 > prev_zeta2);
      prev_zeta2 = row.zeta2;
    }
    CHECK(p.rows.back().one_minus_zeta2 < 6e-3);
    const auto laws = check_ratio_laws(p);
    for (const auto& rep : laws) CHECK(std::isfinite(rep.constant));
    // the gap comparison must already be monotone at this depth
    CHECK(laws[4].pass);
  }

  TEST_CASE("profile refuses a non-critical configuration") {
    FreeProductAnalyzer an(FreeProductConfig{lazy_srw(3), lazy_srw(5), 0.8});
    CHECK_THROWS_AS(build_profile(an), Error);
  }
}

#include <doctest.h>

#include <cmath>

#include "freewalk/errors.hpp"
#include "freewalk/words.hpp"

using namespace freewalk;

namespace {

FreeProductConfig z3z5(double alpha) {
  return FreeProductConfig{lazy_srw(3), lazy_srw(5), alpha};
}

}  // namespace

TEST_SUITE("words") {
  TEST_CASE("normal-form reduction") {
    GroupWord w;
    w.step(1, {1, 0, 0});
    w.step(1, {0, 1, 0});
    CHECK(w.letters.size() == 1);  // merged inside the same factor
    w.step(2, {1, 0, 0, 0, 0});
    CHECK(w.letters.size() == 2);
    w.step(2, {-1, 0, 0, 0, 0});
    CHECK(w.letters.size() == 1);  // letter canceled to the origin
    w.step(1, {-1, -1, 0});
    CHECK(w.is_identity());
  }

  TEST_CASE("bfs distributions: mass conservation and first steps") {
    const FreeProductConfig cfg = z3z5(0.4);
    const auto dists = bfs_distributions(cfg, 3);
    for (const auto& dist : dists) {
      double mass = 0.0;
      for (const auto& [k, p] : dist) mass += p;
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    }
    // one-step identity mass = alpha mu_1(0) + (1-alpha) mu_2(0) = 1/2
    WordKey id{};
    CHECK(dists[1].at(id) == doctest::Approx(0.5).epsilon(1e-15));
    // states after one step: identity + 6 + 10 letters
    CHECK(dists[1].size() == 17);
  }

  TEST_CASE("bfs oracle: n = 0..2 closed forms") {
    const FreeProductConfig cfg = z3z5(0.4);
    const CoefficientSeries s = bfs_oracle(cfg, 6);
    CHECK(s.c[0] == 1.0);
    CHECK(s.c[1] == doctest::Approx(0.5).epsilon(1e-15));
    // n = 2 return mass = sum_g mu_alpha(g)^2
    double m2 = 0.25;  // identity atom squared
    for (const Atom& a : cfg.factor1.atoms)
      if (a.x != std::vector<int>{0, 0, 0}) m2 += 0.16 * a.wd * a.wd;
    for (const Atom& a : cfg.factor2.atoms)
      if (a.x != std::vector<int>{0, 0, 0, 0, 0}) m2 += 0.36 * a.wd * a.wd;
    CHECK(s.c[2] == doctest::Approx(m2).epsilon(1e-13));
  }

  TEST_CASE("bfs oracle guard") {
    CHECK_THROWS_AS(bfs_oracle(z3z5(0.4), 13), Error);
  }

  TEST_CASE("monte carlo: determinism and degenerate cases") {
    const FreeProductConfig cfg = z3z5(0.4);
    const McReport a = monte_carlo(cfg, 0, 1000, 42);
    CHECK(a.estimate == 1.0);
    CHECK(a.stderr_est == 0.0);
    const McReport b1 = monte_carlo(cfg, 10, 200000, 42, 1);
    const McReport b2 = monte_carlo(cfg, 10, 200000, 42, 2);
    CHECK(b1.estimate == b2.estimate);  // bit-identical across thread counts
    const McReport c = monte_carlo(cfg, 10, 200000, 43);
    CHECK(b1.estimate != c.estimate);  // different seed, different sample
  }

  TEST_CASE("monte carlo agrees with the exact oracle within 4 sigma") {
    const FreeProductConfig cfg = z3z5(0.4);
    const CoefficientSeries exact = bfs_oracle(cfg, 10);
    const McReport mc = monte_carlo(cfg, 10, 400000, 20260808, 2);
    CHECK(std::abs(mc.estimate - exact.c[10]) < 4.0 * mc.stderr_est);
  }
}

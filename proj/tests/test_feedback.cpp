#include <cmath>
#include <utility>
#include <vector>

#include "doctest.h"

#include "decaylab/feedback.hpp"
#include "decaylab/numerics.hpp"

using namespace decaylab;

TEST_CASE("saturated power law evaluation") {
  CHECK(FeedbackLaw::linear().eval(0.7) == doctest::Approx(0.7));
  CHECK(FeedbackLaw::power_saturated(0.5, 0.5).eval(2.0) == doctest::Approx(2.0));
  // |x|^{gamma-1} x computed independently: 0.25^{-0.5} * 0.25 = 0.5.
  CHECK(FeedbackLaw::power_saturated(0.5, 0.5).eval(0.25) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(FeedbackLaw::power_saturated(1.0, 3.0).eval(0.5) == doctest::Approx(0.125).epsilon(1e-14));

  SUBCASE("branches agree at |x| = 1") {
    for (double gamma : {0.3, 0.5, 1.0}) {
      const auto law = FeedbackLaw::power_saturated(gamma, gamma);
      CHECK(law.eval(1.0) == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(law.eval(std::nextafter(1.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("zero law and zero input") {
    CHECK(FeedbackLaw::zero().eval(3.7) == 0.0);
    CHECK(FeedbackLaw::power_saturated(0.5, 0.5).eval(0.0) == 0.0);
  }
  SUBCASE("non-finite input rejected") {
    CHECK_THROWS_AS(FeedbackLaw::linear().eval(std::nan("")), std::domain_error);
    CHECK_THROWS_AS(FeedbackLaw::linear().eval(INFINITY), std::domain_error);
  }
}

TEST_CASE("radial action and odd symmetry") {
  const auto law = FeedbackLaw::power_saturated(0.5, 0.5);
  num::Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.symmetric(3.0);
    CHECK(law.eval(-x) == doctest::Approx(-law.eval(x)).epsilon(1e-13));
  }
  std::vector<double> v = {0.3, -0.4};  // |v| = 0.5
  const auto gv = law.eval(v);
  // Radial profile: g(v) = (|v|^gamma / |v|) v with |v| = 0.5.
  const double factor = std::pow(0.5, 0.5) / 0.5;
  CHECK(gv[0] == doctest::Approx(factor * 0.3).epsilon(1e-13));
  CHECK(gv[1] == doctest::Approx(factor * -0.4).epsilon(1e-13));
  const auto gneg = law.eval(std::vector<double>{-0.3, 0.4});
  CHECK(gneg[0] == doctest::Approx(-gv[0]).epsilon(1e-13));
  CHECK(gneg[1] == doctest::Approx(-gv[1]).epsilon(1e-13));
}

TEST_CASE("validator certifies the shipped laws") {
  const auto grid = default_validation_grid();

  SUBCASE("linear law passes with m = 1") {
    const auto rep = validate_feedback(FeedbackLaw::linear(), grid);
    CHECK(rep.all_pass);
    CHECK(rep.observed_m == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.observed_M <= 1.0);  // declared M = 1 covers the observed bound
  }
  SUBCASE("sublinear saturated law: c0 = C0 = 1") {
    const auto rep = validate_feedback(FeedbackLaw::power_saturated(0.5, 0.5), grid);
    CHECK(rep.all_pass);
    CHECK(rep.observed_c0 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.observed_C0 == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("superlinear saturated law") {
    const auto rep = validate_feedback(FeedbackLaw::power_saturated(1.0, 3.0), grid);
    CHECK(rep.all_pass);
    CHECK(rep.observed_c0 == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("decreasing custom law fails monotonicity") {
    const auto law = FeedbackLaw::custom({{-2.0, 2.0}, {0.0, 0.0}, {2.0, -2.0}});
    const auto rep = validate_feedback(law, grid);
    CHECK_FALSE(rep.all_pass);
    REQUIRE(rep.find("gmono") != nullptr);
    CHECK_FALSE(rep.find("gmono")->pass);
  }
  SUBCASE("empty grid is a usage error") {
    CHECK_THROWS_AS(validate_feedback(FeedbackLaw::linear(), {}), std::invalid_argument);
  }
}

TEST_CASE("monotonicity on random pairs for every shipped kind") {
  num::Rng rng(99);
  const std::vector<FeedbackLaw> laws = {
      FeedbackLaw::linear(), FeedbackLaw::power_saturated(0.5, 0.5),
      FeedbackLaw::power_saturated(1.0, 3.0),
      FeedbackLaw::custom({{-5.0, -2.5}, {0.0, 0.0}, {5.0, 2.5}})};
  for (const auto& law : laws) {
    for (int i = 0; i < 10000; ++i) {
      const double a = rng.symmetric(4.0);
      const double b = rng.symmetric(4.0);
      CHECK((law.eval(a) - law.eval(b)) * (a - b) >= -1e-12);
    }
  }
}

TEST_CASE("concave majorant exponents") {
  SUBCASE("linear pair gives q = 1, delta = 2") {
    const auto g = concave_majorant_for(1.0, 1.0);
    CHECK(g.q == doctest::Approx(1.0));
    CHECK(g.delta == doctest::Approx(2.0));
    CHECK(g.c_G == doctest::Approx(1.0));
  }
  SUBCASE("gamma = 1, p = 3: q = (p+1)/gamma - 1 = 3") {
    const auto g = concave_majorant_for(1.0, 3.0);
    CHECK(g.q == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(g.delta == doctest::Approx(4.0).epsilon(1e-14));
  }
  SUBCASE("gamma = 0.5, p = 2: q = 5, power exponent 1/3") {
    const auto g = concave_majorant_for(0.5, 2.0);
    CHECK(g.q == doctest::Approx(5.0).epsilon(1e-14));
    // G(8x)/G(x) = 8^{1/3} = 2, independent of the amplitude.
    CHECK(g.eval(8.0) / g.eval(1.0) == doctest::Approx(2.0).epsilon(1e-13));
  }
  SUBCASE("q < 1 pairs fall back to the linear majorant") {
    const auto g = concave_majorant_for(0.9, 0.9 * 2.0 - 1.0 - 0.05);
    CHECK(g.q == doctest::Approx(1.0));
    CHECK(g.delta == doctest::Approx(2.0));
  }
}

TEST_CASE("majorant scaling inequality") {
  num::Rng rng(5);
  SUBCASE("q = 1 holds with equality for any sample") {
    ConcaveMajorant g;  // G(x) = x, delta = 2, C_G = 1
    std::vector<std::pair<double, double>> samples;
    for (int i = 0; i < 100; ++i) {
      samples.emplace_back(std::exp(rng.symmetric(3.0)), std::exp(rng.symmetric(3.0)));
    }
    CHECK(check_prop_g(g, samples));
  }
  SUBCASE("q = 3 with its own delta") {
    const auto g = concave_majorant_for(1.0, 3.0);
    CHECK(check_prop_g(g, {{2.0, 0.5}}));
  }
  SUBCASE("forcing delta = 1 on q = 3 breaks the inequality") {
    auto g = concave_majorant_for(1.0, 3.0);
    g.delta = 1.0;
    CHECK_FALSE(check_prop_g(g, {{4.0, 1.0}}));
  }
  SUBCASE("positivity precondition") {
    ConcaveMajorant g;
    CHECK_THROWS_AS(check_prop_g(g, {{-1.0, 1.0}}), std::invalid_argument);
  }
}

TEST_CASE("near-zero bound |x|^2 + |g|^2 <= G(x g(x)) pointwise") {
  const auto grid = default_validation_grid();
  for (auto [gamma, p] : std::vector<std::pair<double, double>>{{0.3, 0.3}, {0.5, 0.5},
                                                                {1.0, 1.0}, {1.0, 3.0}}) {
    const auto law = FeedbackLaw::power_saturated(gamma, p);
    const auto g = concave_majorant_for(law);
    for (double x : grid) {
      if (std::abs(x) > 1.0 || x == 0.0) continue;
      const double gx = law.eval(x);
      CHECK(x * x + gx * gx <= g.eval(x * gx) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("regularized branch stays monotone and close to the law") {
  const auto law = FeedbackLaw::power_saturated(0.5, 0.5);
  const double eps = 1e-12;
  CHECK(law.eval_regularized(0.0, eps) == 0.0);
  CHECK(law.eval_regularized(eps / 2, eps) > 0.0);
  // Away from the smoothing radius the correction is O(eps^2 / x^2) relative.
  CHECK(law.eval_regularized(1e-3, eps) == doctest::Approx(law.eval(1e-3)).epsilon(1e-14));
  CHECK(law.eval_regularized(0.25, eps) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(law.slope_regularized(0.25, eps) == doctest::Approx(0.5 * std::pow(0.25, -0.5)));
  // Global deviation bound and slope continuity across the radius.
  double prev_slope = law.slope_regularized(0.0, eps);
  CHECK(prev_slope <= 1.0 / std::sqrt(eps) * 1.000001);
  for (double x = 0.0; x <= 4.0 * eps; x += 0.1 * eps) {
    CHECK(std::abs(law.eval_regularized(x, eps) - law.eval(x)) <= std::pow(eps, 0.5));
    const double s = law.slope_regularized(x, eps);
    CHECK(s > 0.0);
    CHECK(std::abs(s - prev_slope) <= 0.2 * prev_slope);  // no jumps
    prev_slope = s;
  }
}

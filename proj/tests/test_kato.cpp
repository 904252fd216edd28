#include <cmath>
#include <vector>

#include "doctest.h"

#include "decaylab/kato.hpp"
#include "decaylab/numerics.hpp"
#include "decaylab/waves.hpp"

using namespace decaylab;

namespace {

AbstractSystem scalar_linear() {
  AbstractSystem sys;
  sys.dim = 1;
  sys.a1 = {0.0};
  sys.law = FeedbackLaw::linear();
  sys.damped = {0};
  sys.profile = ModulationProfile::constant(1.0);
  return sys;
}

AbstractSystem dim4_nonlinear(double gamma = 0.5) {
  AbstractSystem sys;
  sys.dim = 4;
  sys.a1 = random_skew(4, 2024);
  sys.law = FeedbackLaw::power_saturated(gamma, gamma);
  sys.damped = {0, 1, 2, 3};
  sys.profile = ModulationProfile::oscillating(1.5, 0.5, 1.0);
  return sys;
}

double norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("resolvent solve") {
  SUBCASE("zero operator gives the identity resolvent") {
    AbstractSystem sys = scalar_linear();
    sys.law = FeedbackLaw::zero();
    const auto y = resolvent_solve(sys, 10, 0.0, {3.0});
    CHECK(y[0] == doctest::Approx(3.0).epsilon(1e-13));
  }
  SUBCASE("scalar linear damping: y = x / (1 + 1/n)") {
    const auto sys = scalar_linear();
    const auto y = resolvent_solve(sys, 4, 1.0, {2.0});
    CHECK(y[0] == doctest::Approx(2.0 / (1.0 + 0.25)).epsilon(1e-12));
  }
  SUBCASE("random skew instance: residual below tolerance") {
    const auto sys = dim4_nonlinear();
    num::Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> x(4);
      for (auto& v : x) v = rng.symmetric(2.0);
      const auto y = resolvent_solve(sys, 10, 0.3, x);
      const auto ay = sys.apply(0.3, y);
      double res = 0.0;
      for (int i = 0; i < 4; ++i) res += num::sqr(y[i] + ay[i] / 10.0 - x[i]);
      CHECK(std::sqrt(res) <= 1e-12 * (1.0 + norm(x)));
    }
  }
  SUBCASE("n must exceed omega") {
    auto sys = scalar_linear();
    sys.omega = 5.0;
    CHECK_THROWS_AS(resolvent_solve(sys, 4, 0.0, {1.0}), std::invalid_argument);
  }
}

TEST_CASE("operator monotonicity shift on random samples") {
  const auto sys = dim4_nonlinear();
  num::Rng rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> u(4), v(4);
    for (auto& w : u) w = rng.symmetric(3.0);
    for (auto& w : v) w = rng.symmetric(3.0);
    const double t = rng.uniform(0.0, 5.0);
    const auto au = sys.apply(t, u);
    const auto av = sys.apply(t, v);
    double pairing = 0.0, dist2 = 0.0;
    for (int i = 0; i < 4; ++i) {
      pairing += (au[i] - av[i]) * (u[i] - v[i]);
      dist2 += num::sqr(u[i] - v[i]);
    }
    CHECK(pairing >= -sys.omega * dist2 - 1e-12);
  }
}

TEST_CASE("resolvent contraction and the approximation bounds") {
  const auto sys = dim4_nonlinear();
  num::Rng rng(6);
  const int n = 12;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(4), y(4);
    for (auto& v : x) v = rng.symmetric(3.0);
    for (auto& v : y) v = rng.symmetric(3.0);
    const double t = rng.uniform(0.0, 5.0);
    const auto jx = resolvent_solve(sys, n, t, x);
    const auto jy = resolvent_solve(sys, n, t, y);
    std::vector<double> dj(4), dxy(4);
    for (int i = 0; i < 4; ++i) {
      dj[i] = jx[i] - jy[i];
      dxy[i] = x[i] - y[i];
    }
    // Monotone case: the bound holds with the (1 - omega/n)^{-1} factor at 1.
    CHECK(norm(dj) <= norm(dxy) * (1.0 + 1e-10));

    const auto ax = sys.apply(t, x);
    const auto an = yosida_apply(sys, n, t, x);
    CHECK(norm(an) <= norm(ax) * (1.0 + 1e-10));
  }
}

TEST_CASE("yosida identity and scalar closed form") {
  const auto sys = scalar_linear();
  const auto an = yosida_apply(sys, 4, 0.0, {2.0});
  CHECK(an[0] == doctest::Approx(2.0 / (1.0 + 0.25)).epsilon(1e-11));
  CHECK(yosida_apply(dim4_nonlinear(), 16, 0.7, {0.0, 0.0, 0.0, 0.0})[0] == 0.0);
}

TEST_CASE("approximated flow") {
  SUBCASE("zero data stays zero") {
    const auto traj = integrate_approx(dim4_nonlinear(), 8, {0, 0, 0, 0}, 2.0, 21);
    for (const auto& s : traj.states) CHECK(norm(s) == 0.0);
  }
  SUBCASE("scalar linear damping matches a exp(-t/(1+1/n))") {
    const auto sys = scalar_linear();
    const int n = 8;
    const auto traj = integrate_approx(sys, n, {1.5}, 2.0, 21);
    const double rate = 1.0 / (1.0 + 1.0 / n);
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
      CHECK(traj.states[k][0] ==
            doctest::Approx(1.5 * std::exp(-rate * traj.t[k])).epsilon(1e-8));
    }
  }
  SUBCASE("undamped approximants dissipate O(1/n); the limit flow conserves") {
    AbstractSystem sys = dim4_nonlinear();
    sys.law = FeedbackLaw::zero();
    const std::vector<double> a = {1.0, -0.5, 0.25, 0.8};
    const double a_norm = norm(a);

    const auto limit = integrate_limit(sys, a, 2.0, 1e-3, 41);
    for (double v : limit.norms()) CHECK(std::abs(v - a_norm) <= 1e-10 * a_norm);

    // The Yosida flow of a skew generator sheds |A1 J_n u|^2 / n per unit
    // time; check the deficit shrinks proportionally to 1/n.
    const double drop16 = a_norm - integrate_approx(sys, 16, a, 2.0, 41).norms().back();
    const double drop64 = a_norm - integrate_approx(sys, 64, a, 2.0, 41).norms().back();
    CHECK(drop16 > 1e-6);  // genuinely dissipative at finite n
    CHECK(drop16 / drop64 == doctest::Approx(4.0).epsilon(0.15));

    // Monotone norms along the approximated flow.
    const auto ns = integrate_approx(sys, 16, a, 2.0, 41).norms();
    for (std::size_t k = 1; k < ns.size(); ++k) CHECK(ns[k] <= ns[k - 1] + 1e-12);
  }
  SUBCASE("limit energy is non-increasing in the monotone case") {
    // Linear law over a long horizon; the sublinear one only until just
    // before its finite-time extinction, where the limit field stops
    // being Lipschitz and only the resolvent scheme stays classical.
    AbstractSystem lin = dim4_nonlinear();
    lin.law = FeedbackLaw::linear();
    std::vector<double> a = {0.9, -0.3, 0.5, -0.7};
    const auto ns_lin = integrate_limit(lin, a, 5.0, 1e-3, 61).norms();
    for (std::size_t k = 1; k < ns_lin.size(); ++k) CHECK(ns_lin[k] <= ns_lin[k - 1] + 1e-12);

    const auto ns_sub = integrate_limit(dim4_nonlinear(), a, 1.0, 1e-3, 41).norms();
    for (std::size_t k = 1; k < ns_sub.size(); ++k) CHECK(ns_sub[k] <= ns_sub[k - 1] + 1e-12);
  }
}

TEST_CASE("quasi-monotone demo honors the shifted factors") {
  // Damping slope 1 - omega with omega = 0.5: still monotone, so the
  // shifted bounds (1 - omega/n)^{-1} hold with room to spare.
  AbstractSystem sys;
  sys.dim = 3;
  sys.a1 = random_skew(3, 77);
  sys.omega = 0.5;
  sys.law = FeedbackLaw::custom({{-10.0, -5.0}, {0.0, 0.0}, {10.0, 5.0}});
  sys.damped = {0, 1, 2};
  sys.profile = ModulationProfile::constant(1.0);

  const int n = 2;  // n > omega holds
  num::Rng rng(9);
  const double factor = 1.0 / (1.0 - sys.omega / n);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> x(3), y(3);
    for (auto& v : x) v = rng.symmetric(2.0);
    for (auto& v : y) v = rng.symmetric(2.0);
    const auto jx = resolvent_solve(sys, n, 0.0, x);
    const auto jy = resolvent_solve(sys, n, 0.0, y);
    std::vector<double> dj(3), dxy(3);
    for (int i = 0; i < 3; ++i) {
      dj[i] = jx[i] - jy[i];
      dxy[i] = x[i] - y[i];
    }
    CHECK(norm(dj) <= factor * norm(dxy) * (1.0 + 1e-10));
  }
  CHECK_THROWS_AS(resolvent_solve(sys, 0, 0.0, {1.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("convergence study") {
  SUBCASE("scalar linear case: pairwise error shrinks like 1/n") {
    const auto sys = scalar_linear();
    const auto study = convergence_study(sys, {1.0}, 2.0, {8, 16, 32, 64}, 81);
    REQUIRE(study.sup_err.size() == 3);
    CHECK(study.sup_err[0] / study.sup_err[1] == doctest::Approx(2.0).epsilon(0.15));
    CHECK(study.sup_err[1] / study.sup_err[2] == doctest::Approx(2.0).epsilon(0.15));
    // err ~ 1/n means err^2 ~ n^{-2}: slope well below the -1 bound.
    CHECK(study.fitted_slope <= -1.0);
  }
  SUBCASE("zero conservative part and no damping: all errors vanish") {
    AbstractSystem sys;
    sys.dim = 2;
    sys.a1 = {0.0, 0.0, 0.0, 0.0};
    sys.law = FeedbackLaw::zero();
    sys.profile = ModulationProfile::constant(1.0);
    const auto study = convergence_study(sys, {1.0, -2.0}, 2.0, {8, 16, 32}, 41);
    for (double e : study.sup_err) CHECK(e == 0.0);
  }
  SUBCASE("nonlinear dim-4 instance scales no worse than the bound") {
    const auto sys = dim4_nonlinear();
    std::vector<double> a = {0.8, -0.6, 0.4, -0.2};
    const auto study = convergence_study(sys, a, 2.0, {8, 16, 32, 64, 128}, 101);
    CHECK(study.fitted_slope <= -0.8);
    CHECK(study.fitted_constant > 0.0);
  }
  SUBCASE("n_list must increase") {
    CHECK_THROWS_AS(convergence_study(scalar_linear(), {1.0}, 1.0, {8, 8}),
                    std::invalid_argument);
  }
}

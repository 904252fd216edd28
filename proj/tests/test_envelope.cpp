#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"

#include "decaylab/envelope.hpp"
#include "decaylab/numerics.hpp"

using namespace decaylab;

namespace {

EnvelopeSpec linear_spec(double c = 1.0, double E0 = 1.0) {
  EnvelopeSpec spec;
  spec.c = c;
  spec.E0 = E0;
  spec.G = ConcaveMajorant{};  // G(x) = x, q = 1, scale 1
  return spec;
}

EnvelopeSpec power_spec(double q, double c = 1.0, double E0 = 1.0) {
  EnvelopeSpec spec = linear_spec(c, E0);
  spec.G.q = q;
  spec.G.delta = q + 1.0;
  return spec;
}

}  // namespace

TEST_CASE("h and its inverse") {
  CHECK(h_eval(linear_spec(), 0.0) == 0.0);
  CHECK(h_eval(linear_spec(), 3.0) == doctest::Approx(6.0));
  CHECK(h_eval(power_spec(3.0, 2.0), 1.0) == doctest::Approx(4.0));  // 2 (1 + 1)

  CHECK(p_eval(linear_spec(), 0.0) == 0.0);
  CHECK(p_eval(linear_spec(), 1.0) == doctest::Approx(0.5).epsilon(1e-11));
  CHECK(p_eval(power_spec(1.0), 4.0) == doctest::Approx(2.0).epsilon(1e-11));

  num::Rng rng(17);
  const auto spec = power_spec(3.0, 1.7);
  for (int i = 0; i < 100; ++i) {
    const double y = std::exp(rng.symmetric(6.0));
    CHECK(h_eval(spec, p_eval(spec, y)) == doctest::Approx(y).epsilon(1e-10));
  }
}

TEST_CASE("psi closed forms") {
  SUBCASE("linear p: psi(x) = 2c ln(E0/x)") {
    const auto spec = linear_spec(1.0, 1.0);
    CHECK(psi_eval(spec, 1.0) == 0.0);
    CHECK(psi_eval(spec, std::exp(-1.0)) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(psi_inverse(spec, 0.0) == doctest::Approx(1.0));
    CHECK(psi_inverse(spec, 2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
    CHECK_THROWS_AS(psi_eval(spec, 0.0), std::domain_error);
    CHECK_THROWS_AS(psi_eval(spec, -1.0), std::domain_error);
  }
  SUBCASE("explicit p(s) = s^2: psi(x) = 1/x - 1/E0") {
    Psi psi(Psi::PowerRate{1.0, 2.0}, 1.0);
    CHECK(psi.value(0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(psi.inverse(1.0) == doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("quadrature path matches the closed forms") {
    Psi quad_sq([](double s) { return s * s; }, 1.0);
    CHECK(quad_sq.value(0.5) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(quad_sq.inverse(1.0) == doctest::Approx(0.5).epsilon(1e-8));
    Psi quad_lin([](double s) { return 0.5 * s; }, 1.0);
    CHECK(quad_lin.value(std::exp(-1.0)) == doctest::Approx(2.0).epsilon(1e-9));
  }
}

TEST_CASE("psi round trips") {
  num::Rng rng(23);
  SUBCASE("majorant-backed spec") {
    for (double q : {1.0, 3.0, 5.0}) {
      const auto spec = power_spec(q, 1.3, 2.0);
      const Psi psi = Psi::from_spec(spec);
      for (int i = 0; i < 333; ++i) {
        const double x = spec.E0 * std::pow(10.0, -6.0 * rng.uniform());
        CHECK(psi.inverse(psi.value(x)) == doctest::Approx(x).epsilon(1e-8));
      }
    }
  }
  SUBCASE("power case matches t^{2/(1-q)} asymptotics") {
    // p(s) = s^{(q+1)/2} with q = 3: psi^{-1}(y) ~ y^{-1} for large y.
    Psi psi(Psi::PowerRate{1.0, 2.0}, 1.0);
    for (double y : {1e3, 1e6}) {
      const double closed = std::pow(1.0 + y, -1.0);
      CHECK(psi.inverse(y) == doctest::Approx(closed).epsilon(1e-8));
    }
  }
}

TEST_CASE("comparison ODE against separable closed forms") {
  SUBCASE("linear p, constant beta") {
    const auto traj = solve_comparison_ode([](double) { return 0.8; },
                                           [](double s) { return s; }, 2.0, 10.0);
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
      CHECK(traj.S[i] == doctest::Approx(2.0 * std::exp(-0.8 * traj.t[i])).epsilon(1e-8));
    }
  }
  SUBCASE("quadratic p, constant beta") {
    const auto traj = solve_comparison_ode([](double) { return 0.5; },
                                           [](double s) { return s * s; }, 1.5, 10.0);
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
      CHECK(traj.S[i] == doctest::Approx(1.5 / (1.0 + 1.5 * 0.5 * traj.t[i])).epsilon(1e-8));
    }
  }
  SUBCASE("linear p, decaying beta, T = 0") {
    const auto traj = solve_comparison_ode([](double s) { return 1.0 / (1.0 + s); },
                                           [](double s) { return s; }, 1.0, 20.0);
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
      CHECK(traj.S[i] == doctest::Approx(1.0 / (1.0 + traj.t[i])).epsilon(1e-8));
    }
  }
}

TEST_CASE("ODE trajectories sit on the psi^{-1} curve") {
  // S solves psi(S(t)) = int_0^t beta(s+T) ds exactly, so solver and psi
  // machinery must agree to the stated tolerance.
  num::Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const double b = rng.uniform(0.05, 0.9);
    const double nu = rng.uniform(1.0, 3.0);
    const double sigma = rng.uniform(0.2, 1.0);
    const double E0 = rng.uniform(0.5, 2.0);
    const double T = rng.uniform(0.0, 2.0);
    const int shape = trial % 3;
    auto beta = [=](double s) {
      if (shape == 0) return b;
      if (shape == 1) return b * std::pow(1.0 + s, -sigma);
      return b * std::pow(1.0 + s, sigma);
    };
    auto p = [=](double s) { return std::pow(s, nu); };
    const auto traj = solve_comparison_ode(beta, p, E0, 8.0, T, 81);
    const Psi psi(Psi::PowerRate{1.0, nu}, E0);
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
      const double arg = num::integrate_adaptive([&](double s) { return beta(s + T); }, 0.0,
                                                 traj.t[i], 1e-12, 1e-13);
      CHECK(traj.S[i] <= psi.inverse(arg) + 1e-8);
      CHECK(traj.S[i] >= psi.inverse(arg) - 1e-8);
    }
  }
}

TEST_CASE("discrete recursion checker") {
  auto p_id = [](double s) { return s; };

  SUBCASE("constructed equality sequence passes") {
    std::vector<double> seq;
    double e = 1.0;
    for (int n = 0; n < 20; ++n) {
      seq.push_back(e);
      e *= 0.5;
    }
    const auto res = check_discrete_recursion(seq, [](double) { return 0.5; }, p_id, 1.0);
    CHECK(res.precondition_ok);
    CHECK(res.holds);
    CHECK(res.envelope_bound.size() == seq.size());
    // Dominance (A7): each sample sits below psi^{-1}(int beta).
    for (std::size_t n = 1; n < seq.size(); ++n) {
      CHECK(seq[n] <= res.envelope_bound[n] + 1e-8);
    }
  }
  SUBCASE("constant sequence with positive beta fails") {
    std::vector<double> seq(10, 1.0);
    const auto res = check_discrete_recursion(seq, [](double) { return 0.5; }, p_id, 1.0);
    CHECK(res.precondition_ok);
    CHECK_FALSE(res.holds);
  }
  SUBCASE("increasing sequence reports a precondition violation") {
    const auto res = check_discrete_recursion({1.0, 2.0}, [](double) { return 0.5; }, p_id, 1.0);
    CHECK_FALSE(res.precondition_ok);
  }
  SUBCASE("exact ODE samples violate the one-step inequality to first order") {
    // With beta = b and p = id, the inequality at exact samples demands
    // b + e^{-b} <= 1, false for every b > 0. The checker must say so.
    const auto traj = solve_comparison_ode([](double) { return 0.5; }, p_id, 1.0, 10.0, 0.0, 11);
    const auto res = check_discrete_recursion(traj.S, [](double) { return 0.5; }, p_id, 1.0);
    CHECK(res.precondition_ok);
    CHECK_FALSE(res.holds);
  }
}

TEST_CASE("envelope dispatch per regime") {
  SUBCASE("value at t = T is E0") {
    auto spec = linear_spec();
    spec.T = 1.0;
    CHECK(envelope_at(spec, ModulationProfile::constant(1.0), 1.0) == doctest::Approx(1.0));
  }
  SUBCASE("linear p with constant alpha: E0 exp(-(t-T)/2)") {
    auto spec = linear_spec();
    spec.T = 1.0;
    spec.mu = 1.0;
    spec.alpha0 = 1.0;
    const auto profile = ModulationProfile::constant(1.0);
    for (double t : {1.0, 2.0, 5.0, 9.0}) {
      CHECK(envelope_at(spec, profile, t) ==
            doctest::Approx(std::exp(-(t - 1.0) / 2.0)).epsilon(1e-9));
    }
    // Same values under the non-increasing dispatch, since the clock
    // integral of a constant profile is t - T.
    auto spec_ni = spec;
    spec_ni.regime = Regime::NonIncreasing;
    CHECK(envelope_at(spec_ni, profile, 5.0) ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-9));
  }
  SUBCASE("monotone in t") {
    auto spec = power_spec(3.0);
    spec.T = 1.0;
    spec.regime = Regime::NonIncreasing;
    const auto profile = ModulationProfile::power_decay(0.5);
    double prev = envelope_at(spec, profile, 1.0);
    for (double t = 1.5; t < 20.0; t += 0.5) {
      const double cur = envelope_at(spec, profile, t);
      CHECK(cur <= prev + 1e-12);
      prev = cur;
    }
  }
  SUBCASE("regime mismatch is a usage error") {
    auto spec = linear_spec();
    spec.regime = Regime::NonIncreasing;
    CHECK_THROWS_AS(envelope_at(spec, ModulationProfile::power_growth(0.5), 2.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(envelope_at(spec, ModulationProfile::constant(1.0), 0.5),
                    std::invalid_argument);  // t < T
  }
  SUBCASE("curve evaluation matches the one-shot path") {
    auto spec = linear_spec();
    spec.T = 1.0;
    spec.regime = Regime::NonIncreasing;
    const auto profile = ModulationProfile::power_decay(0.5);
    EnvelopeCurve curve(spec, profile, 50.0);
    for (double t : {1.0, 3.0, 7.0, 20.0, 45.0}) {
      CHECK(curve.value(t) == doctest::Approx(envelope_at(spec, profile, t)).epsilon(1e-9));
    }
  }
}

TEST_CASE("closed-form rate dispatch") {
  SUBCASE("linear behavior near zero gives an exponential") {
    auto spec = linear_spec();
    spec.T = 1.0;
    const auto law = closed_form_rate(spec, ModulationProfile::constant(1.0));
    CHECK(law.model == DecayModel::Exponential);
    CHECK(law.clock == ClockKind::Time);
    CHECK(law.rate == doctest::Approx(0.5));  // T mu alpha0 / (c (1 + scale))
  }
  SUBCASE("q = 3 gives the power exponent 2/(q-1) = 1") {
    auto spec = power_spec(3.0);
    const auto law = closed_form_rate(spec, ModulationProfile::constant(1.0));
    CHECK(law.model == DecayModel::Power);
    CHECK(law.exponent == doctest::Approx(1.0));
  }
  SUBCASE("underdamping specializes to a stretched law") {
    auto spec = linear_spec();
    spec.regime = Regime::NonIncreasing;
    const auto profile = ModulationProfile::power_decay(0.5);
    const auto law = closed_form_rate(spec, profile);
    const auto in_time = specialize_in_time(law, profile, spec.delta);
    REQUIRE(in_time.has_value());
    CHECK(in_time->model == DecayModel::Stretched);
    CHECK(in_time->clock_exponent == doctest::Approx(0.5));
  }
  SUBCASE("overdamping at sigma = 1/(delta-1) becomes a power law in t") {
    auto spec = linear_spec();
    spec.regime = Regime::NonDecreasing;
    spec.delta = 2.0;
    const auto profile = ModulationProfile::power_growth(1.0);
    const auto law = closed_form_rate(spec, profile);
    const auto in_time = specialize_in_time(law, profile, spec.delta);
    REQUIRE(in_time.has_value());
    CHECK(in_time->model == DecayModel::Power);
  }
  SUBCASE("custom majorants have no closed form") {
    auto spec = linear_spec();
    spec.G.kind = MajorantKind::CustomSampled;
    spec.G.samples = {{0.0, 0.0}, {1.0, 1.0}, {2.0, 1.5}};
    CHECK_THROWS_AS(closed_form_rate(spec, ModulationProfile::constant(1.0)),
                    ClosedFormUnsupported);
  }
}

#pragma once

#include <cstddef>
#include <stdexcept>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "decaylab/feedback.hpp"
#include "decaylab/modulation.hpp"

namespace decaylab {

/// Parameters of the decay envelope psi^{-1}(.): observation window T,
/// damping-region measure mu, calibration constant c, the concave
/// majorant G, the initial energy, and the per-regime constants.
struct EnvelopeSpec {
  double T = 1.0;
  double mu = 1.0;
  double c = 1.0;
  ConcaveMajorant G;
  double E0 = 1.0;
  Regime regime = Regime::Oscillating;
  double c0 = 1.0;      // spatial-equivalence constant (non-decreasing case)
  double alpha0 = 1.0;  // lower bound (oscillating case)
  double delta = 2.0;   // scaling exponent (non-decreasing case)

  void validate() const;
};

/// h(x) = c (x + G(x)).
double h_eval(const EnvelopeSpec& spec, double x);

/// p = h^{-1}, by monotone bisection to relative tolerance 1e-12.
double p_eval(const EnvelopeSpec& spec, double y);

/// The decreasing integral psi(x) = int_x^{E0} ds / p(s) and its inverse.
///
/// Power-law rates p(s) = coeff s^nu and power-kind majorants use exact
/// antiderivatives; everything else goes through adaptive quadrature with
/// the substitution s = E0 u^k to soften the stiff tail near zero.
class Psi {
 public:
  struct PowerRate {
    double coeff = 1.0;
    double exponent = 1.0;  // p(s) = coeff * s^exponent, exponent >= 1
  };

  Psi(PowerRate rate, double initial_energy);
  Psi(std::function<double(double)> p, double initial_energy);
  static Psi from_spec(const EnvelopeSpec& spec);

  /// psi(x) for 0 < x <= E0; diverges as x -> 0+.
  double value(double x) const;
  /// The unique x in (0, E0] with psi(x) = y, for y >= 0.
  double inverse(double y) const;
  double initial_energy() const { return E0_; }

 private:
  enum class Mode { ClosedPower, ClosedMajorant, Quadrature };
  Mode mode_;
  double E0_;
  PowerRate rate_;                       // ClosedPower
  double c_ = 1.0, A_ = 1.0, theta_ = 1.0;  // ClosedMajorant: h(w) = c (w + A w^theta)
  double pE0_ = 1.0;                     // cached p(E0) for ClosedMajorant
  std::function<double(double)> p_;      // Quadrature

  double p_of(double s) const;
};

double psi_eval(const EnvelopeSpec& spec, double x);
double psi_inverse(const EnvelopeSpec& spec, double y);

/// Theoretical decay envelope at time t >= T, dispatching on the regime:
/// non-increasing    psi^{-1}(T mu  int_T^t alpha)
/// non-decreasing    psi^{-1}(T mu c0 int_T^t alpha(s-T) alpha(s)^{-delta})
/// oscillating       psi^{-1}(T mu alpha0 (t - T)).
/// The spec regime must match the profile classification (constant
/// profiles are compatible with every regime).
double envelope_at(const EnvelopeSpec& spec, const ModulationProfile& profile, double t);

/// Same dispatch with the psi solver and cumulative clock cached, for
/// dense evaluation along a trace.
class EnvelopeCurve {
 public:
  EnvelopeCurve(EnvelopeSpec spec, ModulationProfile profile, double horizon);
  double clock(double t) const;  // the regime's clock integral from T to t
  double value(double t) const;
  const EnvelopeSpec& spec() const { return spec_; }

 private:
  EnvelopeSpec spec_;
  ModulationProfile profile_;
  Psi psi_;
  mutable double last_t_;
  mutable double last_clock_;
};

struct ComparisonTrajectory {
  std::vector<double> t;
  std::vector<double> S;
};

/// Solves S'(t) + beta(t + T) p(S(t)) = 0, S(0) = E0, with adaptive step
/// control at 1e-10 relative local error, sampled on an even grid over
/// [0, horizon]. S stays strictly positive and strictly decreasing.
ComparisonTrajectory solve_comparison_ode(const std::function<double(double)>& beta,
                                          const std::function<double(double)>& p, double E0,
                                          double horizon, double T_shift = 0.0,
                                          std::size_t samples = 201);

struct RecursionCheck {
  bool precondition_ok = true;  // sequence non-increasing and nonnegative
  bool holds = false;           // the one-step inequality at every n
  std::size_t first_violation = static_cast<std::size_t>(-1);
  std::vector<double> envelope_bound;  // psi^{-1}(int_T^{nT} beta) per n
};

/// Checks beta((n+1)T) p(E(nT)) + E((n+1)T) <= E(nT) for every n and
/// returns the envelope bound trace so the caller can assert dominance.
/// An optional precomputed psi avoids rebuilding the quadrature solver.
RecursionCheck check_discrete_recursion(const std::vector<double>& seq,
                                        const std::function<double(double)>& beta,
                                        const std::function<double(double)>& p, double T,
                                        const Psi* psi = nullptr);

enum class DecayModel { Exponential, Power, Stretched };
enum class ClockKind { Time, IntegralAlpha, WeightedIntegral };

/// A decay law in the regime's clock variable w:
/// exponential  E ~ exp(-rate w)
/// power        E ~ w^{-exponent}
/// stretched    E ~ exp(-rate (1+t)^{clock_exponent})  (time-domain form).
struct DecayLaw {
  DecayModel model = DecayModel::Exponential;
  double rate = std::numeric_limits<double>::quiet_NaN();
  double exponent = std::numeric_limits<double>::quiet_NaN();
  double clock_exponent = std::numeric_limits<double>::quiet_NaN();
  ClockKind clock = ClockKind::Time;
};

struct ClosedFormUnsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Closed-form envelope law for power-kind majorants: q = 1 gives an
/// exponential in the clock, q > 1 a power law with exponent 2/(q-1)
/// (= 2 gamma / (p+1-2 gamma)). Custom majorants are unsupported; use
/// psi_inverse numerically instead.
DecayLaw closed_form_rate(const EnvelopeSpec& spec, const ModulationProfile& profile);

/// Rewrites a clock-variable law in plain time for profile kinds with a
/// closed-form clock; empty when the clock integral stays bounded or has
/// no elementary time form. delta is the scaling exponent of the
/// non-decreasing regime's weighted clock.
std::optional<DecayLaw> specialize_in_time(const DecayLaw& law, const ModulationProfile& profile,
                                           double delta = 2.0);

}  // namespace decaylab

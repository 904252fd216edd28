#include "decaylab/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "decaylab/numerics.hpp"

namespace decaylab {

namespace {

constexpr double kFloorEnergy = 1e-300;

bool regime_compatible(Regime spec_regime, const ModulationProfile& profile) {
  if (profile.kind == ModulationKind::Constant) return true;  // monotone both ways and bounded
  switch (profile.kind) {
    case ModulationKind::PowerDecay:
      return spec_regime == Regime::NonIncreasing;
    case ModulationKind::PowerGrowth:
      return spec_regime == Regime::NonDecreasing;
    case ModulationKind::Oscillating:
      return spec_regime == Regime::Oscillating;
    default:
      return true;  // piecewise: caller classified it
  }
}

}  // namespace

void EnvelopeSpec::validate() const {
  if (!(T > 0.0 && mu > 0.0 && c > 0.0 && E0 > 0.0)) {
    throw std::invalid_argument("EnvelopeSpec: T, mu, c, E0 must be positive");
  }
  if (!(c0 > 0.0 && c0 <= 1.0)) throw std::invalid_argument("EnvelopeSpec: c0 in (0, 1]");
  if (!(delta >= 2.0)) throw std::invalid_argument("EnvelopeSpec: delta >= 2");
}

double h_eval(const EnvelopeSpec& spec, double x) {
  if (x < 0.0) throw std::domain_error("h_eval: x >= 0 required");
  return spec.c * (x + spec.G.eval(x));
}

double p_eval(const EnvelopeSpec& spec, double y) {
  if (y < 0.0) throw std::domain_error("p_eval: y >= 0 required");
  if (y == 0.0) return 0.0;
  // h(x) >= c x, so the root lies in [0, y/c].
  return num::invert_increasing([&](double x) { return h_eval(spec, x); }, y, 0.0,
                                y / spec.c, 1e-12, 300);
}

Psi::Psi(PowerRate rate, double initial_energy) : mode_(Mode::ClosedPower), E0_(initial_energy),
                                                  rate_(rate) {
  if (!(E0_ > 0.0)) throw std::invalid_argument("Psi: E0 > 0 required");
  if (!(rate_.coeff > 0.0) || !(rate_.exponent >= 1.0)) {
    throw std::invalid_argument("Psi: power rate needs coeff > 0, exponent >= 1");
  }
}

Psi::Psi(std::function<double(double)> p, double initial_energy)
    : mode_(Mode::Quadrature), E0_(initial_energy), p_(std::move(p)) {
  if (!(E0_ > 0.0)) throw std::invalid_argument("Psi: E0 > 0 required");
}

Psi Psi::from_spec(const EnvelopeSpec& spec) {
  spec.validate();
  if (spec.G.kind == MajorantKind::Power) {
    Psi psi(PowerRate{1.0, 1.0}, spec.E0);
    psi.mode_ = Mode::ClosedMajorant;
    psi.c_ = spec.c;
    psi.A_ = spec.G.scale;
    psi.theta_ = 2.0 / (spec.G.q + 1.0);
    psi.pE0_ = p_eval(spec, spec.E0);
    return psi;
  }
  EnvelopeSpec copy = spec;
  return Psi([copy](double y) { return p_eval(copy, y); }, spec.E0);
}

double Psi::p_of(double s) const {
  switch (mode_) {
    case Mode::ClosedPower:
      return rate_.coeff * std::pow(s, rate_.exponent);
    case Mode::ClosedMajorant: {
      // h(w) = c (w + A w^theta); invert by bisection on [0, s/c].
      const double c = c_, A = A_, th = theta_;
      return num::invert_increasing(
          [&](double w) { return c * (w + A * std::pow(w, th)); }, s, 0.0, s / c, 1e-13, 300);
    }
    case Mode::Quadrature:
      return p_(s);
  }
  return 0.0;
}

double Psi::value(double x) const {
  if (!(x > 0.0)) throw std::domain_error("psi: diverges at and below zero");
  if (x > E0_ * (1.0 + 1e-12)) throw std::domain_error("psi: x must not exceed E0");
  x = std::min(x, E0_);
  if (x == E0_) return 0.0;

  switch (mode_) {
    case Mode::ClosedPower: {
      const double nu = rate_.exponent;
      if (std::abs(nu - 1.0) < 1e-14) return std::log(E0_ / x) / rate_.coeff;
      return (std::pow(x, 1.0 - nu) - std::pow(E0_, 1.0 - nu)) / (rate_.coeff * (nu - 1.0));
    }
    case Mode::ClosedMajorant: {
      // With s = h(w): psi(x) = int_{p(x)}^{p(E0)} h'(w)/w dw, elementary.
      const double px = p_of(x);
      if (px <= 0.0) return std::numeric_limits<double>::infinity();
      if (std::abs(theta_ - 1.0) < 1e-14) {
        return c_ * (1.0 + A_) * std::log(E0_ / x);
      }
      const double head = std::log(pE0_ / px);
      const double tail = A_ * theta_ / (1.0 - theta_) *
                          (std::pow(px, theta_ - 1.0) - std::pow(pE0_, theta_ - 1.0));
      return c_ * (head + tail);
    }
    case Mode::Quadrature: {
      // Substitution s = E0 u^k concentrates panels toward the stiff tail.
      const double k = 3.0;
      const double u0 = std::pow(x / E0_, 1.0 / k);
      const double E0 = E0_;
      const auto& p = p_;
      const double integral = num::integrate_adaptive(
          [&, E0, k](double u) {
            const double s = E0 * std::pow(u, k);
            return E0 * k * std::pow(u, k - 1.0) / p(s);
          },
          u0, 1.0, 1e-9, 1e-11, 64);
      // Overflow in the tail means psi is effectively infinite there.
      return std::isfinite(integral) ? integral : std::numeric_limits<double>::infinity();
    }
  }
  return 0.0;
}

double Psi::inverse(double y) const {
  if (y < 0.0) throw std::domain_error("psi inverse: y >= 0 required");
  if (y == 0.0) return E0_;

  // Fast paths where the antiderivative inverts in closed form.
  if (mode_ == Mode::ClosedPower) {
    const double nu = rate_.exponent;
    if (std::abs(nu - 1.0) < 1e-14) {
      const double x = E0_ * std::exp(-rate_.coeff * y);
      return std::max(x, kFloorEnergy);
    }
    const double base = std::pow(E0_, 1.0 - nu) + rate_.coeff * (nu - 1.0) * y;
    return std::max(std::pow(base, 1.0 / (1.0 - nu)), kFloorEnergy);
  }
  if (mode_ == Mode::ClosedMajorant && std::abs(theta_ - 1.0) < 1e-14) {
    return std::max(E0_ * std::exp(-y / (c_ * (1.0 + A_))), kFloorEnergy);
  }

  // psi is strictly decreasing; bisect on log x over [1e-300, E0]. A
  // non-finite probe counts as "above y" since psi blows up toward zero.
  double lo = std::log(kFloorEnergy);
  double hi = std::log(E0_);
  {
    const double v = value(std::exp(lo));
    if (std::isfinite(v) && v <= y) return kFloorEnergy;  // beyond representable range
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = value(std::exp(mid));
    if (!(v <= y)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(0.5 * (lo + hi));
}

double psi_eval(const EnvelopeSpec& spec, double x) {
  if (!(x > 0.0)) throw std::domain_error("psi_eval: requires x in (0, E0]");
  return Psi::from_spec(spec).value(x);
}

double psi_inverse(const EnvelopeSpec& spec, double y) {
  return Psi::from_spec(spec).inverse(y);
}

namespace {

double envelope_argument(const EnvelopeSpec& spec, const ModulationProfile& profile, double t) {
  switch (spec.regime) {
    case Regime::NonIncreasing:
      return spec.T * spec.mu * integral_alpha(profile, spec.T, t);
    case Regime::NonDecreasing:
      return spec.T * spec.mu * spec.c0 * integral_weighted(profile, spec.delta, spec.T, t);
    case Regime::Oscillating:
      return spec.T * spec.mu * spec.alpha0 * (t - spec.T);
  }
  return 0.0;
}

}  // namespace

double envelope_at(const EnvelopeSpec& spec, const ModulationProfile& profile, double t) {
  spec.validate();
  if (t < spec.T) throw std::invalid_argument("envelope_at: requires t >= T");
  if (!regime_compatible(spec.regime, profile)) {
    throw std::invalid_argument("envelope_at: spec regime does not match the profile");
  }
  return Psi::from_spec(spec).inverse(envelope_argument(spec, profile, t));
}

EnvelopeCurve::EnvelopeCurve(EnvelopeSpec spec, ModulationProfile profile, double horizon)
    : spec_(std::move(spec)), profile_(std::move(profile)), psi_(Psi::from_spec(spec_)),
      last_t_(spec_.T), last_clock_(0.0) {
  (void)horizon;
  spec_.validate();
  if (!regime_compatible(spec_.regime, profile_)) {
    throw std::invalid_argument("EnvelopeCurve: spec regime does not match the profile");
  }
}

double EnvelopeCurve::clock(double t) const {
  if (t < spec_.T) throw std::invalid_argument("EnvelopeCurve: requires t >= T");
  if (spec_.regime == Regime::Oscillating) return spec_.alpha0 * (t - spec_.T);
  if (t < last_t_) {
    last_t_ = spec_.T;
    last_clock_ = 0.0;
  }
  // Accumulate monotone queries so dense trace evaluation stays linear.
  double inc = 0.0;
  if (spec_.regime == Regime::NonIncreasing) {
    inc = integral_alpha(profile_, last_t_, t);
  } else {
    inc = num::integrate_adaptive(
        [&](double s) {
          return alpha_upper(profile_, s - spec_.T) *
                 std::pow(alpha_upper(profile_, s), -spec_.delta);
        },
        last_t_, t, 1e-10, 1e-12);
  }
  last_clock_ += inc;
  last_t_ = t;
  return last_clock_;
}

double EnvelopeCurve::value(double t) const {
  double arg = spec_.T * spec_.mu * clock(t);
  if (spec_.regime == Regime::NonDecreasing) arg *= spec_.c0;
  return psi_.inverse(arg);
}

ComparisonTrajectory solve_comparison_ode(const std::function<double(double)>& beta,
                                          const std::function<double(double)>& p, double E0,
                                          double horizon, double T_shift, std::size_t samples) {
  if (!(E0 > 0.0)) throw std::invalid_argument("solve_comparison_ode: E0 > 0 required");
  if (!(horizon > 0.0) || samples < 2) {
    throw std::invalid_argument("solve_comparison_ode: bad horizon or grid");
  }
  std::vector<double> grid(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    grid[i] = horizon * static_cast<double>(i) / static_cast<double>(samples - 1);
  }
  auto rhs = [&](double t, double S) {
    return -beta(t + T_shift) * p(std::max(S, 0.0));
  };
  const auto sol = num::integrate_scalar_ode(rhs, 0.0, E0, grid, 1e-10, 0.0, true);
  return {sol.t, sol.y};
}

RecursionCheck check_discrete_recursion(const std::vector<double>& seq,
                                        const std::function<double(double)>& beta,
                                        const std::function<double(double)>& p, double T,
                                        const Psi* psi) {
  RecursionCheck out;
  if (seq.size() < 2) {
    out.precondition_ok = false;
    return out;
  }
  for (std::size_t n = 0; n < seq.size(); ++n) {
    if (seq[n] < 0.0 || (n > 0 && seq[n] > seq[n - 1] * (1.0 + 1e-12))) {
      out.precondition_ok = false;
      out.first_violation = n;
      return out;
    }
  }

  out.holds = true;
  for (std::size_t n = 0; n + 1 < seq.size(); ++n) {
    const double lhs = beta((n + 1) * T) * p(seq[n]) + seq[n + 1];
    if (lhs > seq[n] + 1e-12 * std::max(seq[n], 1.0)) {
      out.holds = false;
      out.first_violation = n;
      break;
    }
  }

  Psi local = psi != nullptr ? *psi : Psi(p, std::max(seq[0], kFloorEnergy));
  out.envelope_bound.resize(seq.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < seq.size(); ++n) {
    const double tn = static_cast<double>(n) * T;
    if (tn <= T) {
      out.envelope_bound[n] = local.initial_energy();
      continue;
    }
    const double prev = std::max(T, static_cast<double>(n - 1) * T);
    acc += num::integrate_adaptive(beta, prev, tn, 1e-11, 1e-12);
    out.envelope_bound[n] = local.inverse(acc);
  }
  return out;
}

DecayLaw closed_form_rate(const EnvelopeSpec& spec, const ModulationProfile& profile) {
  spec.validate();
  if (spec.G.kind != MajorantKind::Power) {
    throw ClosedFormUnsupported("closed_form_rate: custom majorant has no closed form");
  }
  DecayLaw law;
  switch (spec.regime) {
    case Regime::NonIncreasing:
      law.clock = ClockKind::IntegralAlpha;
      break;
    case Regime::NonDecreasing:
      law.clock = ClockKind::WeightedIntegral;
      break;
    case Regime::Oscillating:
      law.clock = ClockKind::Time;
      break;
  }
  double kappa = spec.T * spec.mu;
  if (spec.regime == Regime::NonDecreasing) kappa *= spec.c0;
  if (spec.regime == Regime::Oscillating) kappa *= spec.alpha0;

  if (std::abs(spec.G.q - 1.0) < 1e-12) {
    law.model = DecayModel::Exponential;
    law.rate = kappa / (spec.c * (1.0 + spec.G.scale));
  } else {
    law.model = DecayModel::Power;
    law.exponent = 2.0 / (spec.G.q - 1.0);
  }
  (void)profile;
  return law;
}

std::optional<DecayLaw> specialize_in_time(const DecayLaw& law, const ModulationProfile& profile,
                                           double delta) {
  DecayLaw out = law;
  out.clock = ClockKind::Time;

  // A clock growing like (1+t)^kappa turns an exponential-in-clock law
  // into a stretched one (kappa < 1 keeps it stretched, kappa = 1 plain),
  // and a log-growing clock turns it into a power law in time.
  auto specialize_power_clock = [&](double kappa) -> std::optional<DecayLaw> {
    if (kappa < 0.0 || (kappa == 0.0 && law.model != DecayModel::Exponential)) {
      return std::nullopt;
    }
    if (law.model == DecayModel::Exponential) {
      if (kappa == 0.0) {  // logarithmic clock
        out.model = DecayModel::Power;
        out.exponent = law.rate;
        return out;
      }
      if (kappa == 1.0) return out;
      out.model = DecayModel::Stretched;
      out.clock_exponent = kappa;
      out.rate = law.rate / kappa;
      return out;
    }
    if (kappa == 0.0) return std::nullopt;  // power of a logarithm
    out.exponent = law.exponent * kappa;
    return out;
  };

  switch (law.clock) {
    case ClockKind::Time:
      return out;
    case ClockKind::IntegralAlpha: {
      if (profile.kind == ModulationKind::Constant) return out;
      if (profile.kind != ModulationKind::PowerDecay) return std::nullopt;
      if (profile.sigma > 1.0) return std::nullopt;  // bounded clock, no decay statement
      return specialize_power_clock(1.0 - profile.sigma);
    }
    case ClockKind::WeightedIntegral: {
      if (profile.kind == ModulationKind::Constant) return out;
      if (profile.kind != ModulationKind::PowerGrowth) return std::nullopt;
      // alpha = (1+t)^sigma: the weighted integrand behaves like
      // (1+s)^{-sigma (delta-1)}, so the clock grows like
      // (1+t)^{1 - sigma(delta-1)} (logarithmically at equality).
      const double kappa = 1.0 - profile.sigma * (delta - 1.0);
      if (kappa < 0.0) return std::nullopt;  // bounded clock
      return specialize_power_clock(std::max(kappa, 0.0));
    }
  }
  return std::nullopt;
}

}  // namespace decaylab

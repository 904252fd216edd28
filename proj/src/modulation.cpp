#include "decaylab/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "decaylab/numerics.hpp"

namespace decaylab {

namespace {

double eval_uniform(ModulationKind kind, double value, double sigma, double a, double b,
                    double omega, double t) {
  switch (kind) {
    case ModulationKind::Constant:
      return value;
    case ModulationKind::PowerDecay:
      return std::pow(1.0 + t, -sigma);
    case ModulationKind::PowerGrowth:
      return std::pow(1.0 + t, sigma);
    case ModulationKind::Oscillating:
      return a + b * std::sin(omega * t);
    case ModulationKind::PiecewiseInSpace:
      throw std::invalid_argument("nested piecewise profile");
  }
  return value;
}

double eval_region(const ModulationProfile::Region& r, double t) {
  return eval_uniform(r.kind, r.value, r.sigma, r.a, r.b, r.omega, t);
}

void require_valid_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::domain_error("modulation: time must be finite and nonnegative");
  }
}

}  // namespace

ModulationProfile ModulationProfile::constant(double value) {
  ModulationProfile p;
  p.kind = ModulationKind::Constant;
  p.value = value;
  return p;
}

ModulationProfile ModulationProfile::power_decay(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("power_decay: sigma > 0 required");
  ModulationProfile p;
  p.kind = ModulationKind::PowerDecay;
  p.sigma = sigma;
  return p;
}

ModulationProfile ModulationProfile::power_growth(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("power_growth: sigma > 0 required");
  ModulationProfile p;
  p.kind = ModulationKind::PowerGrowth;
  p.sigma = sigma;
  return p;
}

ModulationProfile ModulationProfile::oscillating(double a, double b, double omega) {
  if (!(a - std::abs(b) > 0.0)) {
    throw std::invalid_argument("oscillating: requires a > |b| for positivity");
  }
  ModulationProfile p;
  p.kind = ModulationKind::Oscillating;
  p.a = a;
  p.b = b;
  p.omega = omega;
  return p;
}

double eval_alpha(const ModulationProfile& profile, double t, std::optional<double> x) {
  require_valid_time(t);
  if (profile.kind == ModulationKind::PiecewiseInSpace) {
    if (!x.has_value()) {
      throw std::invalid_argument("eval_alpha: piecewise profile needs a spatial point");
    }
    for (const auto& r : profile.regions) {
      if (*x >= r.lo && *x <= r.hi) return eval_region(r, t);
    }
    throw std::domain_error("eval_alpha: point outside every region");
  }
  const double v = eval_uniform(profile.kind, profile.value, profile.sigma, profile.a,
                                profile.b, profile.omega, t);
  if (!(v > 0.0)) throw std::domain_error("eval_alpha: profile not positive");
  return v;
}

double alpha_lower(const ModulationProfile& profile, double t) {
  if (profile.spatially_uniform()) return eval_alpha(profile, t);
  require_valid_time(t);
  double v = std::numeric_limits<double>::infinity();
  for (const auto& r : profile.regions) v = std::min(v, eval_region(r, t));
  return v;
}

double alpha_upper(const ModulationProfile& profile, double t) {
  if (profile.spatially_uniform()) return eval_alpha(profile, t);
  require_valid_time(t);
  double v = 0.0;
  for (const auto& r : profile.regions) v = std::max(v, eval_region(r, t));
  return v;
}

Classification classify(const ModulationProfile& profile, double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("classify: horizon > 0 required");

  switch (profile.kind) {
    case ModulationKind::Constant:
      if (!(profile.value > 0.0)) throw std::invalid_argument("classify: non-positive profile");
      // Constant = bounded case; the autonomous-rate envelope is sharpest.
      return {Regime::Oscillating, profile.value, profile.value};
    case ModulationKind::PowerDecay:
      return {Regime::NonIncreasing, std::pow(1.0 + horizon, -profile.sigma), 1.0};
    case ModulationKind::PowerGrowth:
      return {Regime::NonDecreasing, 1.0, std::pow(1.0 + horizon, profile.sigma)};
    default:
      break;
  }

  // Sampled classification for oscillating and piecewise profiles.
  const double step = std::min(1e-3, horizon / 1e5);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  bool increases = false, decreases = false;
  double prev_min = 0.0, prev_max = 0.0;
  bool first = true;
  for (double t = 0.0; t <= horizon; t += step) {
    const double vmin = alpha_lower(profile, t);
    const double vmax = alpha_upper(profile, t);
    if (!(vmin > 0.0)) throw std::invalid_argument("classify: non-positive sample");
    lo = std::min(lo, vmin);
    hi = std::max(hi, vmax);
    if (!first) {
      if (vmin > prev_min + 1e-12 || vmax > prev_max + 1e-12) increases = true;
      if (vmin < prev_min - 1e-12 || vmax < prev_max - 1e-12) decreases = true;
    }
    prev_min = vmin;
    prev_max = vmax;
    first = false;
  }
  Regime regime = Regime::Oscillating;
  if (!increases && decreases) regime = Regime::NonIncreasing;
  if (increases && !decreases) regime = Regime::NonDecreasing;
  return {regime, lo, hi};
}

double integral_alpha(const ModulationProfile& profile, double T, double t) {
  if (!(T >= 0.0) || t < T) throw std::invalid_argument("integral_alpha: requires t >= T >= 0");
  if (t == T) return 0.0;
  return num::integrate_adaptive([&](double s) { return alpha_lower(profile, s); }, T, t,
                                 1e-10, 1e-12);
}

double integral_weighted(const ModulationProfile& profile, double delta, double T, double t) {
  if (!(delta >= 2.0)) throw std::invalid_argument("integral_weighted: delta >= 2 required");
  if (!(T >= 0.0) || t < T) throw std::invalid_argument("integral_weighted: requires t >= T >= 0");
  if (t == T) return 0.0;
  return num::integrate_adaptive(
      [&](double s) {
        return alpha_upper(profile, s - T) * std::pow(alpha_upper(profile, s), -delta);
      },
      T, t, 1e-10, 1e-12);
}

double lipschitz_constant_estimate(const ModulationProfile& profile, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("lipschitz_constant_estimate: T > 0 required");
  const double h = 1e-4;
  double sup = 0.0;
  double prev = alpha_lower(profile, 0.0);
  double prev_hi = alpha_upper(profile, 0.0);
  for (double t = h; t <= T; t += h) {
    const double cur = alpha_lower(profile, t);
    const double cur_hi = alpha_upper(profile, t);
    sup = std::max(sup, std::abs(cur - prev) / h);
    sup = std::max(sup, std::abs(cur_hi - prev_hi) / h);
    prev = cur;
    prev_hi = cur_hi;
  }
  return sup;
}

double spatial_equivalence_constant(const ModulationProfile& profile, double horizon) {
  if (profile.spatially_uniform()) return 1.0;
  const double step = std::max(horizon / 1e4, 1e-3);
  double c0 = 1.0;
  for (double t = 0.0; t <= horizon; t += step) {
    const double hi = alpha_upper(profile, t);
    const double lo = alpha_lower(profile, t);
    c0 = std::min(c0, lo / hi);
  }
  return c0;
}

}  // namespace decaylab

#pragma once

#include <optional>
#include <vector>

namespace decaylab {

enum class ModulationKind { Constant, PowerDecay, PowerGrowth, Oscillating, PiecewiseInSpace };

enum class Regime { NonIncreasing, NonDecreasing, Oscillating };

/// Time(-space) damping factor alpha_j(t, x) > 0.
///
/// Kinds: constant `value`; power_decay (1+t)^{-sigma}; power_growth
/// (1+t)^{sigma}; oscillating a + b sin(omega t); piecewise_in_space, a
/// finite list of per-region time profiles over x-intervals.
struct ModulationProfile {
  ModulationKind kind = ModulationKind::Constant;
  double value = 1.0;
  double sigma = 1.0;
  double a = 2.0, b = 1.0, omega = 1.0;

  struct Region {
    double lo = 0.0, hi = 0.0;
    // Nested profile must itself be spatially uniform.
    ModulationKind kind = ModulationKind::Constant;
    double value = 1.0, sigma = 1.0, a = 2.0, b = 1.0, omega = 1.0;
  };
  std::vector<Region> regions;

  static ModulationProfile constant(double value = 1.0);
  static ModulationProfile power_decay(double sigma);
  static ModulationProfile power_growth(double sigma);
  static ModulationProfile oscillating(double a, double b, double omega);

  bool spatially_uniform() const { return kind != ModulationKind::PiecewiseInSpace; }
};

struct Classification {
  Regime regime;
  double alpha0;       // sampled lower bound over [0, horizon]
  double alpha_tilde;  // sampled upper bound over [0, horizon]
};

/// alpha(t, x); x is required for piecewise profiles and ignored otherwise.
double eval_alpha(const ModulationProfile& profile, double t,
                  std::optional<double> x = std::nullopt);

/// Regime label with sampled extreme bounds over [0, horizon]. Constant
/// profiles classify as Oscillating (bounded case), which routes them to
/// the autonomous-rate envelope.
Classification classify(const ModulationProfile& profile, double horizon);

/// Spatial reducers for piecewise profiles; identity for uniform ones.
/// The non-increasing envelope consumes the min, the non-decreasing one
/// the max.
double alpha_lower(const ModulationProfile& profile, double t);
double alpha_upper(const ModulationProfile& profile, double t);

/// Integral of alpha(s) over [T, t] (min reducer), adaptive quadrature to
/// 1e-10 absolute.
double integral_alpha(const ModulationProfile& profile, double T, double t);

/// Integral of alpha(s-T) alpha(s)^{-delta} over [T, t] (max reducer),
/// for the non-decreasing regime; delta >= 2.
double integral_weighted(const ModulationProfile& profile, double delta, double T, double t);

/// Supremum of |d alpha/dt| over [0, T], estimated by forward differences
/// on a 1e-4-step grid.
double lipschitz_constant_estimate(const ModulationProfile& profile, double T);

/// Observed spatial-equivalence constant c0 with
/// c0 * alpha_upper(t) <= alpha(t, x) over the sampled window;
/// exactly 1 for spatially uniform profiles.
double spatial_equivalence_constant(const ModulationProfile& profile, double horizon);

}  // namespace decaylab

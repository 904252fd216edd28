#pragma once

#include <cstdint>
#include <vector>

#include "decaylab/feedback.hpp"
#include "decaylab/modulation.hpp"

namespace decaylab {

/// Finite-dimensional abstract evolution u' + A(t)u = 0 with
/// A(t) v = A1 v + alpha(t) g(v) applied componentwise on a selected
/// index set; A1 is exactly skew-symmetric (built as S - S^T) and omega
/// is the declared quasi-monotonicity shift.
struct AbstractSystem {
  int dim = 4;
  std::vector<double> a1;  // row-major dim x dim, skew-symmetric
  FeedbackLaw law;
  std::vector<int> damped;  // component indices carrying the feedback
  ModulationProfile profile = ModulationProfile::constant(1.0);
  double omega = 0.0;

  void validate() const;
  /// A(t) x.
  std::vector<double> apply(double t, const std::vector<double>& x) const;
};

/// Random skew part from a seeded dense draw, scaled to unit max entry.
std::vector<double> random_skew(int dim, std::uint64_t seed, double scale = 1.0);

/// Solves y + A(t) y / n = x by damped Newton iteration; the residual is
/// driven below 1e-12 (1 + |x|). Requires n > omega.
std::vector<double> resolvent_solve(const AbstractSystem& sys, int n, double t,
                                    const std::vector<double>& x);

/// n (x - J_n(t) x), which equals A(t) J_n(t) x; the identity is checked
/// to 1e-10 and a violation raises NumericalError.
std::vector<double> yosida_apply(const AbstractSystem& sys, int n, double t,
                                 const std::vector<double>& x);

struct Trajectory {
  std::vector<double> t;
  std::vector<std::vector<double>> states;

  double sup_distance(const Trajectory& other) const;
  std::vector<double> norms() const;
};

/// Integrates the approximated problem u' + A_n(t) u = 0 by classical RK4
/// with dt <= 0.1/n, sampled on an even grid of `samples` points.
Trajectory integrate_approx(const AbstractSystem& sys, int n, const std::vector<double>& a,
                            double T, std::size_t samples = 201);

/// RK4 on u' + A(t) u = 0 directly (the n -> infinity dynamics; valid at
/// finite dimension where A(t) is Lipschitz on bounded sets).
Trajectory integrate_limit(const AbstractSystem& sys, const std::vector<double>& a, double T,
                           double dt, std::size_t samples = 201);

struct ConvergenceStudy {
  std::vector<int> n;           // smaller index of each consecutive pair
  std::vector<double> sup_err;  // sup_t |u_n - u_{2n}| style distances
  double fitted_slope = 0.0;    // log-log slope of sup_err^2 against n
  double fitted_constant = 0.0; // max of sup_err^2 / (1/m + 1/n)
};

/// Pairwise sup-distances between trajectories for consecutive entries of
/// n_list, with the scaling fit err^2 <= C (m^{-1} + n^{-1}).
ConvergenceStudy convergence_study(const AbstractSystem& sys, const std::vector<double>& a,
                                   double T, const std::vector<int>& n_list,
                                   std::size_t samples = 201);

}  // namespace decaylab

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace decaylab {

enum class FeedbackKind { PowerSaturated, Linear, CustomSampled };

/// A monotone damping nonlinearity g with its structural constants.
///
/// The power-saturated kind is g(x) = |x|^{theta-1} x for |x| <= 1 and
/// g(x) = x beyond, where theta is gamma for sublinear laws (gamma < 1)
/// and p for superlinear ones (gamma = 1, p >= 1). Both branches meet at
/// |x| = 1, so continuity there is exact by construction. For dimension
/// N > 1 the law acts radially. A law with M = 0 is the zero feedback
/// (undamped runs).
struct FeedbackLaw {
  FeedbackKind kind = FeedbackKind::Linear;
  double gamma = 1.0;  // exponent bound near 0, in (0, 1]
  double p = 1.0;      // coercivity exponent near 0, >= gamma
  double M = 1.0;      // linear growth bound |g(x)| <= M(1+|x|)
  double m = 1.0;      // coercivity at infinity x.g(x) >= m|x|^2
  int dimension = 1;
  std::vector<std::pair<double, double>> samples;  // custom_sampled table

  static FeedbackLaw linear();
  static FeedbackLaw power_saturated(double gamma, double p);
  static FeedbackLaw zero();
  static FeedbackLaw custom(std::vector<std::pair<double, double>> table);

  /// Exponent of the near-zero branch actually evaluated.
  double branch_exponent() const;

  double eval(double x) const;
  std::vector<double> eval(const std::vector<double>& x) const;

  /// eval with the near-zero branch linearized inside |x| < eps so the
  /// slope stays finite for sublinear laws; identical to eval outside.
  double eval_regularized(double x, double eps) const;
  /// Slope of eval_regularized, used by implicit solvers.
  double slope_regularized(double x, double eps) const;
};

enum class MajorantKind { Power, CustomSampled };

/// Concave increasing G with G(0) = 0 bounding |x|^2 + |g(x)|^2 by
/// G(x g(x)) near the origin. The power kind is G(x) = scale * x^{2/(q+1)}.
struct ConcaveMajorant {
  MajorantKind kind = MajorantKind::Power;
  double q = 1.0;
  double delta = 2.0;  // scaling exponent in beta^2 G(x) <= C_G G(beta^delta x)
  double c_G = 1.0;
  double scale = 1.0;
  std::vector<std::pair<double, double>> samples;  // custom kind, through (0,0)

  double eval(double x) const;
};

struct AssumptionCheck {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  std::string note;
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;
  bool all_pass = false;
  double observed_M = 0.0;
  double observed_m = 0.0;
  double observed_c0 = 0.0;
  double observed_C0 = 0.0;

  const AssumptionCheck* find(const std::string& name) const;
};

/// 2048 log-spaced points per decade over [1e-8, 1e3], sign-reflected,
/// plus 0 and +-1. Covers both the near-zero and linear-growth regimes.
std::vector<double> default_validation_grid();

/// Certifies the law (for custom tables: the interpolant) against the
/// structural assumptions on a sample grid, reporting the tightest
/// constants observed. The grid must span [-R, R] with R >= 2 and contain
/// 0 and +-1.
ValidationReport validate_feedback(const FeedbackLaw& law, const std::vector<double>& grid);

/// Majorant for a law with known exponents: q = (p+1)/gamma - 1,
/// delta = q + 1, C_G = 1. The amplitude is 1 + C0^2 (= 2 for the shipped
/// kinds, where C0 = 1) so the near-zero bound holds pointwise. Exponent
/// pairs with q < 1 fall back to the linear-regime majorant G(x) = x.
ConcaveMajorant concave_majorant_for(double gamma, double p);
ConcaveMajorant concave_majorant_for(const FeedbackLaw& law);

/// True iff beta^2 G(x) <= C_G G(beta^delta x) at every sample pair,
/// within relative tolerance 1e-12.
bool check_prop_g(const ConcaveMajorant& g,
                  const std::vector<std::pair<double, double>>& beta_x_samples);

}  // namespace decaylab

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace decaylab::num {

struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when an adaptive integrator cannot make progress; carries the
/// time at which the step size underflowed.
struct StiffnessError : NumericsError {
  StiffnessError(const std::string& what, double t) : NumericsError(what), t_fail(t) {}
  double t_fail;
};

using ScalarFn = std::function<double(double)>;

/// Adaptive Simpson quadrature of f over [a, b].
///
/// The panel acceptance test combines an absolute budget (split in half per
/// bisection) with a relative floor against a coarse composite estimate, so
/// integrals of very different magnitudes are handled with one call site.
double integrate_adaptive(const ScalarFn& f, double a, double b,
                          double abs_tol = 1e-10, double rel_tol = 1e-12,
                          int max_depth = 60);

/// Bisection inverse of a non-decreasing function: returns x in [lo, hi]
/// with f(x) = target to relative tolerance rel_tol on x.
double invert_increasing(const ScalarFn& f, double target, double lo, double hi,
                         double rel_tol = 1e-12, int max_iter = 200);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope*x with coefficient of
/// determination on the same points.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Tridiagonal solver with the factorization cached across solves.
class Tridiagonal {
 public:
  Tridiagonal() = default;
  Tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper);

  std::size_t size() const { return diag_.size(); }
  /// Solves in place; rhs.size() must equal size().
  void solve(std::vector<double>& rhs) const;

 private:
  std::vector<double> lower_, diag_, upper_;
  std::vector<double> c_prime_;  // scaled superdiagonal from forward elimination
  std::vector<double> inv_d_;    // reciprocal pivots
};

/// Dense LU solve with partial pivoting; a is row-major n*n and is destroyed.
void lu_solve_inplace(std::vector<double>& a, int n, std::vector<double>& b);

struct OdeSamples {
  std::vector<double> t;
  std::vector<double> y;
};

/// Adaptive Cash-Karp 4(5) integration of a scalar ODE y' = rhs(t, y),
/// sampled exactly at out_times (which must be increasing and start at t0).
/// With enforce_positive, steps producing y <= 0 are rejected and retried
/// with a smaller h.
OdeSamples integrate_scalar_ode(const std::function<double(double, double)>& rhs,
                                double t0, double y0, const std::vector<double>& out_times,
                                double rel_tol = 1e-10, double abs_tol = 0.0,
                                bool enforce_positive = false);

using VectorField = std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

/// One classical RK4 step on a vector state, in place.
void rk4_step(const VectorField& rhs, double t, std::vector<double>& y, double dt);

/// Deterministic uniform draws built directly on the mt19937_64 stream so
/// outputs are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double symmetric(double amp) { return uniform(-amp, amp); }

 private:
  std::mt19937_64 eng_;
};

inline double sqr(double x) { return x * x; }

}  // namespace decaylab::num

#include "decaylab/kato.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "decaylab/numerics.hpp"
#include "decaylab/waves.hpp"  // NumericalError

namespace decaylab {

namespace {

constexpr double kEps = 1e-12;  // regularization radius for sublinear slopes

double norm2(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

void AbstractSystem::validate() const {
  if (dim < 1) throw std::invalid_argument("AbstractSystem: dim >= 1 required");
  if (static_cast<int>(a1.size()) != dim * dim) {
    throw std::invalid_argument("AbstractSystem: A1 must be dim x dim");
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (a1[i * dim + j] + a1[j * dim + i] != 0.0) {
        throw std::invalid_argument("AbstractSystem: A1 must be exactly skew-symmetric");
      }
    }
  }
  for (int idx : damped) {
    if (idx < 0 || idx >= dim) throw std::invalid_argument("AbstractSystem: bad damped index");
  }
  if (omega < 0.0) throw std::invalid_argument("AbstractSystem: omega >= 0 required");
}

std::vector<double> AbstractSystem::apply(double t, const std::vector<double>& x) const {
  std::vector<double> out(dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    double acc = 0.0;
    for (int j = 0; j < dim; ++j) acc += a1[i * dim + j] * x[j];
    out[i] = acc;
  }
  const double alpha = eval_alpha(profile, t);
  for (int idx : damped) out[idx] += alpha * law.eval_regularized(x[idx], kEps);
  return out;
}

std::vector<double> random_skew(int dim, std::uint64_t seed, double scale) {
  num::Rng rng(seed);
  std::vector<double> s(dim * dim);
  for (auto& v : s) v = rng.symmetric(1.0);
  std::vector<double> a(dim * dim);
  double peak = 0.0;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      a[i * dim + j] = s[i * dim + j] - s[j * dim + i];
      peak = std::max(peak, std::abs(a[i * dim + j]));
    }
  }
  if (peak > 0.0) {
    for (auto& v : a) v *= scale / peak;
  }
  return a;
}

namespace {

// Root of y + w g(y) = c for monotone g: safeguarded Newton with the
// bracket [min(0, c), max(0, c)], which always contains the root since
// y + w g(y) is increasing and vanishes at 0.
double scalar_resolvent(const FeedbackLaw& law, const std::vector<int>& damped, int idx,
                        double w, double c) {
  const bool is_damped = std::find(damped.begin(), damped.end(), idx) != damped.end();
  if (!is_damped || law.M == 0.0) return c;
  double lo = std::min(0.0, c);
  double hi = std::max(0.0, c);
  double y = c / (1.0 + w);  // linear-law guess
  const double tol = 1e-15 * (1.0 + std::abs(c));
  for (int it = 0; it < 200; ++it) {
    const double f = y + w * law.eval_regularized(y, kEps) - c;
    if (std::abs(f) <= tol) return y;
    if (f > 0.0) {
      hi = y;
    } else {
      lo = y;
    }
    const double slope = 1.0 + w * law.slope_regularized(y, kEps);
    double y_next = y - f / slope;
    if (!(y_next > lo && y_next < hi)) y_next = 0.5 * (lo + hi);
    if (y_next == y) break;
    y = y_next;
  }
  return y;
}

}  // namespace

std::vector<double> resolvent_solve(const AbstractSystem& sys, int n, double t,
                                    const std::vector<double>& x) {
  sys.validate();
  if (!(static_cast<double>(n) > sys.omega)) {
    throw std::invalid_argument("resolvent_solve: requires n > omega");
  }
  const int dim = sys.dim;
  if (static_cast<int>(x.size()) != dim) {
    throw std::invalid_argument("resolvent_solve: state size mismatch");
  }
  const double inv_n = 1.0 / n;
  const double alpha = eval_alpha(sys.profile, t);
  const double target = 1e-12 * (1.0 + norm2(x));

  auto residual = [&](const std::vector<double>& y, std::vector<double>& r) {
    const auto ay = sys.apply(t, y);
    for (int i = 0; i < dim; ++i) r[i] = y[i] + inv_n * ay[i] - x[i];
  };

  std::vector<double> y = x;  // warm start at the identity resolvent
  std::vector<double> r(dim), r_try(dim), jac(dim * dim), step(dim), y_try(dim);
  residual(y, r);
  double rn = norm2(r);

  // Damped Newton, fast near the solution.
  for (int it = 0; it < 100 && rn > target; ++it) {
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) jac[i * dim + j] = inv_n * sys.a1[i * dim + j];
      jac[i * dim + i] += 1.0;
    }
    for (int idx : sys.damped) {
      jac[idx * dim + idx] += inv_n * alpha * sys.law.slope_regularized(y[idx], kEps);
    }
    step = r;
    num::lu_solve_inplace(jac, dim, step);
    double lambda = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 40; ++bt) {
      for (int i = 0; i < dim; ++i) y_try[i] = y[i] - lambda * step[i];
      residual(y_try, r_try);
      const double rn_try = norm2(r_try);
      if (rn_try <= (1.0 - 1e-4 * lambda) * rn || rn_try <= target) {
        y = y_try;
        r = r_try;
        rn = rn_try;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;  // near-flat branch; fall through to the splitting
  }
  if (rn <= target) return y;

  // Splitting fallback: freeze the skew coupling, solve the diagonal
  // monotone equations exactly, repeat. Contracts at rate |A1|/n, and the
  // scalar solves are bracketed, so this converges where Newton stalls on
  // the flat side of a sublinear branch.
  for (int it = 0; it < 400 && rn > target; ++it) {
    for (int i = 0; i < dim; ++i) {
      double coupling = 0.0;
      for (int j = 0; j < dim; ++j) coupling += sys.a1[i * dim + j] * y[j];
      y_try[i] = scalar_resolvent(sys.law, sys.damped, i, inv_n * alpha,
                                  x[i] - inv_n * coupling);
    }
    y.swap(y_try);
    residual(y, r);
    rn = norm2(r);
  }
  if (rn <= target) return y;
  throw NumericalError("resolvent_solve: iteration did not converge (invariant violation?)");
}

std::vector<double> yosida_apply(const AbstractSystem& sys, int n, double t,
                                 const std::vector<double>& x) {
  const auto jn = resolvent_solve(sys, n, t, x);
  std::vector<double> out(sys.dim);
  for (int i = 0; i < sys.dim; ++i) out[i] = n * (x[i] - jn[i]);
  const auto a_jn = sys.apply(t, jn);
  double dev = 0.0;
  for (int i = 0; i < sys.dim; ++i) dev = std::max(dev, std::abs(out[i] - a_jn[i]));
  if (dev > 1e-10 * (1.0 + norm2(x))) {
    throw NumericalError("yosida_apply: identity n(x - J_n x) = A J_n x violated");
  }
  return out;
}

double Trajectory::sup_distance(const Trajectory& other) const {
  if (t.size() != other.t.size()) {
    throw std::invalid_argument("sup_distance: mismatched sample grids");
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < states[k].size(); ++i) {
      d2 += num::sqr(states[k][i] - other.states[k][i]);
    }
    worst = std::max(worst, std::sqrt(d2));
  }
  return worst;
}

std::vector<double> Trajectory::norms() const {
  std::vector<double> out(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) out[k] = norm2(states[k]);
  return out;
}

namespace {

Trajectory integrate_rk4_sampled(const num::VectorField& rhs, const std::vector<double>& a,
                                 double T, double dt_cap, std::size_t samples) {
  if (!(T > 0.0) || samples < 2) throw std::invalid_argument("integrate: bad horizon or grid");
  Trajectory out;
  out.t.resize(samples);
  out.states.reserve(samples);
  std::vector<double> y = a;
  out.t[0] = 0.0;
  out.states.push_back(y);
  const double out_dt = T / static_cast<double>(samples - 1);
  const int sub = std::max(1, static_cast<int>(std::ceil(out_dt / dt_cap)));
  const double dt = out_dt / sub;
  double t = 0.0;
  for (std::size_t k = 1; k < samples; ++k) {
    for (int s = 0; s < sub; ++s) {
      num::rk4_step(rhs, t, y, dt);
      t += dt;
    }
    out.t[k] = t;
    out.states.push_back(y);
  }
  return out;
}

}  // namespace

Trajectory integrate_approx(const AbstractSystem& sys, int n, const std::vector<double>& a,
                            double T, std::size_t samples) {
  sys.validate();
  if (!(static_cast<double>(n) > sys.omega)) {
    throw std::invalid_argument("integrate_approx: requires n > omega");
  }
  auto rhs = [&sys, n](double t, const std::vector<double>& y, std::vector<double>& dy) {
    const auto jn = resolvent_solve(sys, n, t, y);
    for (int i = 0; i < sys.dim; ++i) dy[i] = -n * (y[i] - jn[i]);
  };
  // A_n is globally Lipschitz with constant O(n); keep dt below 0.1/n.
  return integrate_rk4_sampled(rhs, a, T, 0.1 / n, samples);
}

Trajectory integrate_limit(const AbstractSystem& sys, const std::vector<double>& a, double T,
                           double dt, std::size_t samples) {
  sys.validate();
  auto rhs = [&sys](double t, const std::vector<double>& y, std::vector<double>& dy) {
    const auto ay = sys.apply(t, y);
    for (int i = 0; i < sys.dim; ++i) dy[i] = -ay[i];
  };
  return integrate_rk4_sampled(rhs, a, T, dt, samples);
}

ConvergenceStudy convergence_study(const AbstractSystem& sys, const std::vector<double>& a,
                                   double T, const std::vector<int>& n_list,
                                   std::size_t samples) {
  if (n_list.size() < 2) throw std::invalid_argument("convergence_study: need >= 2 levels");
  for (std::size_t i = 0; i + 1 < n_list.size(); ++i) {
    if (n_list[i + 1] <= n_list[i]) {
      throw std::invalid_argument("convergence_study: n_list must increase");
    }
  }
  std::vector<Trajectory> runs;
  runs.reserve(n_list.size());
  for (int n : n_list) runs.push_back(integrate_approx(sys, n, a, T, samples));

  ConvergenceStudy study;
  std::vector<double> log_n, log_err2;
  for (std::size_t i = 0; i + 1 < n_list.size(); ++i) {
    const double err = runs[i].sup_distance(runs[i + 1]);
    study.n.push_back(n_list[i]);
    study.sup_err.push_back(err);
    const double bound_scale = 1.0 / n_list[i] + 1.0 / n_list[i + 1];
    study.fitted_constant = std::max(study.fitted_constant, err * err / bound_scale);
    if (err > 0.0) {
      log_n.push_back(std::log(static_cast<double>(n_list[i])));
      log_err2.push_back(2.0 * std::log(err));
    }
  }
  if (log_n.size() >= 2) {
    study.fitted_slope = num::fit_line(log_n, log_err2).slope;
  }
  return study;
}

}  // namespace decaylab

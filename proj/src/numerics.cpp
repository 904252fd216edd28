#include "decaylab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace decaylab::num {

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const ScalarFn& f, double a, double fa, double b, double fb, double m,
             double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const ScalarFn& f, double a, double b, double abs_tol,
                          double rel_tol, int max_depth) {
  if (!(a <= b)) throw NumericsError("integrate_adaptive: reversed interval");
  if (a == b) return 0.0;

  // Coarse composite pass to scale the relative part of the tolerance.
  const int pre = 32;
  double coarse = 0.0;
  const double h = (b - a) / pre;
  double fl = f(a);
  for (int i = 0; i < pre; ++i) {
    const double xr = a + (i + 1) * h;
    const double xm = a + (i + 0.5) * h;
    const double fr = f(xr);
    coarse += simpson(fl, f(xm), fr, h);
    fl = fr;
  }
  const double tol = std::max(abs_tol, rel_tol * std::abs(coarse));

  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = simpson(fa, fm, fb, b - a);
  return adapt(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double invert_increasing(const ScalarFn& f, double target, double lo, double hi,
                         double rel_tol, int max_iter) {
  if (!(lo <= hi)) throw NumericsError("invert_increasing: bad bracket");
  double flo = f(lo);
  double fhi = f(hi);
  if (flo > target && !(std::abs(flo - target) <= 1e-12 * (1.0 + std::abs(target)))) {
    throw NumericsError("invert_increasing: target below bracket");
  }
  if (fhi < target && !(std::abs(fhi - target) <= 1e-12 * (1.0 + std::abs(target)))) {
    throw NumericsError("invert_increasing: target above bracket");
  }
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max({std::abs(lo), std::abs(hi), 1e-300})) break;
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit out;
  out.n = x.size();
  if (x.size() != y.size() || x.size() < 2) {
    throw NumericsError("fit_line: need at least two matched points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw NumericsError("fit_line: degenerate abscissa");
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  if (syy == 0.0) {
    out.r2 = 1.0;
  } else {
    double ssres = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      ssres += sqr(y[i] - (out.intercept + out.slope * x[i]));
    }
    out.r2 = std::clamp(1.0 - ssres / syy, 0.0, 1.0);
  }
  return out;
}

Tridiagonal::Tridiagonal(std::vector<double> lower, std::vector<double> diag,
                         std::vector<double> upper)
    : lower_(std::move(lower)), diag_(std::move(diag)), upper_(std::move(upper)) {
  const std::size_t n = diag_.size();
  if (n == 0 || lower_.size() != n - 1 || upper_.size() != n - 1) {
    throw NumericsError("Tridiagonal: inconsistent band sizes");
  }
  c_prime_.resize(n - 1);
  inv_d_.resize(n);
  double d = diag_[0];
  if (d == 0.0) throw NumericsError("Tridiagonal: zero pivot");
  inv_d_[0] = 1.0 / d;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    c_prime_[i] = upper_[i] * inv_d_[i];
    d = diag_[i + 1] - lower_[i] * c_prime_[i];
    if (d == 0.0) throw NumericsError("Tridiagonal: zero pivot");
    inv_d_[i + 1] = 1.0 / d;
  }
}

void Tridiagonal::solve(std::vector<double>& rhs) const {
  const std::size_t n = diag_.size();
  if (rhs.size() != n) throw NumericsError("Tridiagonal: rhs size mismatch");
  rhs[0] *= inv_d_[0];
  for (std::size_t i = 1; i < n; ++i) {
    rhs[i] = (rhs[i] - lower_[i - 1] * rhs[i - 1]) * inv_d_[i];
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] -= c_prime_[i] * rhs[i + 1];
  }
}

void lu_solve_inplace(std::vector<double>& a, int n, std::vector<double>& b) {
  if (static_cast<int>(a.size()) != n * n || static_cast<int>(b.size()) != n) {
    throw NumericsError("lu_solve_inplace: size mismatch");
  }
  std::vector<int> piv(n);
  for (int i = 0; i < n; ++i) piv[i] = i;
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(a[k * n + k]);
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(a[i * n + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best == 0.0) throw NumericsError("lu_solve_inplace: singular matrix");
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
      std::swap(b[k], b[p]);
    }
    const double inv = 1.0 / a[k * n + k];
    for (int i = k + 1; i < n; ++i) {
      const double factor = a[i * n + k] * inv;
      a[i * n + k] = factor;
      for (int j = k + 1; j < n; ++j) a[i * n + j] -= factor * a[k * n + j];
      b[i] -= factor * b[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[i * n + j] * b[j];
    b[i] = s / a[i * n + i];
  }
}

OdeSamples integrate_scalar_ode(const std::function<double(double, double)>& rhs,
                                double t0, double y0, const std::vector<double>& out_times,
                                double rel_tol, double abs_tol, bool enforce_positive) {
  OdeSamples out;
  out.t.reserve(out_times.size());
  out.y.reserve(out_times.size());

  double t = t0;
  double y = y0;
  double h = 0.0;

  for (double target : out_times) {
    if (target < t - 1e-14 * std::max(1.0, std::abs(t))) {
      throw NumericsError("integrate_scalar_ode: out_times not increasing");
    }
    while (t < target) {
      if (h <= 0.0) h = std::max((target - t) * 1e-3, 1e-8);
      h = std::min(h, target - t);
      // Cash-Karp embedded pair.
      const double k1 = rhs(t, y);
      const double k2 = rhs(t + h / 5.0, y + h * (k1 / 5.0));
      const double k3 = rhs(t + 3.0 * h / 10.0, y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
      const double k4 =
          rhs(t + 3.0 * h / 5.0, y + h * (3.0 / 10.0 * k1 - 9.0 / 10.0 * k2 + 6.0 / 5.0 * k3));
      const double k5 = rhs(
          t + h, y + h * (-11.0 / 54.0 * k1 + 5.0 / 2.0 * k2 - 70.0 / 27.0 * k3 + 35.0 / 27.0 * k4));
      const double k6 =
          rhs(t + 7.0 * h / 8.0,
              y + h * (1631.0 / 55296.0 * k1 + 175.0 / 512.0 * k2 + 575.0 / 13824.0 * k3 +
                       44275.0 / 110592.0 * k4 + 253.0 / 4096.0 * k5));
      const double y5 =
          y + h * (37.0 / 378.0 * k1 + 250.0 / 621.0 * k3 + 125.0 / 594.0 * k4 + 512.0 / 1771.0 * k6);
      const double y4 = y + h * (2825.0 / 27648.0 * k1 + 18575.0 / 48384.0 * k3 +
                                 13525.0 / 55296.0 * k4 + 277.0 / 14336.0 * k5 + 0.25 * k6);
      const double err = std::abs(y5 - y4);
      const double tol = abs_tol + rel_tol * std::max(std::abs(y), std::abs(y5));
      const bool positive_ok = !enforce_positive || y5 > 0.0;
      if ((err <= tol && positive_ok) || h <= 1e-14 * std::max(1.0, std::abs(t))) {
        if (h <= 1e-14 * std::max(1.0, std::abs(t)) && (err > tol || !positive_ok)) {
          throw StiffnessError("integrate_scalar_ode: step size underflow", t);
        }
        t += h;
        y = y5;
        if (err > 0.0) {
          h *= std::clamp(0.9 * std::pow(tol / err, 0.2), 0.2, 5.0);
        } else {
          h *= 5.0;
        }
      } else {
        h *= std::clamp(0.9 * std::pow(tol / std::max(err, 1e-300), 0.25), 0.1, 0.5);
      }
    }
    out.t.push_back(target);
    out.y.push_back(y);
  }
  return out;
}

void rk4_step(const VectorField& rhs, double t, std::vector<double>& y, double dt) {
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  rhs(t, y, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  rhs(t + 0.5 * dt, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  rhs(t + 0.5 * dt, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
  rhs(t + dt, tmp, k4);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

}  // namespace decaylab::num

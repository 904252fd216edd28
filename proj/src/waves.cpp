#include "decaylab/waves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "decaylab/numerics.hpp"

namespace decaylab {

namespace {

constexpr double kSolveTol = 1e-12;       // relative fixed-point tolerance per step
constexpr double kRegularization = 1e-12;  // smoothing radius for sublinear laws

double sigma_at(const std::vector<SigmaInterval>& intervals, double x) {
  if (intervals.empty()) return 1.0;
  double v = 0.0;
  for (const auto& iv : intervals) {
    if (x >= iv.lo && x <= iv.hi) v = std::max(v, iv.value);
  }
  return v;
}

}  // namespace

SemiDiscreteSystem::SemiDiscreteSystem(const SystemConfig& config, FeedbackLaw law,
                                       ModulationProfile profile)
    : model_(config.model), n_(config.n_nodes), length_(config.length), law_(std::move(law)),
      profile_(std::move(profile)) {
  if (n_ < 3) throw ConfigError("system: need at least 3 grid nodes");
  if (!(length_ > 0.0)) throw ConfigError("system: positive domain length required");
  dx_ = length_ / (n_ - 1);
  alpha_uniform_ = profile_.spatially_uniform();

  switch (model_) {
    case WaveModel::Interior:
      bc_ = BoundaryKind::DirichletBoth;
      break;
    case WaveModel::Boundary:
      bc_ = BoundaryKind::DirichletLeftDampedRight;
      if (!(config.k > 0.0)) throw ConfigError("boundary model: damping gain k > 0 required");
      if (config.a < 0.0) throw ConfigError("boundary model: a >= 0 required");
      boundary_gain_ = config.k;
      break;
    case WaveModel::Pointwise:
      bc_ = BoundaryKind::DirichletLeftNeumannRight;
      if (!(config.xi > 0.0 && config.xi < length_)) {
        throw ConfigError("pointwise model: actuator must be strictly interior");
      }
      break;
  }

  // Free nodes: interior nodes always; the right end when it is not Dirichlet.
  const bool right_free = bc_ != BoundaryKind::DirichletBoth;
  const int m = right_free ? n_ - 1 : n_ - 2;
  xs_.resize(m);
  for (int i = 0; i < m; ++i) xs_[i] = (i + 1) * dx_;

  mass_.assign(m, dx_);
  if (right_free) mass_.back() = 0.5 * dx_;

  // Quadratic form sum_edges (du/dx)^2 dx [+ a u(L)^2], assembled on free nodes.
  stiff_diag_.assign(m, 2.0 / dx_);
  stiff_off_.assign(m - 1, -1.0 / dx_);
  if (right_free) {
    stiff_diag_.back() = 1.0 / dx_ + (model_ == WaveModel::Boundary ? config.a : 0.0);
  }

  if (model_ == WaveModel::Interior) {
    site_weight_.assign(m, 0.0);
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      const double s = sigma_at(config.sigma, xs_[i]);
      if (s < 0.0) throw ConfigError("interior model: sigma >= 0 required");
      site_weight_[i] = s * mass_[i];
      total += s;
    }
    if (total == 0.0) throw ConfigError("interior model: sigma vanishes everywhere");
    any_damping_ = true;
  } else if (model_ == WaveModel::Pointwise) {
    const double pos = config.xi / dx_;  // in units of the full grid, node 0 at x=0
    const int left_full = std::min(static_cast<int>(std::floor(pos)), n_ - 2);
    const double lam = 1.0 - (pos - left_full);  // barycentric weight of the left node
    if (left_full == 0) {
      // Left neighbor is the Dirichlet end; its hat weight acts on u = 0.
      pw_il_ = pw_ir_ = 0;
      pw_wl_ = 0.0;
      pw_wr_ = 1.0 - lam;
    } else {
      pw_il_ = static_cast<std::size_t>(left_full - 1);
      pw_ir_ = pw_il_ + 1;
      pw_wl_ = lam;
      pw_wr_ = 1.0 - lam;
    }
    any_damping_ = true;
  } else {
    any_damping_ = true;
  }
}

std::string SemiDiscreteSystem::descriptor() const {
  std::ostringstream os;
  switch (model_) {
    case WaveModel::Interior:
      os << "wave_interior";
      break;
    case WaveModel::Boundary:
      os << "wave_boundary";
      break;
    case WaveModel::Pointwise:
      os << "string_pointwise";
      break;
  }
  os << " n=" << n_ << " L=" << length_;
  return os.str();
}

State SemiDiscreteSystem::make_state(const std::function<double(double)>& u0,
                                     const std::function<double(double)>& v0) const {
  State s;
  s.u.resize(dof());
  s.v.resize(dof());
  for (std::size_t i = 0; i < dof(); ++i) {
    s.u[i] = u0(xs_[i]);
    s.v[i] = v0(xs_[i]);
    if (!std::isfinite(s.u[i]) || !std::isfinite(s.v[i])) {
      throw ConfigError("initial data: non-finite sample");
    }
  }
  return s;
}

State SemiDiscreteSystem::random_state(std::uint64_t seed, int modes, bool normalize) const {
  num::Rng rng(seed);
  // Smooth random data compatible with the left Dirichlet end; mode shapes
  // are chosen so per-mode energies have comparable scale.
  const double L = length_;
  const bool dirichlet_right = bc_ == BoundaryKind::DirichletBoth;
  std::vector<double> au(modes), av(modes), freq(modes);
  for (int k = 0; k < modes; ++k) {
    freq[k] = dirichlet_right ? (k + 1) * M_PI / L : (k + 0.5) * M_PI / L;
    au[k] = rng.symmetric(1.0) / freq[k];
    av[k] = rng.symmetric(1.0);
  }
  State s = make_state(
      [&](double x) {
        double acc = 0.0;
        for (int k = 0; k < modes; ++k) acc += au[k] * std::sin(freq[k] * x);
        return acc;
      },
      [&](double x) {
        double acc = 0.0;
        for (int k = 0; k < modes; ++k) acc += av[k] * std::sin(freq[k] * x);
        return acc;
      });
  if (normalize) {
    const double e = energy(s);
    if (e > 0.0) {
      const double f = 1.0 / std::sqrt(e);
      for (auto& x : s.u) x *= f;
      for (auto& x : s.v) x *= f;
    }
  }
  return s;
}

double SemiDiscreteSystem::energy(const State& s) const {
  if (s.u.size() != dof() || s.v.size() != dof()) {
    throw std::invalid_argument("energy: state does not match the system");
  }
  double pot = num::sqr(s.u.front()) / dx_;  // edge to the Dirichlet left end
  for (std::size_t i = 0; i + 1 < dof(); ++i) pot += num::sqr(s.u[i + 1] - s.u[i]) / dx_;
  if (bc_ == BoundaryKind::DirichletBoth) {
    pot += num::sqr(s.u.back()) / dx_;  // edge to the right end
  } else if (model_ == WaveModel::Boundary) {
    pot += (stiff_diag_.back() - 1.0 / dx_) * num::sqr(s.u.back());  // a u(L)^2
  }
  double kin = 0.0;
  for (std::size_t i = 0; i < dof(); ++i) kin += mass_[i] * num::sqr(s.v[i]);
  return 0.5 * (pot + kin);
}

std::vector<double> SemiDiscreteSystem::stiffness_apply(const std::vector<double>& u) const {
  const std::size_t m = dof();
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = stiff_diag_[i] * u[i];
    if (i > 0) acc += stiff_off_[i - 1] * u[i - 1];
    if (i + 1 < m) acc += stiff_off_[i] * u[i + 1];
    out[i] = acc;
  }
  return out;
}

SemiDiscreteSystem::PointwiseStencil SemiDiscreteSystem::pointwise_stencil() const {
  if (model_ != WaveModel::Pointwise) {
    throw std::invalid_argument("pointwise_stencil: not a pointwise system");
  }
  return {pw_il_, pw_ir_, pw_wl_, pw_wr_};
}

void SemiDiscreteSystem::damping_force(double t, const std::vector<double>& v,
                                       std::vector<double>& out) const {
  std::fill(out.begin(), out.end(), 0.0);
  switch (model_) {
    case WaveModel::Interior: {
      const double au = alpha_uniform_ ? eval_alpha(profile_, t) : 0.0;
      for (std::size_t i = 0; i < dof(); ++i) {
        if (site_weight_[i] == 0.0) continue;
        const double alpha = alpha_uniform_ ? au : eval_alpha(profile_, t, xs_[i]);
        out[i] = alpha * site_weight_[i] * law_.eval_regularized(v[i], kRegularization);
      }
      break;
    }
    case WaveModel::Boundary: {
      const double alpha = eval_alpha(profile_, t);
      out.back() = alpha * boundary_gain_ * law_.eval_regularized(v.back(), kRegularization);
      break;
    }
    case WaveModel::Pointwise: {
      const double alpha = eval_alpha(profile_, t);
      const double v_xi = pw_wl_ * v[pw_il_] + pw_wr_ * v[pw_ir_];
      const double g = alpha * law_.eval_regularized(v_xi, kRegularization);
      out[pw_il_] += pw_wl_ * g;
      out[pw_ir_] += pw_wr_ * g;
      break;
    }
  }
}

double SemiDiscreteSystem::dissipation_rate(const State& s, double t) const {
  switch (model_) {
    case WaveModel::Interior: {
      double acc = 0.0;
      const double au = alpha_uniform_ ? eval_alpha(profile_, t) : 0.0;
      for (std::size_t i = 0; i < dof(); ++i) {
        if (site_weight_[i] == 0.0) continue;
        const double alpha = alpha_uniform_ ? au : eval_alpha(profile_, t, xs_[i]);
        acc += alpha * site_weight_[i] * law_.eval(s.v[i]) * s.v[i];
      }
      return acc;
    }
    case WaveModel::Boundary: {
      const double vL = s.v.back();
      return eval_alpha(profile_, t) * boundary_gain_ * law_.eval(vL) * vL;
    }
    case WaveModel::Pointwise: {
      const double v_xi = pw_wl_ * s.v[pw_il_] + pw_wr_ * s.v[pw_ir_];
      return eval_alpha(profile_, t) * law_.eval(v_xi) * v_xi;
    }
  }
  return 0.0;
}

void SemiDiscreteSystem::refactor(double dt) const {
  const std::size_t m = dof();
  op_lower_.resize(m - 1);
  op_diag_.resize(m);
  op_upper_.resize(m - 1);
  const double w = 0.5 * dt * dt;
  for (std::size_t i = 0; i < m; ++i) op_diag_[i] = 2.0 * mass_[i] + w * stiff_diag_[i];
  for (std::size_t i = 0; i + 1 < m; ++i) {
    op_lower_[i] = w * stiff_off_[i];
    op_upper_[i] = w * stiff_off_[i];
  }
  cached_dt_ = dt;
}

SemiDiscreteSystem::StepStats SemiDiscreteSystem::step(State& s, double t, double dt) const {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt > 0 required");
  if (dt > dt_max() * (1.0 + 1e-12)) throw ConfigError("step: dt exceeds dt_max = 0.5 dx");
  const std::size_t m = dof();
  if (cached_dt_ != dt) refactor(dt);

  const double t_mid = t + 0.5 * dt;
  const auto Au = stiffness_apply(s.u);
  std::vector<double> rhs0(m);
  double rhs_scale = 1e-30;
  for (std::size_t i = 0; i < m; ++i) {
    rhs0[i] = 2.0 * mass_[i] * s.v[i] - dt * Au[i];
    rhs_scale = std::max(rhs_scale, std::abs(rhs0[i]));
  }

  // Midpoint system (2M + dt^2/2 A) v + dt B(t_mid, v) = rhs0, solved by
  // Newton with the exact tridiagonal Jacobian (every damping stencil is
  // at most an adjacent pair, so it stays inside the band); monotone g
  // keeps the Jacobian positive definite.
  std::vector<double> v_mid = s.v;  // warm start
  std::vector<double> force(m), res(m), res_try(m), delta(m), v_try(m);
  std::vector<double> jl(m - 1), jd(m), ju(m - 1);

  auto residual = [&](const std::vector<double>& v, std::vector<double>& r) {
    damping_force(t_mid, v, force);
    for (std::size_t i = 0; i < m; ++i) {
      double acc = op_diag_[i] * v[i];
      if (i > 0) acc += op_lower_[i - 1] * v[i - 1];
      if (i + 1 < m) acc += op_upper_[i] * v[i + 1];
      r[i] = acc + dt * force[i] - rhs0[i];
    }
    double norm = 0.0;
    for (double x : r) norm = std::max(norm, std::abs(x));
    return norm;
  };

  auto damping_jacobian = [&](const std::vector<double>& v) {
    std::copy(op_lower_.begin(), op_lower_.end(), jl.begin());
    std::copy(op_diag_.begin(), op_diag_.end(), jd.begin());
    std::copy(op_upper_.begin(), op_upper_.end(), ju.begin());
    switch (model_) {
      case WaveModel::Interior: {
        const double au = alpha_uniform_ ? eval_alpha(profile_, t_mid) : 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          if (site_weight_[i] == 0.0) continue;
          const double alpha = alpha_uniform_ ? au : eval_alpha(profile_, t_mid, xs_[i]);
          jd[i] += dt * alpha * site_weight_[i] * law_.slope_regularized(v[i], kRegularization);
        }
        break;
      }
      case WaveModel::Boundary: {
        jd[m - 1] += dt * eval_alpha(profile_, t_mid) * boundary_gain_ *
                     law_.slope_regularized(v[m - 1], kRegularization);
        break;
      }
      case WaveModel::Pointwise: {
        const double v_xi = pw_wl_ * v[pw_il_] + pw_wr_ * v[pw_ir_];
        const double gp = dt * eval_alpha(profile_, t_mid) *
                          law_.slope_regularized(v_xi, kRegularization);
        jd[pw_il_] += gp * pw_wl_ * pw_wl_;
        jd[pw_ir_] += gp * pw_wr_ * pw_wr_;
        if (pw_ir_ == pw_il_ + 1) {
          jl[pw_il_] += gp * pw_wl_ * pw_wr_;
          ju[pw_il_] += gp * pw_wl_ * pw_wr_;
        }
        break;
      }
    }
  };

  StepStats stats;
  double rnorm = residual(v_mid, res);
  const double tol = kSolveTol * rhs_scale;
  bool converged = rnorm <= tol;
  for (int it = 0; it < 100 && !converged; ++it) {
    ++stats.iterations;
    damping_jacobian(v_mid);
    delta = res;
    num::Tridiagonal(jl, jd, ju).solve(delta);
    double lam = 1.0;
    for (int bt = 0; bt < 40; ++bt) {
      for (std::size_t i = 0; i < m; ++i) v_try[i] = v_mid[i] - lam * delta[i];
      const double rn_try = residual(v_try, res_try);
      if (rn_try <= (1.0 - 1e-4 * lam) * rnorm || rn_try <= tol) {
        v_mid.swap(v_try);
        res.swap(res_try);
        rnorm = rn_try;
        break;
      }
      lam *= 0.5;
    }
    converged = rnorm <= tol;
  }
  if (!converged) throw NumericalError("step: damping fixed-point did not converge");

  damping_force(t_mid, v_mid, force);
  double diss = 0.0;
  for (std::size_t i = 0; i < m; ++i) diss += v_mid[i] * force[i];
  stats.dissipated = dt * diss;

  for (std::size_t i = 0; i < m; ++i) {
    s.u[i] += dt * v_mid[i];
    s.v[i] = 2.0 * v_mid[i] - s.v[i];
  }
  return stats;
}

double EnergyTrace::ledger_residual() const {
  if (E.empty()) return 0.0;
  const double e0 = E.front();
  double worst = 0.0;
  for (std::size_t i = 0; i < E.size(); ++i) {
    worst = std::max(worst, std::abs(e0 - E[i] - D[i]));
  }
  return e0 > 0.0 ? worst / e0 : worst;
}

double EnergyTrace::worst_uptick() const {
  if (E.size() < 2) return 0.0;
  const double e0 = E.front();
  double worst = 0.0;
  for (std::size_t i = 1; i < E.size(); ++i) {
    worst = std::max(worst, E[i] - E[i - 1]);
  }
  return e0 > 0.0 ? worst / e0 : worst;
}

EnergyTrace simulate(const SemiDiscreteSystem& system, State state, double t_end, double dt,
                     int sample_every) {
  if (!(t_end > 0.0)) throw ConfigError("simulate: t_end > 0 required");
  if (sample_every < 1) throw ConfigError("simulate: sample_every >= 1 required");
  if (dt > system.dt_max() * (1.0 + 1e-12)) {
    throw ConfigError("simulate: dt exceeds dt_max = 0.5 dx");
  }

  EnergyTrace trace;
  trace.meta.dt = dt;
  trace.meta.descriptor = system.descriptor();

  const double e0 = system.energy(state);
  double t = 0.0;
  double dissipated = 0.0;
  trace.t.push_back(0.0);
  trace.E.push_back(e0);
  trace.D.push_back(0.0);

  const std::int64_t n_steps = static_cast<std::int64_t>(std::llround(t_end / dt));
  for (std::int64_t step_idx = 0; step_idx < n_steps; ++step_idx) {
    // Nominal step with halving retries on fixed-point failure.
    double remaining = dt;
    double sub = dt;
    int halvings = 0;
    while (remaining > 1e-15 * dt) {
      sub = std::min(sub, remaining);
      try {
        const auto stats = system.step(state, t, sub);
        dissipated += stats.dissipated;
        t += sub;
        remaining -= sub;
      } catch (const NumericalError&) {
        if (++halvings > 10) throw;
        sub *= 0.5;
      }
    }
    if ((step_idx + 1) % sample_every == 0 || step_idx + 1 == n_steps) {
      const double e = system.energy(state);
      trace.t.push_back(t);
      trace.E.push_back(e);
      trace.D.push_back(dissipated);
      if (e < 1e-14 * e0) break;  // energy exhausted
    }
  }
  return trace;
}

}  // namespace decaylab

#include "decaylab/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "decaylab/numerics.hpp"

namespace decaylab {

namespace {

double interp_table(const std::vector<std::pair<double, double>>& pts, double x) {
  if (pts.empty()) throw std::invalid_argument("custom law: empty sample table");
  if (x <= pts.front().first) {
    if (pts.size() == 1) return pts.front().second;
    const auto& [x0, y0] = pts[0];
    const auto& [x1, y1] = pts[1];
    return y0 + (y1 - y0) / (x1 - x0) * (x - x0);
  }
  if (x >= pts.back().first) {
    if (pts.size() == 1) return pts.back().second;
    const auto& [x0, y0] = pts[pts.size() - 2];
    const auto& [x1, y1] = pts[pts.size() - 1];
    return y1 + (y1 - y0) / (x1 - x0) * (x - x1);
  }
  auto it = std::upper_bound(pts.begin(), pts.end(), x,
                             [](double v, const auto& pr) { return v < pr.first; });
  const auto& [x1, y1] = *it;
  const auto& [x0, y0] = *(it - 1);
  return y0 + (y1 - y0) / (x1 - x0) * (x - x0);
}

double table_slope(const std::vector<std::pair<double, double>>& pts, double x) {
  if (pts.size() < 2) return 0.0;
  std::size_t i = 0;
  while (i + 2 < pts.size() && pts[i + 1].first <= x) ++i;
  return (pts[i + 1].second - pts[i].second) / (pts[i + 1].first - pts[i].first);
}

}  // namespace

FeedbackLaw FeedbackLaw::linear() { return FeedbackLaw{}; }

FeedbackLaw FeedbackLaw::power_saturated(double gamma, double p) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("power_saturated: gamma must lie in (0, 1]");
  }
  if (!(p >= gamma)) throw std::invalid_argument("power_saturated: requires p >= gamma");
  FeedbackLaw law;
  law.kind = FeedbackKind::PowerSaturated;
  law.gamma = gamma;
  law.p = p;
  law.M = 1.0;
  law.m = 1.0;
  return law;
}

FeedbackLaw FeedbackLaw::zero() {
  FeedbackLaw law;
  law.M = 0.0;
  law.m = 0.0;
  return law;
}

FeedbackLaw FeedbackLaw::custom(std::vector<std::pair<double, double>> table) {
  FeedbackLaw law;
  law.kind = FeedbackKind::CustomSampled;
  std::sort(table.begin(), table.end());
  law.samples = std::move(table);
  return law;
}

double FeedbackLaw::branch_exponent() const {
  return gamma < 1.0 ? gamma : std::max(1.0, p);
}

double FeedbackLaw::eval(double x) const {
  if (!std::isfinite(x)) throw std::domain_error("feedback eval: non-finite input");
  if (M == 0.0) return 0.0;
  switch (kind) {
    case FeedbackKind::Linear:
      return x;
    case FeedbackKind::PowerSaturated: {
      const double r = std::abs(x);
      if (r >= 1.0) return x;
      if (r == 0.0) return 0.0;
      return std::pow(r, branch_exponent() - 1.0) * x;
    }
    case FeedbackKind::CustomSampled:
      return interp_table(samples, x);
  }
  return 0.0;
}

std::vector<double> FeedbackLaw::eval(const std::vector<double>& x) const {
  double r2 = 0.0;
  for (double xi : x) {
    if (!std::isfinite(xi)) throw std::domain_error("feedback eval: non-finite input");
    r2 += xi * xi;
  }
  const double r = std::sqrt(r2);
  std::vector<double> out(x.size(), 0.0);
  if (r < 1e-300) return out;
  const double factor = eval(r) / r;  // radial action
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = factor * x[i];
  return out;
}

double FeedbackLaw::eval_regularized(double x, double eps) const {
  if (kind != FeedbackKind::PowerSaturated || M == 0.0) return eval(x);
  const double theta = branch_exponent();
  if (theta >= 1.0) return eval(x);
  const double r = std::abs(x);
  if (r >= 1.0) return x;
  // C^1 smoothing x (x^2 + eps^2)^{(theta-1)/2}: monotone, slope bounded
  // by eps^{theta-1}, and within O(eps^theta) of the law near the origin.
  return x * std::pow(x * x + eps * eps, 0.5 * (theta - 1.0));
}

double FeedbackLaw::slope_regularized(double x, double eps) const {
  if (M == 0.0) return 0.0;
  switch (kind) {
    case FeedbackKind::Linear:
      return 1.0;
    case FeedbackKind::PowerSaturated: {
      const double theta = branch_exponent();
      const double r = std::abs(x);
      if (r >= 1.0) return 1.0;
      if (theta >= 1.0) {
        return r == 0.0 && theta > 1.0 ? 0.0 : theta * std::pow(r, theta - 1.0);
      }
      const double q2 = x * x + eps * eps;
      return std::pow(q2, 0.5 * theta - 1.5) * (theta * x * x + eps * eps);
    }
    case FeedbackKind::CustomSampled:
      return table_slope(samples, x);
  }
  return 0.0;
}

double ConcaveMajorant::eval(double x) const {
  if (x < 0.0) throw std::domain_error("majorant eval: negative argument");
  if (kind == MajorantKind::Power) {
    return scale * std::pow(x, 2.0 / (q + 1.0));
  }
  return interp_table(samples, x);
}

const AssumptionCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<double> default_validation_grid() {
  std::vector<double> grid;
  const double lo = 1e-8, hi = 1e3;
  const int per_decade = 2048;
  const double decades = std::log10(hi / lo);
  const int n = static_cast<int>(per_decade * decades) + 1;
  grid.reserve(2 * n + 3);
  for (int i = 0; i < n; ++i) {
    const double x = lo * std::pow(10.0, decades * i / (n - 1));
    grid.push_back(x);
    grid.push_back(-x);
  }
  grid.push_back(0.0);
  grid.push_back(1.0);
  grid.push_back(-1.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

ValidationReport validate_feedback(const FeedbackLaw& law, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("validate_feedback: empty grid");
  std::vector<double> xs = grid;
  std::sort(xs.begin(), xs.end());
  const double R = std::max(std::abs(xs.front()), std::abs(xs.back()));
  auto contains = [&](double v) {
    return std::any_of(xs.begin(), xs.end(), [&](double x) { return x == v; });
  };
  if (R < 2.0 || xs.front() > -2.0 || !contains(0.0) || !contains(1.0) || !contains(-1.0)) {
    throw std::invalid_argument("validate_feedback: grid must span [-R, R], R >= 2, with 0 and +-1");
  }

  ValidationReport rep;
  std::vector<double> gs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) gs[i] = law.eval(xs[i]);

  // goo: g(0) = 0 exactly.
  {
    const double g0 = law.eval(0.0);
    rep.checks.push_back({"goo", g0 == 0.0, std::abs(g0), "g(0)"});
  }

  // gmono: nondecreasing along the sorted grid plus random pairs.
  {
    bool pass = true;
    const double slack = 1e-12;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      if (gs[i + 1] - gs[i] < -slack * (1.0 + std::abs(gs[i]))) {
        pass = false;
        break;
      }
    }
    num::Rng rng(0x6d6f6e6fULL);
    for (int k = 0; k < 10000 && pass; ++k) {
      const double a = rng.uniform(-R, R);
      const double b = rng.uniform(-R, R);
      const double lhs = (law.eval(a) - law.eval(b)) * (a - b);
      if (lhs < -slack * (1.0 + (a - b) * (a - b))) pass = false;
    }
    rep.checks.push_back({"gmono", pass, 0.0, "(g(a)-g(b))(a-b) >= 0"});
  }

  // gbounded: |g(x)| <= M(1+|x|); tightest M observed.
  {
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      worst = std::max(worst, std::abs(gs[i]) / (1.0 + std::abs(xs[i])));
    }
    rep.observed_M = worst;
    rep.checks.push_back(
        {"gbounded", worst <= law.M * (1.0 + 1e-12), worst, "tightest M on grid"});
  }

  // gstrp: x g(x) >= m |x|^2 for |x| >= 1; tightest m observed.
  {
    double tight = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double ax = std::abs(xs[i]);
      if (ax < 1.0) continue;
      tight = std::min(tight, xs[i] * gs[i] / (ax * ax));
    }
    rep.observed_m = tight;
    rep.checks.push_back(
        {"gstrp", tight >= law.m * (1.0 - 1e-12), tight, "tightest m on |x|>=1"});
  }

  // spo15: x g(x) >= c0 |x|^{p+1} and |g(x)| <= C0 |x|^gamma for 0 < |x| <= 1.
  {
    double c0 = std::numeric_limits<double>::infinity();
    double C0 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double ax = std::abs(xs[i]);
      if (ax == 0.0 || ax > 1.0) continue;
      c0 = std::min(c0, xs[i] * gs[i] / std::pow(ax, law.p + 1.0));
      C0 = std::max(C0, std::abs(gs[i]) / std::pow(ax, law.gamma));
    }
    rep.observed_c0 = c0;
    rep.observed_C0 = C0;
    const bool pass = c0 > 0.0 && std::isfinite(C0);
    rep.checks.push_back({"spo15", pass, c0, "observed c0; C0 reported alongside"});
  }

  rep.all_pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                             [](const AssumptionCheck& c) { return c.pass; });
  return rep;
}

ConcaveMajorant concave_majorant_for(double gamma, double p) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("concave_majorant_for: gamma in (0, 1] required");
  }
  ConcaveMajorant g;
  g.kind = MajorantKind::Power;
  const double q = (p + 1.0) / gamma - 1.0;
  g.q = q < 1.0 ? 1.0 : q;  // linear-regime fallback when p < 2*gamma - 1
  g.delta = g.q + 1.0;
  g.c_G = 1.0;
  g.scale = 2.0;  // 1 + C0^2 with C0 = 1 for the shipped kinds
  return g;
}

ConcaveMajorant concave_majorant_for(const FeedbackLaw& law) {
  if (law.kind == FeedbackKind::CustomSampled) {
    throw std::invalid_argument("concave_majorant_for: custom laws carry no exponent pair");
  }
  return concave_majorant_for(law.gamma, law.p);
}

bool check_prop_g(const ConcaveMajorant& g,
                  const std::vector<std::pair<double, double>>& beta_x_samples) {
  for (const auto& [beta, x] : beta_x_samples) {
    if (!(beta > 0.0 && x > 0.0)) {
      throw std::invalid_argument("check_prop_g: samples must be positive");
    }
    const double lhs = beta * beta * g.eval(x);
    const double rhs = g.c_G * g.eval(std::pow(beta, g.delta) * x);
    if (lhs > rhs * (1.0 + 1e-12)) return false;
  }
  return true;
}

}  // namespace decaylab

#include "decaylab/fit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "decaylab/numerics.hpp"

namespace decaylab {

std::string to_string(FitModel model) {
  switch (model) {
    case FitModel::Exponential:
      return "exponential";
    case FitModel::Power:
      return "power";
    case FitModel::Stretched:
      return "stretched";
  }
  return "?";
}

FitResult fit_decay(const EnergyTrace& trace, FitModel model,
                    const std::function<double(double)>& clock, double window_fraction) {
  if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
    throw std::invalid_argument("fit_decay: window fraction in (0, 1] required");
  }
  if (trace.E.empty()) throw InsufficientData("fit_decay: empty trace");
  const double e0 = trace.initial_energy();
  const double floor = 1e-12 * e0;

  std::vector<double> ws, ts, logE;
  double prev_w = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    if (!(trace.E[i] > floor)) continue;
    const double w = clock(trace.t[i]);
    if (w <= prev_w) throw std::invalid_argument("fit_decay: clock must be strictly increasing");
    prev_w = w;
    ws.push_back(w);
    ts.push_back(trace.t[i]);
    logE.push_back(std::log(trace.E[i]));
  }
  if (ws.size() < 50) throw InsufficientData("fit_decay: fewer than 50 usable samples");

  const double w_lo = ws.back() - window_fraction * (ws.back() - ws.front());
  std::vector<double> xs, ys;
  double t_lo = ts.back(), t_hi = ts.front();
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (ws[i] < w_lo) continue;
    if (model == FitModel::Power) {
      if (!(ws[i] > 0.0)) continue;
      xs.push_back(std::log(ws[i]));
    } else {
      xs.push_back(ws[i]);
    }
    ys.push_back(logE[i]);
    t_lo = std::min(t_lo, ts[i]);
    t_hi = std::max(t_hi, ts[i]);
  }
  if (xs.size() < 10) throw InsufficientData("fit_decay: window too small");

  const auto line = num::fit_line(xs, ys);
  FitResult out;
  out.model = model;
  out.goodness = line.r2;
  out.window_lo = t_lo;
  out.window_hi = t_hi;
  out.points = xs.size();
  if (model == FitModel::Power) {
    out.exponent = -line.slope;
  } else {
    out.rate = -line.slope;
  }
  return out;
}

}  // namespace decaylab

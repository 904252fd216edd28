#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "decaylab/waves.hpp"

namespace decaylab {

enum class FitModel { Exponential, Power, Stretched };

struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitResult {
  FitModel model = FitModel::Exponential;
  double rate = std::numeric_limits<double>::quiet_NaN();      // exponential/stretched L
  double exponent = std::numeric_limits<double>::quiet_NaN();  // power r
  double clock_exponent = std::numeric_limits<double>::quiet_NaN();
  double goodness = 0.0;  // R^2 on the fitted window
  double window_lo = 0.0, window_hi = 0.0;  // in trace time
  std::size_t points = 0;
};

std::string to_string(FitModel model);

/// Least squares of log E against clock(t) (exponential/stretched) or
/// log clock(t) (power), on the tail window covering the last
/// `window_fraction` of the clock range. Samples with E <= 1e-12 E(0)
/// are dropped; fewer than 50 usable samples raise InsufficientData.
/// The clock must be strictly increasing along the trace.
FitResult fit_decay(const EnergyTrace& trace, FitModel model,
                    const std::function<double(double)>& clock, double window_fraction = 0.5);

}  // namespace decaylab

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "decaylab/config.hpp"
#include "decaylab/envelope.hpp"
#include "decaylab/fit.hpp"
#include "decaylab/waves.hpp"

namespace decaylab {

struct DominanceResult {
  bool checked = false;
  bool pass = false;
  double calibrated_c = 0.0;
  double worst_ratio = 0.0;  // max E(t) / envelope(t) over t >= 2T
  double t_worst = 0.0;
  std::string anchor = "least-upper";
};

struct Report {
  std::string config_id;
  bool ok = false;
  std::string failed_stage;  // empty on success
  std::string message;
  bool config_error = false;

  std::optional<DecayLaw> predicted;       // envelope law in the clock variable
  std::optional<DecayLaw> predicted_time;  // specialized to plain time when possible
  std::optional<FitResult> fit;
  DominanceResult dominance;
  double ledger_residual = 0.0;
  double worst_uptick = 0.0;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  Regime regime = Regime::Oscillating;
  std::string trace_path;

  nlohmann::json to_json() const;
};

/// Builds the configured system, simulates with seeded initial data, fits
/// the decay against the regime's clock, calibrates the envelope constant
/// c against the trace tail and checks E(t) <= envelope(t) for t >= 2T.
/// Stage failures are caught and recorded in the report.
Report run_experiment(const ExperimentConfig& cfg);

/// Assembles the envelope spec for a config whose trace is already known
/// (E0 measured, regime classified); c as given (no calibration).
EnvelopeSpec make_envelope_spec(const ExperimentConfig& cfg, double measured_E0, Regime regime,
                                double c_value);

/// Calibrates the envelope's one free constant as the least c whose
/// curve clears every sample with t >= 2T (the envelope is pointwise
/// monotone in c, so bisection applies), then reports the worst
/// E/envelope ratio over that window.
DominanceResult check_dominance(const ExperimentConfig& cfg, const EnergyTrace& trace,
                                Regime regime);

struct SweepRow {
  std::string config_id;
  std::string status;  // "ok" or the failed stage
  std::string predicted_model;
  double predicted_exponent = std::numeric_limits<double>::quiet_NaN();
  std::string fitted_model;
  double fitted_value = std::numeric_limits<double>::quiet_NaN();
  double goodness = std::numeric_limits<double>::quiet_NaN();
  bool dominance = false;
};

/// Runs every config; per-run failures are isolated into their row, so
/// the summary always has one row per config.
std::vector<SweepRow> sweep(const std::vector<ExperimentConfig>& configs);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

}  // namespace decaylab

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "decaylab/envelope.hpp"
#include "decaylab/feedback.hpp"
#include "decaylab/modulation.hpp"
#include "decaylab/waves.hpp"

namespace decaylab {

struct EnvelopeConfig {
  double T = 5.0;
  std::optional<double> mu;  // computed from the system when absent
  std::optional<double> c;   // absent = calibrate against the trace
  std::string regime = "auto";
  double window_fraction = 0.5;
};

struct RunConfig {
  double t_end = 200.0;
  double dt = 5e-3;
  int sample_every = 10;
  std::uint64_t seed = 1;
  int modes = 10;
};

struct OutputConfig {
  std::string trace;   // CSV path; empty = derived from the config path
  std::string report;  // JSON path; empty = stdout only
};

struct ExperimentConfig {
  std::string id;
  SystemConfig system;
  FeedbackLaw feedback;
  ModulationProfile alpha;
  EnvelopeConfig envelope;
  RunConfig run;
  OutputConfig output;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

nlohmann::json feedback_to_json(const FeedbackLaw& law);
FeedbackLaw feedback_from_json(const nlohmann::json& j);
nlohmann::json alpha_to_json(const ModulationProfile& profile);
ModulationProfile alpha_from_json(const nlohmann::json& j);

Regime regime_from_string(const std::string& s);
std::string to_string(Regime regime);

/// Damping-region measure mu = min_j mu_j(X_j): the Lebesgue measure of
/// the (smallest) interior damping region, or 1 for the point-supported
/// boundary and pointwise models.
double default_region_measure(const SystemConfig& system);

void write_trace_csv(const EnergyTrace& trace, const std::string& path);
EnergyTrace read_trace_csv(const std::string& path);

}  // namespace decaylab

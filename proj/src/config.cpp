#include "decaylab/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace decaylab {

using nlohmann::json;

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

WaveModel model_from_string(const std::string& s) {
  if (s == "wave_interior") return WaveModel::Interior;
  if (s == "wave_boundary") return WaveModel::Boundary;
  if (s == "string_pointwise") return WaveModel::Pointwise;
  throw ConfigError("unknown system model: " + s);
}

std::string model_to_string(WaveModel m) {
  switch (m) {
    case WaveModel::Interior:
      return "wave_interior";
    case WaveModel::Boundary:
      return "wave_boundary";
    case WaveModel::Pointwise:
      return "string_pointwise";
  }
  return "?";
}

json region_to_json(const ModulationProfile::Region& r) {
  json j;
  j["mask"] = {r.lo, r.hi};
  json p;
  switch (r.kind) {
    case ModulationKind::Constant:
      p["kind"] = "constant";
      p["value"] = r.value;
      break;
    case ModulationKind::PowerDecay:
      p["kind"] = "power_decay";
      p["sigma"] = r.sigma;
      break;
    case ModulationKind::PowerGrowth:
      p["kind"] = "power_growth";
      p["sigma"] = r.sigma;
      break;
    case ModulationKind::Oscillating:
      p["kind"] = "oscillating";
      p["a"] = r.a;
      p["b"] = r.b;
      p["omega"] = r.omega;
      break;
    default:
      throw ConfigError("piecewise region: nested piecewise profiles are not supported");
  }
  j["profile"] = p;
  return j;
}

ModulationProfile::Region region_from_json(const json& j) {
  ModulationProfile::Region r;
  const auto& mask = j.at("mask");
  r.lo = mask.at(0).get<double>();
  r.hi = mask.at(1).get<double>();
  const auto& p = j.at("profile");
  const std::string kind = p.at("kind").get<std::string>();
  if (kind == "constant") {
    r.kind = ModulationKind::Constant;
    r.value = p.value("value", 1.0);
  } else if (kind == "power_decay") {
    r.kind = ModulationKind::PowerDecay;
    r.sigma = p.at("sigma").get<double>();
  } else if (kind == "power_growth") {
    r.kind = ModulationKind::PowerGrowth;
    r.sigma = p.at("sigma").get<double>();
  } else if (kind == "oscillating") {
    r.kind = ModulationKind::Oscillating;
    r.a = p.at("a").get<double>();
    r.b = p.at("b").get<double>();
    r.omega = p.at("omega").get<double>();
  } else {
    throw ConfigError("piecewise region: unknown profile kind " + kind);
  }
  return r;
}

}  // namespace

json feedback_to_json(const FeedbackLaw& law) {
  json j;
  switch (law.kind) {
    case FeedbackKind::Linear:
      j["kind"] = "linear";
      break;
    case FeedbackKind::PowerSaturated:
      j["kind"] = "power_saturated";
      break;
    case FeedbackKind::CustomSampled:
      j["kind"] = "custom_sampled";
      break;
  }
  j["gamma"] = law.gamma;
  j["p"] = law.p;
  j["M"] = law.M;
  j["m"] = law.m;
  if (law.dimension != 1) j["dimension"] = law.dimension;
  if (law.kind == FeedbackKind::CustomSampled) {
    json pts = json::array();
    for (const auto& [x, y] : law.samples) pts.push_back({x, y});
    j["samples"] = pts;
  }
  return j;
}

FeedbackLaw feedback_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  FeedbackLaw law;
  if (kind == "linear") {
    law = FeedbackLaw::linear();
  } else if (kind == "power_saturated") {
    law = FeedbackLaw::power_saturated(j.at("gamma").get<double>(), j.at("p").get<double>());
  } else if (kind == "custom_sampled") {
    std::vector<std::pair<double, double>> pts;
    for (const auto& e : j.at("samples")) {
      pts.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    }
    law = FeedbackLaw::custom(std::move(pts));
  } else {
    throw ConfigError("unknown feedback kind: " + kind);
  }
  if (j.contains("gamma")) law.gamma = j.at("gamma").get<double>();
  if (j.contains("p")) law.p = j.at("p").get<double>();
  if (j.contains("M")) law.M = j.at("M").get<double>();
  if (j.contains("m")) law.m = j.at("m").get<double>();
  law.dimension = j.value("dimension", 1);
  return law;
}

json alpha_to_json(const ModulationProfile& profile) {
  json j;
  switch (profile.kind) {
    case ModulationKind::Constant:
      j["kind"] = "constant";
      j["value"] = profile.value;
      break;
    case ModulationKind::PowerDecay:
      j["kind"] = "power_decay";
      j["sigma"] = profile.sigma;
      break;
    case ModulationKind::PowerGrowth:
      j["kind"] = "power_growth";
      j["sigma"] = profile.sigma;
      break;
    case ModulationKind::Oscillating:
      j["kind"] = "oscillating";
      j["a"] = profile.a;
      j["b"] = profile.b;
      j["omega"] = profile.omega;
      break;
    case ModulationKind::PiecewiseInSpace: {
      j["kind"] = "piecewise_in_space";
      json regions = json::array();
      for (const auto& r : profile.regions) regions.push_back(region_to_json(r));
      j["regions"] = regions;
      break;
    }
  }
  return j;
}

ModulationProfile alpha_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") return ModulationProfile::constant(j.value("value", 1.0));
  if (kind == "power_decay") return ModulationProfile::power_decay(j.at("sigma").get<double>());
  if (kind == "power_growth") return ModulationProfile::power_growth(j.at("sigma").get<double>());
  if (kind == "oscillating") {
    return ModulationProfile::oscillating(j.at("a").get<double>(), j.at("b").get<double>(),
                                          j.at("omega").get<double>());
  }
  if (kind == "piecewise_in_space") {
    ModulationProfile p;
    p.kind = ModulationKind::PiecewiseInSpace;
    for (const auto& e : j.at("regions")) p.regions.push_back(region_from_json(e));
    if (p.regions.empty()) throw ConfigError("piecewise_in_space: at least one region required");
    return p;
  }
  throw ConfigError("unknown alpha kind: " + kind);
}

Regime regime_from_string(const std::string& s) {
  if (s == "non_increasing") return Regime::NonIncreasing;
  if (s == "non_decreasing") return Regime::NonDecreasing;
  if (s == "oscillating") return Regime::Oscillating;
  throw ConfigError("unknown regime: " + s);
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::NonIncreasing:
      return "non_increasing";
    case Regime::NonDecreasing:
      return "non_decreasing";
    case Regime::Oscillating:
      return "oscillating";
  }
  return "?";
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  if (!cfg.id.empty()) j["id"] = cfg.id;

  json sys;
  sys["model"] = model_to_string(cfg.system.model);
  sys["n"] = cfg.system.n_nodes;
  sys["length"] = cfg.system.length;
  if (!cfg.system.sigma.empty()) {
    json mask = json::array();
    for (const auto& iv : cfg.system.sigma) {
      mask.push_back({{"from", iv.lo}, {"to", iv.hi}, {"value", iv.value}});
    }
    sys["sigma_mask"] = mask;
  }
  if (cfg.system.model == WaveModel::Boundary) {
    sys["a"] = cfg.system.a;
    sys["k"] = cfg.system.k;
  }
  if (cfg.system.model == WaveModel::Pointwise) sys["xi"] = cfg.system.xi;
  j["system"] = sys;

  j["feedback"] = feedback_to_json(cfg.feedback);
  j["alpha"] = alpha_to_json(cfg.alpha);

  json env;
  env["T"] = cfg.envelope.T;
  if (cfg.envelope.mu.has_value()) env["mu"] = *cfg.envelope.mu;
  if (cfg.envelope.c.has_value()) {
    env["c"] = *cfg.envelope.c;
  } else {
    env["c"] = "calibrate";
  }
  env["regime"] = cfg.envelope.regime;
  env["window_frac"] = cfg.envelope.window_fraction;
  j["envelope"] = env;

  json run;
  run["t_end"] = cfg.run.t_end;
  run["dt"] = cfg.run.dt;
  run["sample_every"] = cfg.run.sample_every;
  run["seed"] = cfg.run.seed;
  run["modes"] = cfg.run.modes;
  j["run"] = run;

  if (!cfg.output.trace.empty() || !cfg.output.report.empty()) {
    json out;
    if (!cfg.output.trace.empty()) out["trace"] = cfg.output.trace;
    if (!cfg.output.report.empty()) out["report"] = cfg.output.report;
    j["output"] = out;
  }
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  try {
    cfg.id = j.value("id", "");

    const auto& sys = j.at("system");
    cfg.system.model = model_from_string(sys.at("model").get<std::string>());
    cfg.system.n_nodes = sys.value("n", 201);
    cfg.system.length = sys.value("length", M_PI);
    if (sys.contains("sigma_mask")) {
      for (const auto& e : sys.at("sigma_mask")) {
        cfg.system.sigma.push_back(
            {e.at("from").get<double>(), e.at("to").get<double>(), e.value("value", 1.0)});
      }
    }
    cfg.system.a = sys.value("a", 0.0);
    cfg.system.k = sys.value("k", 1.0);
    cfg.system.xi = sys.value("xi", cfg.system.length / 2.0);

    cfg.feedback = feedback_from_json(j.at("feedback"));
    cfg.alpha = alpha_from_json(j.at("alpha"));

    if (j.contains("envelope")) {
      const auto& env = j.at("envelope");
      cfg.envelope.T = env.value("T", 5.0);
      if (env.contains("mu")) cfg.envelope.mu = env.at("mu").get<double>();
      if (env.contains("c") && env.at("c").is_number()) {
        cfg.envelope.c = env.at("c").get<double>();
      }
      cfg.envelope.regime = env.value("regime", "auto");
      cfg.envelope.window_fraction = env.value("window_frac", 0.5);
    }

    if (j.contains("run")) {
      const auto& run = j.at("run");
      cfg.run.t_end = run.value("t_end", 200.0);
      cfg.run.dt = run.value("dt", 5e-3);
      cfg.run.sample_every = run.value("sample_every", 10);
      cfg.run.seed = run.value("seed", std::uint64_t{1});
      cfg.run.modes = run.value("modes", 10);
    }

    if (j.contains("output")) {
      const auto& out = j.at("output");
      cfg.output.trace = out.value("trace", "");
      cfg.output.report = out.value("report", "");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  // Cross-reference: the declared regime must match the profile.
  if (cfg.envelope.regime != "auto") {
    const Regime declared = regime_from_string(cfg.envelope.regime);
    const Regime classified = classify(cfg.alpha, std::max(cfg.run.t_end, 1.0)).regime;
    const bool constant = cfg.alpha.kind == ModulationKind::Constant;
    if (!constant && declared != classified) {
      throw ConfigError("config: envelope regime '" + cfg.envelope.regime +
                        "' does not match the alpha profile (classified " +
                        to_string(classified) + ")");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse: ") + e.what());
  }
  ExperimentConfig cfg = config_from_json(j);
  if (cfg.id.empty()) {
    auto slash = path.find_last_of('/');
    std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = stem.find_last_of('.');
    cfg.id = dot == std::string::npos ? stem : stem.substr(0, dot);
  }
  return cfg;
}

double default_region_measure(const SystemConfig& system) {
  if (system.model != WaveModel::Interior) return 1.0;  // point-supported damping
  if (system.sigma.empty()) return system.length;
  double measure = 0.0;
  for (const auto& iv : system.sigma) {
    if (iv.value > 0.0) measure += std::max(0.0, std::min(iv.hi, system.length) - std::max(iv.lo, 0.0));
  }
  return measure > 0.0 ? measure : system.length;
}

void write_trace_csv(const EnergyTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write trace: " + path);
  out << "t,E,D\n";
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    out << format_double(trace.t[i]) << ',' << format_double(trace.E[i]) << ','
        << format_double(trace.D[i]) << '\n';
  }
}

EnergyTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read trace: " + path);
  EnergyTrace trace;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trace file empty: " + path);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    double t, e, d;
    char comma;
    if (!(row >> t >> comma >> e >> comma >> d)) {
      throw ConfigError("trace row malformed: " + line);
    }
    trace.t.push_back(t);
    trace.E.push_back(e);
    trace.D.push_back(d);
  }
  return trace;
}

}  // namespace decaylab

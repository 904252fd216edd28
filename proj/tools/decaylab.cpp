// Command-line front end: simulate, envelope, fit, sweep, validate-feedback,
// kato-study. Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "decaylab/config.hpp"
#include "decaylab/envelope.hpp"
#include "decaylab/fit.hpp"
#include "decaylab/harness.hpp"
#include "decaylab/kato.hpp"
#include "decaylab/numerics.hpp"
#include "decaylab/waves.hpp"

namespace fs = std::filesystem;
using namespace decaylab;

namespace {

std::string default_stem(const std::string& config_path) {
  fs::path p(config_path);
  return p.stem().string();
}

int cmd_simulate(const std::string& config_path, std::string trace_path,
                 std::string report_path) {
  ExperimentConfig cfg = load_config(config_path);
  if (!trace_path.empty()) cfg.output.trace = trace_path;
  if (cfg.output.trace.empty()) cfg.output.trace = default_stem(config_path) + "_trace.csv";
  if (!report_path.empty()) cfg.output.report = report_path;

  const Report rep = run_experiment(cfg);
  const auto j = rep.to_json();
  if (!cfg.output.report.empty()) {
    std::ofstream out(cfg.output.report);
    out << j.dump(2) << "\n";
  }
  std::cout << j.dump(2) << "\n";
  if (!rep.ok) return rep.config_error ? 2 : 3;
  return 0;
}

int cmd_envelope(const std::string& config_path, const std::string& out_path, double t_end,
                 int samples) {
  ExperimentConfig cfg = load_config(config_path);
  if (t_end <= 0.0) t_end = cfg.run.t_end;

  const Regime regime = cfg.envelope.regime == "auto"
                            ? classify(cfg.alpha, std::max(t_end, 1.0)).regime
                            : regime_from_string(cfg.envelope.regime);
  EnvelopeSpec spec = make_envelope_spec(cfg, 1.0, regime, cfg.envelope.c.value_or(1.0));
  EnvelopeCurve curve(spec, cfg.alpha, t_end);

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw ConfigError("cannot write " + out_path);
    os = &file;
  }
  (*os) << "t,envelope_value,clock_value\n";
  char buf[128];
  for (int i = 0; i < samples; ++i) {
    const double t = spec.T + (t_end - spec.T) * i / (samples - 1);
    const double w = curve.clock(t);
    const double v = curve.value(t);
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", t, v, w);
    (*os) << buf;
  }
  return 0;
}

int cmd_fit(const std::string& trace_path, const std::string& model_name, double sigma,
            double window_frac) {
  const EnergyTrace trace = read_trace_csv(trace_path);
  FitModel model = FitModel::Exponential;
  std::function<double(double)> clock = [](double t) { return t; };
  if (model_name == "power") {
    model = FitModel::Power;
    clock = [](double t) { return 1.0 + t; };
  } else if (model_name == "stretched") {
    model = FitModel::Stretched;
    clock = [sigma](double t) { return std::pow(1.0 + t, sigma); };
  } else if (model_name != "exponential") {
    throw ConfigError("unknown fit model: " + model_name);
  }
  FitResult fit = fit_decay(trace, model, clock, window_frac);
  if (model == FitModel::Stretched) fit.clock_exponent = sigma;

  nlohmann::json j;
  j["model"] = to_string(fit.model);
  if (std::isfinite(fit.rate)) j["rate"] = fit.rate;
  if (std::isfinite(fit.exponent)) j["exponent"] = fit.exponent;
  if (std::isfinite(fit.clock_exponent)) j["clock_exponent"] = fit.clock_exponent;
  j["goodness"] = fit.goodness;
  j["window"] = {fit.window_lo, fit.window_hi};
  j["points"] = fit.points;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_sweep(const std::string& dir, const std::string& out_path) {
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<ExperimentConfig> configs;
  for (const auto& p : paths) {
    try {
      configs.push_back(load_config(p));
    } catch (const std::exception& e) {
      ExperimentConfig broken;
      broken.id = default_stem(p);
      broken.system.n_nodes = 0;  // forces the row into a failure state
      configs.push_back(broken);
      std::cerr << "config " << p << ": " << e.what() << "\n";
    }
  }
  const auto rows = sweep(configs);
  const std::string out = out_path.empty() ? "sweep_summary.csv" : out_path;
  write_sweep_csv(rows, out);
  std::cout << "wrote " << out << " (" << rows.size() << " rows)\n";
  return 0;
}

int cmd_validate_feedback(const std::string& config_path) {
  const ExperimentConfig cfg = load_config(config_path);
  const auto report = validate_feedback(cfg.feedback, default_validation_grid());
  nlohmann::json j;
  for (const auto& c : report.checks) {
    j["checks"][c.name] = {{"pass", c.pass}, {"observed", c.observed}, {"note", c.note}};
  }
  j["all_pass"] = report.all_pass;
  j["observed"] = {{"M", report.observed_M},
                   {"m", report.observed_m},
                   {"c0", report.observed_c0},
                   {"C0", report.observed_C0}};
  std::cout << j.dump(2) << "\n";
  return report.all_pass ? 0 : 3;
}

int cmd_kato_study(int dim, double gamma, double omega, const std::string& n_csv, double t_end,
                   const std::string& out_path, std::uint64_t seed) {
  std::vector<int> n_list;
  std::stringstream ss(n_csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) n_list.push_back(std::stoi(tok));
  if (n_list.size() < 2) throw ConfigError("kato-study: need at least two n values");

  AbstractSystem sys;
  sys.dim = dim;
  sys.a1 = random_skew(dim, seed);
  sys.law = gamma < 1.0 ? FeedbackLaw::power_saturated(gamma, gamma) : FeedbackLaw::linear();
  if (omega > 0.0) {
    // Shifted demo: damping slope 1 - omega, exercising the (1-omega/n)^-1
    // factors in the resolvent bounds.
    sys.law = FeedbackLaw::custom({{-100.0, -(1.0 - omega) * 100.0}, {0.0, 0.0},
                                   {100.0, (1.0 - omega) * 100.0}});
    sys.omega = omega;
  }
  for (int i = 0; i < dim; ++i) sys.damped.push_back(i);
  sys.profile = ModulationProfile::oscillating(1.5, 0.5, 1.0);

  std::vector<double> a(dim);
  decaylab::num::Rng rng(seed + 1);
  for (auto& v : a) v = rng.symmetric(1.0);

  const auto study = convergence_study(sys, a, t_end, n_list);

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw ConfigError("cannot write " + out_path);
    os = &file;
  }
  (*os) << "n,sup_error\n";
  char buf[64];
  for (std::size_t i = 0; i < study.n.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g\n", study.n[i], study.sup_err[i]);
    (*os) << buf;
  }
  std::cerr << "log-log slope of sup_error^2 vs n: " << study.fitted_slope
            << " (fitted constant " << study.fitted_constant << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decaylab: energy decay laboratory for nonautonomous nonlinear damping"};
  app.require_subcommand(1);

  std::string config_path, trace_path, report_path, out_path, model_name = "exponential";
  std::string dir, n_csv = "8,16,32,64,128";
  double t_end = 0.0, sigma = 0.5, window_frac = 0.5, gamma = 0.5, omega = 0.0;
  double kato_T = 2.0;
  int samples = 401, dim = 4;
  std::uint64_t seed = 7;

  auto* sim = app.add_subcommand("simulate", "run an experiment config end to end");
  sim->add_option("config", config_path)->required();
  sim->add_option("--trace", trace_path, "trace CSV path");
  sim->add_option("--report", report_path, "report JSON path");

  auto* env = app.add_subcommand("envelope", "emit the theoretical decay envelope as CSV");
  env->add_option("config", config_path)->required();
  env->add_option("--out", out_path, "output CSV (default stdout)");
  env->add_option("--t-end", t_end, "horizon (default: run.t_end)");
  env->add_option("--samples", samples, "number of rows");

  auto* fit = app.add_subcommand("fit", "fit a decay model to a trace CSV");
  fit->add_option("trace", trace_path)->required();
  fit->add_option("--model", model_name, "exponential | power | stretched");
  fit->add_option("--sigma", sigma, "clock exponent for the stretched model");
  fit->add_option("--window-frac", window_frac, "tail window fraction of the clock range");

  auto* sw = app.add_subcommand("sweep", "run every config in a directory");
  sw->add_option("dir", dir)->required();
  sw->add_option("--out", out_path, "summary CSV path");

  auto* val = app.add_subcommand("validate-feedback", "certify the config's damping law");
  val->add_option("config", config_path)->required();

  auto* kato = app.add_subcommand("kato-study", "resolvent-scheme convergence study");
  kato->add_option("--dim", dim);
  kato->add_option("--gamma", gamma);
  kato->add_option("--omega", omega);
  kato->add_option("--n", n_csv, "comma-separated approximation levels");
  kato->add_option("--t-end", kato_T);
  kato->add_option("--seed", seed);
  kato->add_option("--out", out_path, "CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config_path, trace_path, report_path);
    if (env->parsed()) return cmd_envelope(config_path, out_path, t_end, samples);
    if (fit->parsed()) return cmd_fit(trace_path, model_name, sigma, window_frac);
    if (sw->parsed()) return cmd_sweep(dir, out_path);
    if (val->parsed()) return cmd_validate_feedback(config_path);
    if (kato->parsed()) return cmd_kato_study(dim, gamma, omega, n_csv, kato_T, out_path, seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

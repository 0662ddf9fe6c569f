#include "commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "topsamp/config.hpp"
#include "topsamp/csv.hpp"
#include "topsamp/density.hpp"
#include "topsamp/errors.hpp"
#include "topsamp/experiment.hpp"
#include "topsamp/orthant.hpp"
#include "topsamp/planner.hpp"
#include "topsamp/version.hpp"

namespace topsamp::cli {

namespace {

using nlohmann::json;

struct Flags {
  std::string config;
  std::optional<std::string> family;
  std::optional<int> N;
  std::optional<double> period;
  std::optional<std::string> threshold;
  std::optional<double> tau;
  std::optional<std::string> strategy;
  std::optional<int> M;
  std::optional<double> p;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<int> resolution;
  std::optional<std::string> output;
  std::optional<std::string> format;

  int points = 201;
  std::vector<int> truncations{4, 8, 16, 32, 64};
  double x = 0.0;
  bool x_given = false;
  double delta = 0.01;
  std::vector<int> delta_exponents{4, 5, 6, 7, 8, 9, 10};
  std::string log;
  bool validate = false;
};

void add_model_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file");
  sub->add_option("--family", f.family, "chebyshev | cosine | periodic | binomial | unit");
  sub->add_option("--N", f.N, "Truncation N");
  sub->add_option("--period", f.period, "Period L of the periodic family");
  sub->add_option("--threshold", f.threshold, "zero | constant | cubic_shift");
  sub->add_option("--tau", f.tau, "Threshold shift tau");
  sub->add_option("--workers", f.workers, "Worker threads");
  sub->add_option("--output", f.output, "Output file (default stdout)");
  sub->add_option("--format", f.format, "csv | json");
}

void add_plan_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--strategy", f.strategy, "topology | uniform | density");
  sub->add_option("--M", f.M, "Grid size M");
  sub->add_option("--p", f.p, "Target probability p");
}

void add_stochastic_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--trials", f.trials, "Monte Carlo trials");
  sub->add_option("--seed", f.seed, "Random seed");
  sub->add_option("--resolution", f.resolution, "Oracle scan points");
}

/// Config file contents with command-line flags applied on top.
ExperimentConfig merged_config(const Flags& f) {
  json root = f.config.empty() ? json::object() : load_config_file(f.config);
  if (!root.is_object()) throw ConfigError("config root must be an object");
  if (f.family || f.N || f.period) {
    json& model = root["model"];
    if (!model.is_object()) model = json::object();
    if (f.family) {
      if (model.value("family", "") != *f.family) model.erase("amplitudes");
      model["family"] = *f.family;
    }
    if (f.N) {
      model["N"] = *f.N;
      model.erase("amplitudes");
    }
    if (f.period) model["period"] = *f.period;
  }
  if (f.threshold || f.tau) {
    json& th = root["threshold"];
    if (!th.is_object()) th = json::object();
    if (f.threshold) th["kind"] = *f.threshold;
    if (f.tau) {
      th["tau"] = *f.tau;
      if (!f.threshold && th.value("kind", "zero") == "zero") th["kind"] = "constant";
    }
    if (th.value("kind", "") == "zero") th.erase("tau");
  }
  if (f.strategy) root["strategy"] = *f.strategy;
  if (f.M) {
    root["M"] = *f.M;
    root.erase("p");
  }
  if (f.p) {
    root["p"] = *f.p;
    root.erase("M");
  }
  if (f.trials) root["trials"] = *f.trials;
  if (f.seed) root["seed"] = *f.seed;
  if (f.workers) root["workers"] = *f.workers;
  if (f.resolution) root["oracle_resolution"] = *f.resolution;
  if (f.output) root["output"] = *f.output;
  if (f.format) root["format"] = *f.format;
  ExperimentConfig cfg = experiment_config_from_json(root);
  if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format must be csv or json");
  if (cfg.workers < 1) throw ConfigError("workers must be at least 1");
  return cfg;
}

void require_plan_size(const ExperimentConfig& cfg) {
  if (cfg.M.has_value() == cfg.p.has_value()) throw ConfigError("exactly one of M and p must be given");
}

std::uint64_t require_seed(const ExperimentConfig& cfg) {
  if (!cfg.seed) throw ConfigError("--seed is required for stochastic commands");
  if (cfg.trials < 1) throw ConfigError("trials must be at least 1");
  return *cfg.seed;
}

RunOptions run_options(const ExperimentConfig& cfg) {
  RunOptions o;
  o.workers = cfg.workers;
  o.oracle_resolution = cfg.oracle_resolution;
  return o;
}

void emit(const Table& table, const ExperimentConfig& cfg, const std::string& command,
          const json& extra, std::ostream& out, const std::string& path) {
  json meta = {{"command", command}, {"config", cfg.echo()}, {"version", kVersion}};
  meta["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
  for (const auto& item : extra.items()) meta[item.key()] = item.value();
  std::ostringstream buf;
  if (cfg.format == "json") {
    write_json(buf, table, meta);
  } else {
    write_csv(buf, table);
  }
  if (path.empty()) {
    out << buf.str();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write '" + path + "'");
  file << buf.str();
}

int cmd_density(const Flags& f, std::ostream& out) {
  const ExperimentConfig cfg = merged_config(f);
  const FieldModel model = model_from_json(cfg.model);
  const ThresholdFn threshold = threshold_from_json(cfg.threshold);
  emit(profile_dump(model, threshold, f.points), cfg, "density", {{"points", f.points}}, out,
       cfg.output);
  return kSuccess;
}

int cmd_grid(const Flags& f, std::ostream& out) {
  const ExperimentConfig cfg = merged_config(f);
  require_plan_size(cfg);
  const FieldModel model = model_from_json(cfg.model);
  const ThresholdFn threshold = threshold_from_json(cfg.threshold);
  const SamplingPlan plan = build_plan(model, threshold, cfg.strategy, cfg.M, cfg.p);
  Table table;
  table.columns = {"k", "x"};
  for (std::size_t k = 0; k < plan.grid.size(); ++k) {
    table.add_row({static_cast<std::int64_t>(k), plan.grid[k]});
  }
  emit(table, cfg, "grid",
       {{"M", plan.M}, {"K", plan.K}, {"bound", plan.bound}, {"fallback", plan.fallback}}, out,
       cfg.output);
  return kSuccess;
}

int cmd_bound(const Flags& f, std::ostream& out) {
  const ExperimentConfig cfg = merged_config(f);
  require_plan_size(cfg);
  const FieldModel model = model_from_json(cfg.model);
  const ThresholdFn threshold = threshold_from_json(cfg.threshold);
  Table table;
  table.columns = {"strategy", "M", "K", "bound", "c0_max", "vacuous", "fallback"};
  for (const Strategy s : {Strategy::kTopology, Strategy::kUniform, Strategy::kDensityGuided}) {
    const SamplingPlan plan = build_plan(model, threshold, s, cfg.M, cfg.p);
    table.add_row({std::string(strategy_name(s)), static_cast<std::int64_t>(plan.M), plan.K,
                   plan.bound, plan.c0_max, std::int64_t{plan.vacuous},
                   std::int64_t{plan.fallback}});
  }
  emit(table, cfg, "bound", json::object(), out, cfg.output);
  return kSuccess;
}

int cmd_experiment(const Flags& f, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = merged_config(f);
  const std::uint64_t seed = require_seed(cfg);
  require_plan_size(cfg);
  const FieldModel model = model_from_json(cfg.model);
  const ThresholdFn threshold = threshold_from_json(cfg.threshold);
  const SamplingPlan plan = build_plan(model, threshold, cfg.strategy, cfg.M, cfg.p);
  RunOptions options = run_options(cfg);
  options.keep_log = !f.log.empty();
  const ExperimentResult r = run_experiment(model, threshold, plan, cfg.trials, seed, options);
  emit(experiment_table({r}), cfg, "experiment", {{"oracle_resolution", r.oracle_resolution}},
       out, cfg.output);
  if (!f.log.empty()) emit(trial_log_table(r), cfg, "experiment-log", json::object(), out, f.log);
  if (f.validate && r.correctness < r.bound - 3.0 * r.standard_error) {
    err << "validation: correctness " << r.correctness << " below bound " << r.bound
        << " - 3 SE\n";
    return kValidationFailure;
  }
  return kSuccess;
}

int cmd_compare(const Flags& f, std::ostream& out) {
  const ExperimentConfig cfg = merged_config(f);
  const std::uint64_t seed = require_seed(cfg);
  if (!cfg.M) throw ConfigError("compare needs --M");
  const FieldModel model = model_from_json(cfg.model);
  const ThresholdFn threshold = threshold_from_json(cfg.threshold);
  const auto results = compare_strategies(model, threshold, *cfg.M, cfg.trials, seed, run_options(cfg));
  emit(experiment_table(results), cfg, "compare", json::object(), out, cfg.output);
  return kSuccess;
}

int cmd_zeros(const Flags& f, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = merged_config(f);
  const std::uint64_t seed = require_seed(cfg);
  const FieldModel model = model_from_json(cfg.model);
  const ZeroCountResult r = zero_count_experiment(model, cfg.trials, seed, run_options(cfg));
  Table table;
  table.columns = {"trials", "mean", "standard_error", "expected", "relative_gap", "degenerate"};
  table.add_row({static_cast<std::int64_t>(r.trials), r.mean, r.standard_error, r.expected,
                 r.relative_gap, static_cast<std::int64_t>(r.degenerate)});
  emit(table, cfg, "zeros", json::object(), out, cfg.output);
  if (f.validate && std::abs(r.mean - r.expected) > 3.0 * r.standard_error) {
    err << "validation: mean zero count " << r.mean << " is more than 3 SE from " << r.expected
        << "\n";
    return kValidationFailure;
  }
  return kSuccess;
}

int cmd_scaling(const Flags& f, std::ostream& out) {
  const ExperimentConfig cfg = merged_config(f);
  const double p = cfg.p.value_or(0.95);
  const Family family = parse_family(cfg.model.value("family", "chebyshev"));
  const auto rows = scaling_study(family, f.truncations, p, cfg.workers);
  Table table;
  table.columns = {"N", "expected_zeros", "M_topology", "M_uniform", "K"};
  for (const ScalingRow& r : rows) {
    table.add_row({std::int64_t{r.N}, r.expected_zeros, std::int64_t{r.M_topology},
                   std::int64_t{r.M_uniform}, r.K});
  }
  emit(table, cfg, "scaling", {{"p", p}, {"truncations", f.truncations}}, out, cfg.output);
  return kSuccess;
}

int cmd_orthant(const Flags& f, std::ostream& out) {
  const ExperimentConfig cfg = merged_config(f);
  const FieldModel model = model_from_json(cfg.model);
  const ThresholdFn threshold = threshold_from_json(cfg.threshold);
  const double x = f.x_given ? f.x : model.domain().midpoint();
  std::vector<double> deltas;
  for (const int e : f.delta_exponents) deltas.push_back(std::ldexp(1.0, -e));
  const EigenExpansion ex = eigen_expansion_check(model, threshold, x, deltas);

  Table table;
  table.columns = {"delta", "quantity", "observed", "predicted", "error"};
  static const char* kLambda[3] = {"lambda1_over_delta4", "lambda2_over_delta2", "lambda3"};
  static const char* kTau[3] = {"tau_v1_over_delta2", "tau_v2_over_delta", "tau_v3"};
  static const char* kAngle[3] = {"angle_v1", "angle_v2", "angle_v3"};
  for (const ExpansionRow& row : ex.rows) {
    for (std::size_t k = 0; k < 3; ++k) {
      table.add_row({row.delta, std::string(kLambda[k]), row.lambda[k], ex.predicted.lambda[k],
                     row.lambda_error[k]});
    }
    for (std::size_t k = 0; k < 3; ++k) {
      table.add_row({row.delta, std::string(kTau[k]), row.tau[k], ex.predicted.tau[k],
                     row.tau_error[k]});
    }
    for (std::size_t k = 0; k < 3; ++k) {
      table.add_row({row.delta, std::string(kAngle[k]), row.angle[k], 0.0, row.angle[k]});
    }
    table.add_row({row.delta, std::string("det_over_delta6"), row.det, ex.predicted.det,
                   row.det_error});
  }
  if (cfg.seed || f.trials) {
    const std::uint64_t seed = require_seed(cfg);
    const CrossoverEstimate mc =
        crossover_prob_mc(model, threshold, x, f.delta, cfg.trials, seed, cfg.workers);
    const double c = sampling_density(correlation_jet(model, x, G2Check::kStrictPositive),
                                      threshold.jet(x)).C;
    const double d3 = f.delta * f.delta * f.delta;
    const double observed = mc.probability / d3;
    const double predicted = 0.75 * c;
    table.add_row({f.delta, std::string("crossover_over_delta3"), observed, predicted,
                   std::abs(observed - predicted) / predicted});
    table.add_row({f.delta, std::string("crossover_se_over_delta3"), mc.standard_error / d3,
                   0.0, mc.standard_error / d3});
  }
  emit(table, cfg, "orthant-check", {{"x", x}}, out, cfg.output);
  return kSuccess;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topology-guided sampling grids for 1-D Gaussian random fields"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Flags f;

  auto* density = app.add_subcommand("density", "Density profile C, S, D on an equispaced grid");
  add_model_flags(density, f);
  density->add_option("--points", f.points, "Number of abscissae")->check(CLI::Range(2, 10000000));

  auto* grid = app.add_subcommand("grid", "Sampling grid for a strategy");
  add_model_flags(grid, f);
  add_plan_flags(grid, f);

  auto* bound = app.add_subcommand("bound", "Grid sizes and correctness bounds per strategy");
  add_model_flags(bound, f);
  add_plan_flags(bound, f);

  auto* experiment = app.add_subcommand("experiment", "Monte Carlo correctness study");
  add_model_flags(experiment, f);
  add_plan_flags(experiment, f);
  add_stochastic_flags(experiment, f);
  experiment->add_option("--log", f.log, "Per-trial CSV/JSON log file");
  experiment->add_flag("--validate", f.validate, "Exit 4 if correctness < bound - 3 SE");

  auto* compare = app.add_subcommand("compare", "Correctness of all strategies at equal M");
  add_model_flags(compare, f);
  add_plan_flags(compare, f);
  add_stochastic_flags(compare, f);

  auto* zeros = app.add_subcommand("zeros", "Mean zero count against the expected-zero integral");
  add_model_flags(zeros, f);
  add_stochastic_flags(zeros, f);
  zeros->add_flag("--validate", f.validate, "Exit 4 if the mean is more than 3 SE off");

  auto* scaling = app.add_subcommand("scaling", "Grid sizes against truncation N");
  add_model_flags(scaling, f);
  scaling->add_option("--p", f.p, "Target probability p (default 0.95)");
  scaling->add_option("--Ns", f.truncations, "Truncations, comma separated")->delimiter(',');

  auto* orthant = app.add_subcommand("orthant-check", "Small-delta eigen expansion and crossover MC");
  add_model_flags(orthant, f);
  add_stochastic_flags(orthant, f);
  orthant->add_option("--x", f.x, "Base point (default domain midpoint)");
  orthant->add_option("--delta", f.delta, "Spacing for the crossover Monte Carlo");
  orthant->add_option("--delta-exponents", f.delta_exponents, "j in delta = 2^-j, comma separated")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  f.x_given = orthant->count("--x") > 0;

  try {
    if (density->parsed()) return cmd_density(f, out);
    if (grid->parsed()) return cmd_grid(f, out);
    if (bound->parsed()) return cmd_bound(f, out);
    if (experiment->parsed()) return cmd_experiment(f, out, err);
    if (compare->parsed()) return cmd_compare(f, out);
    if (zeros->parsed()) return cmd_zeros(f, out, err);
    if (scaling->parsed()) return cmd_scaling(f, out);
    if (orthant->parsed()) return cmd_orthant(f, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kConfigError;
}

}  // namespace topsamp::cli

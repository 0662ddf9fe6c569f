#include "topsamp/experiment.hpp"

#include <cmath>
#include <string>

#include "topsamp/density.hpp"
#include "topsamp/errors.hpp"
#include "topsamp/parallel.hpp"
#include "topsamp/quadrature.hpp"
#include "topsamp/rng.hpp"
#include "topsamp/topology.hpp"

namespace topsamp {

namespace {

template <class Fn>
auto in_stage(const char* name, Fn&& fn) {
  const auto prefix = [name](const std::exception& e) { return std::string(name) + ": " + e.what(); };
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(prefix(e));
  } catch (const G2Violation& e) {
    throw G2Violation(prefix(e));
  } catch (const FactorizationFailure& e) {
    throw FactorizationFailure(prefix(e));
  } catch (const PdFailure& e) {
    throw PdFailure(prefix(e));
  } catch (const NonFiniteDensity& e) {
    throw NonFiniteDensity(prefix(e));
  } catch (const DegenerateDensity& e) {
    throw DegenerateDensity(prefix(e));
  } catch (const DomainError& e) {
    throw DomainError(prefix(e));
  }
}

int resolve_resolution(const FieldModel& model, int requested) {
  return requested > 0 ? requested : default_oracle_resolution(model);
}

/// Runs every plan on the same paths; the oracle is evaluated once per path.
std::vector<ExperimentResult> run_plans(const FieldModel& model, const ThresholdFn& threshold,
                                        const std::vector<SamplingPlan>& plans,
                                        std::uint64_t trials, std::uint64_t seed,
                                        const RunOptions& options) {
  if (trials < 1) throw ConfigError("trials must be at least 1");
  const int resolution = resolve_resolution(model, options.oracle_resolution);
  const NodalOracle oracle(model, threshold, resolution);

  std::vector<std::vector<TrialRecord>> records(plans.size(), std::vector<TrialRecord>(trials));
  parallel_for(trials, options.workers, [&](std::size_t t) {
    CounterRng rng(seed, t);
    const SamplePath path = sample_path(model, rng);
    const OracleResult nodal = oracle(path);
    for (std::size_t i = 0; i < plans.size(); ++i) {
      const NodalReport report = verify_match(path, threshold, plans[i].grid, nodal);
      TrialRecord& r = records[i][t];
      r.trial = t;
      r.beta0_N_plus = report.beta0_N_plus;
      r.beta0_N_minus = report.beta0_N_minus;
      r.beta0_Q_plus = report.beta0_Q_plus;
      r.beta0_Q_minus = report.beta0_Q_minus;
      r.zeros = static_cast<int>(report.zeros.size());
      r.match_plus = report.match_plus;
      r.match_minus = report.match_minus;
      r.degenerate = report.degenerate;
    }
  });

  std::vector<ExperimentResult> out(plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) {
    ExperimentResult& result = out[i];
    result.trials = trials;
    result.plan = plans[i];
    result.bound = plans[i].bound;
    result.oracle_resolution = resolution;
    for (const TrialRecord& r : records[i]) {
      if (r.degenerate) {
        ++result.degenerate;
        continue;
      }
      ++result.valid;
      result.matches_plus += r.match_plus;
      result.matches_minus += r.match_minus;
      result.matches_both += r.match_plus && r.match_minus;
    }
    if (result.valid > 0) {
      const double n = static_cast<double>(result.valid);
      const double q = static_cast<double>(result.matches_both) / n;
      result.correctness = q;
      result.standard_error = std::sqrt(q * (1.0 - q) / n);
    }
    if (options.keep_log) result.log = std::move(records[i]);
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const FieldModel& model, const ThresholdFn& threshold,
                                const SamplingPlan& plan, std::uint64_t trials,
                                std::uint64_t seed, const RunOptions& options) {
  return std::move(run_plans(model, threshold, {plan}, trials, seed, options).front());
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (!config.seed) throw ConfigError("a seed is required for stochastic runs");
  if (config.trials < 1) throw ConfigError("trials must be at least 1");
  if (config.M.has_value() == config.p.has_value()) {
    throw ConfigError("exactly one of M and p must be given");
  }
  const FieldModel model = in_stage("model", [&] { return model_from_json(config.model); });
  const ThresholdFn threshold =
      in_stage("threshold", [&] { return threshold_from_json(config.threshold); });
  const SamplingPlan plan = in_stage(
      "planning", [&] { return build_plan(model, threshold, config.strategy, config.M, config.p); });
  RunOptions options;
  options.workers = config.workers;
  options.oracle_resolution = config.oracle_resolution;
  return in_stage("simulation", [&] {
    return run_experiment(model, threshold, plan, config.trials, *config.seed, options);
  });
}

std::vector<ExperimentResult> compare_strategies(const FieldModel& model,
                                                 const ThresholdFn& threshold, int M,
                                                 std::uint64_t trials, std::uint64_t seed,
                                                 const RunOptions& options) {
  std::vector<SamplingPlan> plans;
  for (const Strategy s : {Strategy::kTopology, Strategy::kUniform, Strategy::kDensityGuided}) {
    plans.push_back(build_plan(model, threshold, s, M, std::nullopt));
  }
  return run_plans(model, threshold, plans, trials, seed, options);
}

ZeroCountResult zero_count_experiment(const FieldModel& model, std::uint64_t trials,
                                      std::uint64_t seed, const RunOptions& options) {
  if (trials < 1) throw ConfigError("trials must be at least 1");
  const ThresholdFn zero = ThresholdFn::zero();
  const NodalOracle oracle(model, zero, resolve_resolution(model, options.oracle_resolution));
  std::vector<int> counts(trials);
  std::vector<char> degenerate(trials);
  parallel_for(trials, options.workers, [&](std::size_t t) {
    CounterRng rng(seed, t);
    const OracleResult r = oracle(sample_path(model, rng));
    counts[t] = static_cast<int>(r.zeros.size());
    degenerate[t] = r.degenerate;
  });
  ZeroCountResult out;
  out.trials = trials;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    sum += counts[t];
    sum_sq += static_cast<double>(counts[t]) * counts[t];
    out.degenerate += degenerate[t] != 0;
  }
  const double n = static_cast<double>(trials);
  out.mean = sum / n;
  const double var = trials > 1 ? std::max(0.0, (sum_sq - n * out.mean * out.mean) / (n - 1.0)) : 0.0;
  out.standard_error = std::sqrt(var / n);
  const Interval dom = model.domain();
  out.expected = integrate(zero_density_profile(model), dom.a, dom.b, 1e-10, 64);
  out.relative_gap = (out.mean - out.expected) / out.expected;
  return out;
}

Table profile_dump(const FieldModel& model, const ThresholdFn& threshold, int points) {
  if (points < 2) throw ConfigError("profile needs at least 2 points");
  const Interval dom = model.domain();
  const ScalarFn density = topology_density(model, threshold);
  const ScalarFn zero = zero_density_profile(model);
  const double nan = std::nan("");
  double K = nan;
  try {
    K = integrate([&](double x) { return std::cbrt(density(x)); }, dom.a, dom.b, 1e-13, 64);
  } catch (const G2Violation&) {
    // Rows are still reported; the normalized column stays nan.
  }
  const double Z = integrate(zero, dom.a, dom.b, 1e-13, 64);

  Table table;
  table.columns = {"x", "C", "C_cbrt", "S", "D", "C_cbrt_normalized", "D_normalized", "g2"};
  for (int i = 0; i < points; ++i) {
    const double x = i + 1 == points ? dom.b : dom.a + dom.length() * i / (points - 1);
    const double d = zero(x);
    double c = nan, s = nan;
    std::int64_t ok = 1;
    try {
      const DensityBreakdown br =
          sampling_density(correlation_jet(model, x, G2Check::kStrictPositive), threshold.jet(x));
      c = br.C;
      s = br.S;
    } catch (const G2Violation&) {
      ok = 0;
    }
    const double cb = std::cbrt(c);
    table.add_row({x, c, cb, s, d, K > 0.0 ? cb / K : nan, Z > 0.0 ? d / Z : nan, ok});
  }
  return table;
}

Table experiment_table(const std::vector<ExperimentResult>& results) {
  Table table;
  table.columns = {"strategy", "M",          "K",          "bound",     "trials",
                   "valid",    "matches_plus", "matches_minus", "matches_both", "degenerate",
                   "correctness", "standard_error"};
  for (const ExperimentResult& r : results) {
    table.add_row({std::string(strategy_name(r.plan.strategy)),
                   static_cast<std::int64_t>(r.plan.M), r.plan.K, r.bound,
                   static_cast<std::int64_t>(r.trials), static_cast<std::int64_t>(r.valid),
                   static_cast<std::int64_t>(r.matches_plus),
                   static_cast<std::int64_t>(r.matches_minus),
                   static_cast<std::int64_t>(r.matches_both),
                   static_cast<std::int64_t>(r.degenerate), r.correctness, r.standard_error});
  }
  return table;
}

Table trial_log_table(const ExperimentResult& result) {
  Table table;
  table.columns = {"trial", "beta0_N_plus", "beta0_N_minus", "beta0_Q_plus", "beta0_Q_minus",
                   "zeros", "match_plus", "match_minus", "degenerate"};
  for (const TrialRecord& r : result.log) {
    table.add_row({static_cast<std::int64_t>(r.trial), std::int64_t{r.beta0_N_plus},
                   std::int64_t{r.beta0_N_minus}, std::int64_t{r.beta0_Q_plus},
                   std::int64_t{r.beta0_Q_minus}, std::int64_t{r.zeros},
                   std::int64_t{r.match_plus}, std::int64_t{r.match_minus},
                   std::int64_t{r.degenerate}});
  }
  return table;
}

}  // namespace topsamp

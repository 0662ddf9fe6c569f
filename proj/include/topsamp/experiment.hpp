#ifndef TOPSAMP_EXPERIMENT_HPP
#define TOPSAMP_EXPERIMENT_HPP

#include <cstdint>
#include <vector>

#include "topsamp/config.hpp"
#include "topsamp/csv.hpp"
#include "topsamp/field_model.hpp"
#include "topsamp/planner.hpp"

namespace topsamp {

struct RunOptions {
  int workers = 1;
  int oracle_resolution = 0;  ///< 0 selects default_oracle_resolution
  bool keep_log = false;
};

struct TrialRecord {
  std::uint64_t trial = 0;
  int beta0_N_plus = 0;
  int beta0_N_minus = 0;
  int beta0_Q_plus = 0;
  int beta0_Q_minus = 0;
  int zeros = 0;
  bool match_plus = false;
  bool match_minus = false;
  bool degenerate = false;
};

/// Degenerate trials are excluded from the correctness denominator.
struct ExperimentResult {
  std::uint64_t trials = 0;
  std::uint64_t valid = 0;
  std::uint64_t matches_plus = 0;
  std::uint64_t matches_minus = 0;
  std::uint64_t matches_both = 0;
  std::uint64_t degenerate = 0;
  double correctness = 0.0;     ///< matches_both / valid
  double standard_error = 0.0;  ///< sqrt(q (1 - q) / valid)
  double bound = 0.0;
  SamplingPlan plan;
  int oracle_resolution = 0;
  std::vector<TrialRecord> log;
};

/// Trial t samples its path from stream (seed, t), so the result does not
/// depend on the number of workers.
ExperimentResult run_experiment(const FieldModel& model, const ThresholdFn& threshold,
                                const SamplingPlan& plan, std::uint64_t trials,
                                std::uint64_t seed, const RunOptions& options = {});

/// Builds model, threshold and plan from the config. Errors are rethrown with
/// the failing stage prefixed to the message.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Topology, uniform and density-guided grids of equal size on the same paths.
std::vector<ExperimentResult> compare_strategies(const FieldModel& model,
                                                 const ThresholdFn& threshold, int M,
                                                 std::uint64_t trials, std::uint64_t seed,
                                                 const RunOptions& options = {});

struct ZeroCountResult {
  std::uint64_t trials = 0;
  std::uint64_t degenerate = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  double expected = 0.0;  ///< int D
  double relative_gap = 0.0;
};

ZeroCountResult zero_count_experiment(const FieldModel& model, std::uint64_t trials,
                                      std::uint64_t seed, const RunOptions& options = {});

/**
 * Density profile on `points` equispaced abscissae. Columns: x, C, C_cbrt,
 * S, D, C_cbrt_normalized (C^{1/3} / int C^{1/3}), D_normalized (D / int D),
 * g2 (1 where the jet is strictly positive definite, else 0 with C and S
 * reported as nan).
 */
Table profile_dump(const FieldModel& model, const ThresholdFn& threshold, int points);

/// Summary tables in the CLI output layout.
Table experiment_table(const std::vector<ExperimentResult>& results);
Table trial_log_table(const ExperimentResult& result);

}  // namespace topsamp

#endif  // TOPSAMP_EXPERIMENT_HPP

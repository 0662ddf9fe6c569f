#ifndef TOPSAMP_CONFIG_HPP
#define TOPSAMP_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "topsamp/field_model.hpp"
#include "topsamp/planner.hpp"

namespace topsamp {

/**
 * Experiment configuration, read from a JSON document:
 *
 *   {
 *     "model":     {"family": "chebyshev", "N": 5},
 *     "threshold": {"kind": "zero"},
 *     "strategy":  "topology",
 *     "p": 0.95,                  // or "M": 13
 *     "trials": 100000,
 *     "seed": 7,
 *     "oracle_resolution": 0,     // 0 selects the default
 *     "workers": 1,
 *     "output": "result.csv",
 *     "format": "csv"             // or "json"
 *   }
 *
 * Model keys: family (chebyshev | cosine | periodic | binomial | unit), N,
 * and optionally period and amplitudes (periodic), variances (diagonal
 * covariance) or covariance (full matrix). Threshold kinds: zero,
 * constant (tau), polynomial (coefficients, lowest degree first) and
 * cubic_shift (tau, mu = x - x^3 + tau).
 */
struct ExperimentConfig {
  nlohmann::json model = {{"family", "chebyshev"}, {"N", 5}};
  nlohmann::json threshold = {{"kind", "zero"}};
  Strategy strategy = Strategy::kTopology;
  std::optional<int> M;
  std::optional<double> p;
  std::uint64_t trials = 1000;
  std::optional<std::uint64_t> seed;
  int oracle_resolution = 0;
  int workers = 1;
  std::string output;
  std::string format = "csv";

  /// Settings that determine results; workers, output and format are omitted.
  nlohmann::json echo() const;
};

Family parse_family(const std::string& name);

/// Throws ConfigError for malformed specs; FactorizationFailure propagates.
FieldModel model_from_json(const nlohmann::json& spec);
ThresholdFn threshold_from_json(const nlohmann::json& spec);

nlohmann::json load_config_file(const std::string& path);
ExperimentConfig experiment_config_from_json(const nlohmann::json& root);

}  // namespace topsamp

#endif  // TOPSAMP_CONFIG_HPP

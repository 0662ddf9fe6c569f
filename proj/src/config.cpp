#include "topsamp/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>

#include "topsamp/errors.hpp"

namespace topsamp {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("missing or invalid '" + std::string(key) + "' in " + where);
  }
}

std::uint64_t get_unsigned(const json& obj, const char* key, const std::string& where) {
  if (!obj.at(key).is_number_unsigned()) {
    throw ConfigError("'" + std::string(key) + "' in " + where + " must be a nonnegative integer");
  }
  return obj.at(key).get<std::uint64_t>();
}

}  // namespace

json ExperimentConfig::echo() const {
  json j = {{"model", model},
            {"threshold", threshold},
            {"strategy", strategy_name(strategy)},
            {"trials", trials},
            {"oracle_resolution", oracle_resolution}};
  if (M) j["M"] = *M;
  if (p) j["p"] = *p;
  if (seed) j["seed"] = *seed;
  return j;
}

Family parse_family(const std::string& name) {
  if (name == "chebyshev") return Family::kChebyshev;
  if (name == "cosine" || name == "cosine_neumann") return Family::kCosineNeumann;
  if (name == "periodic") return Family::kPeriodic;
  if (name == "binomial" || name == "polynomial_binomial") return Family::kPolynomialBinomial;
  if (name == "unit" || name == "polynomial_unit") return Family::kPolynomialUnit;
  throw ConfigError("unknown model family '" + name + "'");
}

FieldModel model_from_json(const json& spec) {
  const std::string where = "model";
  reject_unknown(spec, {"family", "N", "period", "amplitudes", "variances", "covariance"}, where);
  const Family family = parse_family(get<std::string>(spec, "family", where));
  try {
    FieldModel model = [&] {
      if (family == Family::kPeriodic && spec.contains("amplitudes")) {
        const double period = spec.contains("period") ? get<double>(spec, "period", where) : 1.0;
        return FieldModel::periodic(get<std::vector<double>>(spec, "amplitudes", where), period);
      }
      const int n = get<int>(spec, "N", where);
      if (family == Family::kPeriodic && spec.contains("period")) {
        return FieldModel::periodic_equal(n, get<double>(spec, "period", where));
      }
      return FieldModel::builtin(family, n);
    }();
    if (spec.contains("variances") && spec.contains("covariance")) {
      throw ConfigError("give either variances or covariance, not both");
    }
    if (spec.contains("variances")) {
      model = model.with_variances(get<std::vector<double>>(spec, "variances", where));
    }
    if (spec.contains("covariance")) {
      const auto rows = get<std::vector<std::vector<double>>>(spec, "covariance", where);
      const auto n = static_cast<Eigen::Index>(rows.size());
      Eigen::MatrixXd cov(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n) {
          throw ConfigError("covariance must be square");
        }
        for (Eigen::Index j = 0; j < n; ++j) cov(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
      model = model.with_covariance(cov);
    }
    return model;
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid model: ") + e.what());
  }
}

ThresholdFn threshold_from_json(const json& spec) {
  if (spec.is_number()) return ThresholdFn::constant(spec.get<double>());
  const std::string where = "threshold";
  reject_unknown(spec, {"kind", "tau", "coefficients"}, where);
  const std::string kind = get<std::string>(spec, "kind", where);
  if (kind == "zero") return ThresholdFn::zero();
  if (kind == "constant") return ThresholdFn::constant(get<double>(spec, "tau", where));
  if (kind == "cubic_shift") return ThresholdFn::cubic_shift(get<double>(spec, "tau", where));
  if (kind == "polynomial") {
    return ThresholdFn::polynomial(get<std::vector<double>>(spec, "coefficients", where));
  }
  throw ConfigError("unknown threshold kind '" + kind + "'");
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse config file '" + path + "': " + e.what());
  }
}

ExperimentConfig experiment_config_from_json(const json& root) {
  const std::string where = "config";
  reject_unknown(root,
                 {"model", "threshold", "strategy", "M", "p", "trials", "seed",
                  "oracle_resolution", "workers", "output", "format"},
                 where);
  ExperimentConfig cfg;
  if (root.contains("model")) cfg.model = root.at("model");
  if (root.contains("threshold")) cfg.threshold = root.at("threshold");
  if (root.contains("strategy")) cfg.strategy = parse_strategy(get<std::string>(root, "strategy", where));
  if (root.contains("M")) cfg.M = get<int>(root, "M", where);
  if (root.contains("p")) cfg.p = get<double>(root, "p", where);
  if (root.contains("trials")) cfg.trials = get_unsigned(root, "trials", where);
  if (root.contains("seed")) cfg.seed = get_unsigned(root, "seed", where);
  if (root.contains("oracle_resolution")) {
    cfg.oracle_resolution = get<int>(root, "oracle_resolution", where);
  }
  if (root.contains("workers")) cfg.workers = get<int>(root, "workers", where);
  if (root.contains("output")) cfg.output = get<std::string>(root, "output", where);
  if (root.contains("format")) cfg.format = get<std::string>(root, "format", where);
  if (cfg.M && cfg.p) throw ConfigError("config: give either M or p, not both");
  if (cfg.trials == 0) throw ConfigError("config: trials must be at least 1");
  return cfg;
}

}  // namespace topsamp

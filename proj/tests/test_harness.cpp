#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "topsamp/config.hpp"
#include "topsamp/csv.hpp"
#include "topsamp/errors.hpp"
#include "topsamp/experiment.hpp"
#include "topsamp/orthant.hpp"

using namespace topsamp;
using nlohmann::json;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "topsamp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "topsamp_harness";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::vector<double> column(const Table& t, const std::string& name) {
  std::size_t idx = 0;
  while (t.columns[idx] != name) ++idx;
  std::vector<double> out;
  for (const auto& row : t.rows) {
    const Cell& c = row[idx];
    out.push_back(std::holds_alternative<double>(c) ? std::get<double>(c)
                                                    : static_cast<double>(std::get<std::int64_t>(c)));
  }
  return out;
}

int local_maxima(const std::vector<double>& v) {
  int n = 0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] > v[i - 1] && v[i] >= v[i + 1]) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("config parsing") {
  const json root = json::parse(R"({
    "model": {"family": "periodic", "N": 3, "period": 2.0},
    "threshold": {"kind": "cubic_shift", "tau": 1.0},
    "strategy": "uniform", "M": 12, "trials": 50, "seed": 9, "workers": 3
  })");
  const ExperimentConfig c = experiment_config_from_json(root);
  CHECK(c.strategy == Strategy::kUniform);
  CHECK(c.M == 12);
  CHECK_FALSE(c.p.has_value());
  CHECK(c.trials == 50);
  CHECK(c.seed == 9u);
  CHECK(c.workers == 3);
  CHECK(c.echo().count("workers") == 0);
  const FieldModel m = model_from_json(c.model);
  CHECK(m.size() == 7);
  CHECK(m.domain().b == doctest::Approx(2.0));
  CHECK(threshold_from_json(c.threshold)(0.5) == doctest::Approx(0.5 - 0.125 + 1.0));
  CHECK(threshold_from_json(json(0.25))(0.9) == 0.25);

  CHECK(parse_family("chebyshev") == Family::kChebyshev);
  CHECK_THROWS_AS(parse_family("legendre"), ConfigError);
  CHECK_THROWS_AS(model_from_json(json::parse(R"({"family": "chebyshev", "N": 5, "colour": 1})")), ConfigError);
  CHECK_THROWS_AS(model_from_json(json::parse(R"({"family": "chebyshev", "N": -1})")), ConfigError);
  CHECK_THROWS_AS(threshold_from_json(json::parse(R"({"kind": "spline"})")), ConfigError);
  CHECK_THROWS_AS(experiment_config_from_json(json::parse(R"({"M": 4, "p": 0.9})")), ConfigError);
  CHECK_THROWS_AS(experiment_config_from_json(json::parse(R"({"trials": 0, "p": 0.9})")), ConfigError);
  CHECK_THROWS_AS(experiment_config_from_json(json::parse(R"({"trials": -3, "p": 0.9})")), ConfigError);
  CHECK_THROWS_AS(experiment_config_from_json(json::parse(R"({"strategy": "random", "p": 0.9})")), ConfigError);

  const auto path = scratch("commented.json");
  std::ofstream(path) << "{\n  // grid size\n  \"M\": 7\n}\n";
  CHECK(experiment_config_from_json(load_config_file(path.string())).M == 7);
}

TEST_CASE("table output") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
  Table t;
  t.columns = {"name", "count", "value"};
  t.add_row({std::string("a"), std::int64_t{3}, 2.5});
  t.add_row({std::string("b"), std::int64_t{-1}, std::nan("")});
  std::ostringstream csv;
  write_csv(csv, t);
  CHECK(csv.str() == "name,count,value\na,3,2.5\nb,-1,nan\n");
  std::ostringstream js;
  write_json(js, t, {{"seed", 4}});
  const json j = json::parse(js.str());
  CHECK(j["columns"].size() == 3);
  CHECK(j["rows"][1][2].is_null());
  CHECK(j["metadata"]["seed"] == 4);
}

TEST_CASE("constant positive field is always matched") {
  const FieldModel m = FieldModel::custom({[](double) { return BasisValue{1.0, 0.0, 0.0}; }},
                                          Interval{0.0, 1.0}, {1.0});
  SamplingPlan plan;
  plan.strategy = Strategy::kUniform;
  plan.grid = uniform_grid(0.0, 1.0, 4);
  plan.M = 4;
  // Offset so that every path u = g is positive or negative throughout.
  RunOptions opts;
  opts.oracle_resolution = 64;
  const ExperimentResult r = run_experiment(m, ThresholdFn::constant(-10.0), plan, 1, 3, opts);
  CHECK(r.trials == 1);
  CHECK(r.valid == 1);
  CHECK(r.correctness == 1.0);
}

TEST_CASE("experiments do not depend on the worker count") {
  const FieldModel m = FieldModel::chebyshev(5);
  const SamplingPlan plan = build_plan(m, ThresholdFn::zero(), Strategy::kTopology, std::nullopt, 0.95);
  RunOptions one, four;
  one.workers = 1;
  four.workers = 4;
  one.keep_log = four.keep_log = true;
  const ExperimentResult a = run_experiment(m, ThresholdFn::zero(), plan, 2000, 77, one);
  const ExperimentResult b = run_experiment(m, ThresholdFn::zero(), plan, 2000, 77, four);
  CHECK(a.matches_both == b.matches_both);
  CHECK(a.matches_plus == b.matches_plus);
  CHECK(a.degenerate == b.degenerate);
  std::ostringstream la, lb;
  write_csv(la, trial_log_table(a));
  write_csv(lb, trial_log_table(b));
  CHECK(la.str() == lb.str());
  CHECK(a.correctness >= 0.95 - 3.0 * a.standard_error);
}

TEST_CASE("standard errors cover a known probability") {
  // Independent fair signs: a double crossover has probability 1/4.
  const LocalGaussian indep = LocalGaussian::from_covariance(Eigen::Matrix3d::Identity(), {0.0, 0.0, 0.0});
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CrossoverEstimate e = crossover_prob_mc(indep, 4000, 1000 + seed);
    if (std::abs(e.probability - 0.25) <= 2.0 * e.standard_error) ++covered;
  }
  CHECK(covered >= 17);
}

TEST_CASE("zero counts") {
  const ZeroCountResult s = zero_count_experiment(FieldModel::periodic({0.0, 1.0}), 500, 5);
  CHECK(s.mean == 2.0);
  CHECK(s.expected == doctest::Approx(2.0).epsilon(1e-10));

  const ZeroCountResult b = zero_count_experiment(FieldModel::polynomial_binomial(5), 4000, 6);
  CHECK(b.expected == doctest::Approx(std::sqrt(5.0) * 2.0 * std::atan(3.0) / std::numbers::pi).epsilon(1e-9));
  CHECK(std::abs(b.mean - b.expected) <= 3.0 * b.standard_error);

  const ZeroCountResult c = zero_count_experiment(FieldModel::cosine_neumann(5), 4000, 7);
  CHECK(std::abs(c.mean - c.expected) <= 3.0 * c.standard_error);
}

TEST_CASE("density profiles") {
  const Table b = profile_dump(FieldModel::polynomial_binomial(5), ThresholdFn::zero(), 301);
  CHECK(b.rows.size() == 301);
  const auto cn = column(b, "C_cbrt_normalized");
  const auto dn = column(b, "D_normalized");
  for (std::size_t i = 0; i < cn.size(); ++i) CHECK(std::abs(cn[i] - dn[i]) <= 1e-10 * dn[i]);

  const Table p = profile_dump(FieldModel::periodic_equal(5), ThresholdFn::zero(), 101);
  const auto pc = column(p, "C");
  for (double v : pc) CHECK(v == doctest::Approx(pc[0]).epsilon(1e-10));

  std::vector<int> maxima;
  for (int n : {3, 5, 10}) {
    const Table t = profile_dump(FieldModel::chebyshev(n), ThresholdFn::zero(), 2001);
    maxima.push_back(local_maxima(column(t, "C_cbrt_normalized")));
  }
  CHECK(maxima[0] < maxima[1]);
  CHECK(maxima[1] < maxima[2]);

  const Table s = profile_dump(FieldModel::periodic({0.0, 1.0}), ThresholdFn::zero(), 11);
  CHECK(std::isnan(column(s, "C")[3]));
  CHECK(column(s, "g2")[3] == 0.0);
}

TEST_CASE("strategy comparisons") {
  const FieldModel per = FieldModel::periodic_equal(3);
  const auto pr = compare_strategies(per, ThresholdFn::zero(), 12, 3000, 21);
  REQUIRE(pr.size() == 3);
  for (std::size_t k = 0; k < pr[0].plan.grid.size(); ++k) {
    CHECK(pr[0].plan.grid[k] == doctest::Approx(pr[1].plan.grid[k]).epsilon(1e-9));
  }
  CHECK(pr[0].matches_both == pr[1].matches_both);

  const FieldModel bin = FieldModel::polynomial_binomial(5);
  const auto br = compare_strategies(bin, ThresholdFn::zero(), 8, 3000, 22);
  const double joint = std::sqrt(br[0].standard_error * br[0].standard_error +
                                 br[2].standard_error * br[2].standard_error);
  CHECK(std::abs(br[0].correctness - br[2].correctness) <= 2.0 * joint + 1e-12);

  const FieldModel cheb = FieldModel::chebyshev(10);
  const auto cr = compare_strategies(cheb, ThresholdFn::zero(), 7, 3000, 23);
  CHECK(cr[0].correctness >= cr[1].correctness - 2.0 * cr[1].standard_error);

  const Table t = experiment_table(cr);
  CHECK(t.rows.size() == 3);
}

TEST_CASE("command line") {
  CHECK(run({"experiment", "--trials", "10", "--p", "0.9"}).code == cli::kConfigError);
  CHECK(run({"experiment", "--trials", "10", "--seed", "3"}).code == cli::kConfigError);
  CHECK(run({"experiment", "--seed", "1", "--family", "legendre"}).code == cli::kConfigError);
  CHECK(run({"experiment", "--seed", "1", "--M", "4", "--p", "0.9"}).code == cli::kSuccess);
  CHECK(run({"nonsense"}).code == cli::kConfigError);
  CHECK(run({"density", "--config", "/nonexistent/file.json"}).code == cli::kConfigError);

  const auto cfg = scratch("sinusoid.json");
  std::ofstream(cfg) << R"({"model": {"family": "periodic", "amplitudes": [0, 1]}, "p": 0.9, "seed": 1})";
  CHECK(run({"grid", "--config", cfg.string()}).code == cli::kNumericalFailure);

  const CliRun d = run({"density", "--family", "binomial", "--N", "5", "--points", "11"});
  CHECK(d.code == cli::kSuccess);
  CHECK(d.out.rfind("x,C,C_cbrt,S,D,C_cbrt_normalized,D_normalized,g2\n", 0) == 0);
  CHECK(std::count(d.out.begin(), d.out.end(), '\n') == 12);

  const CliRun j = run({"experiment", "--seed", "5", "--p", "0.95", "--trials", "200", "--format", "json", "--validate"});
  CHECK(j.code == cli::kSuccess);
  const json parsed = json::parse(j.out);
  CHECK(parsed["metadata"]["seed"] == 5);
  CHECK(parsed["metadata"]["command"] == "experiment");
  CHECK(parsed["metadata"].contains("version"));
  CHECK(parsed["metadata"]["config"]["model"]["family"] == "chebyshev");

  const CliRun z = run({"zeros", "--family", "periodic", "--N", "3", "--seed", "2", "--trials", "300", "--validate"});
  CHECK(z.code == cli::kSuccess);

  const CliRun bnd = run({"bound", "--family", "chebyshev", "--N", "5", "--p", "0.95"});
  CHECK(bnd.code == cli::kSuccess);
  CHECK(std::count(bnd.out.begin(), bnd.out.end(), '\n') == 4);

  const CliRun o = run({"orthant-check", "--family", "periodic", "--N", "5", "--x", "0.3"});
  CHECK(o.code == cli::kSuccess);
  CHECK(o.out.rfind("delta,quantity,observed,predicted,error\n", 0) == 0);
}

TEST_CASE("stochastic commands write identical files for any worker count") {
  const std::vector<std::vector<std::string>> commands{
      {"experiment", "--seed", "11", "--p", "0.9", "--trials", "500"},
      {"compare", "--seed", "12", "--trials", "300", "--M", "9"},
      {"zeros", "--seed", "13", "--trials", "300", "--family", "cosine", "--N", "5"},
      {"orthant-check", "--seed", "14", "--trials", "200000", "--x", "0.2"},
  };
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::string table[2], log[2];
    for (int w = 0; w < 2; ++w) {
      const std::string workers = w == 0 ? "1" : "4";
      const std::string tag = std::to_string(c) + "_" + workers;
      const auto out = scratch("det_" + tag + ".csv");
      const auto trial_log = scratch("log_" + tag + ".csv");
      auto args = commands[c];
      args.insert(args.end(), {"--workers", workers, "--output", out.string()});
      if (args[0] == "experiment") args.insert(args.end(), {"--log", trial_log.string()});
      const CliRun r = run(args);
      INFO(r.err);
      REQUIRE(r.code == cli::kSuccess);
      table[w] = slurp(out);
      if (args[0] == "experiment") log[w] = slurp(trial_log);
    }
    CHECK_FALSE(table[0].empty());
    CHECK(table[0] == table[1]);
    CHECK(log[0] == log[1]);
  }
}

#include "topsamp/planner.hpp"

#include <algorithm>
#include <cmath>

#include "topsamp/density.hpp"
#include "topsamp/errors.hpp"
#include "topsamp/parallel.hpp"

namespace topsamp {

namespace {

constexpr double kQuadratureTolerance = 1e-10;
constexpr int kMinPanels = 64;
constexpr double kEndpointOffset = 1e-6;

void require_probability(double p) {
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("target probability must satisfy 0 <= p < 1");
}

}  // namespace

const char* strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::kTopology: return "topology";
    case Strategy::kUniform: return "uniform";
    case Strategy::kDensityGuided: return "density";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "topology") return Strategy::kTopology;
  if (name == "uniform") return Strategy::kUniform;
  if (name == "density" || name == "density_guided") return Strategy::kDensityGuided;
  throw ConfigError("unknown strategy '" + name + "'");
}

ScalarFn topology_density(const FieldModel& model, const ThresholdFn& threshold) {
  const Interval dom = model.domain();
  auto eval = [model, threshold](double x) {
    return sampling_density(correlation_jet(model, x, G2Check::kStrictPositive), threshold.jet(x)).C;
  };
  return [dom, eval](double x) {
    try {
      return eval(x);
    } catch (const G2Violation&) {
      const double h = kEndpointOffset * dom.length();
      if (x <= dom.a) return eval(dom.a + h);
      if (x >= dom.b) return eval(dom.b - h);
      throw;
    }
  };
}

ScalarFn zero_density_profile(const FieldModel& model) {
  return [model](double x) { return zero_density(correlation_jet(model, x, G2Check::kNone)); };
}

CumulativeIntegral cumulative_weight(const ScalarFn& density, double a, double b) {
  return CumulativeIntegral([density](double x) { return std::cbrt(density(x)); }, a, b,
                            kQuadratureTolerance, kMinPanels);
}

std::vector<double> place_grid(const CumulativeIntegral& weight, int M) {
  if (M < 1) throw DomainError("grid size M must be at least 1");
  const double K = weight.total();
  if (!(K > 0.0)) throw DegenerateDensity("sampling density integrates to zero");
  std::vector<double> grid(static_cast<std::size_t>(M) + 1);
  grid.front() = weight.a();
  grid.back() = weight.b();
  for (int k = 1; k < M; ++k) {
    grid[static_cast<std::size_t>(k)] = weight.inverse(K * k / M);
  }
  return grid;
}

std::vector<double> uniform_grid(double a, double b, int M) {
  if (M < 1) throw DomainError("grid size M must be at least 1");
  std::vector<double> grid(static_cast<std::size_t>(M) + 1);
  for (int k = 0; k <= M; ++k) grid[static_cast<std::size_t>(k)] = a + (b - a) * k / M;
  grid.back() = b;
  return grid;
}

std::vector<double> density_guided_grid(const ScalarFn& zero_density, double a, double b, int M) {
  const CumulativeIntegral weight(zero_density, a, b, kQuadratureTolerance, kMinPanels);
  return place_grid(weight, M);
}

double failure_bound(double K, int M) {
  if (M < 1 || K < 0.0) throw DomainError("failure_bound needs K >= 0 and M >= 1");
  const double m = static_cast<double>(M);
  return std::clamp(1.0 - K * K * K / (m * m), 0.0, 1.0);
}

double local_probability_bound(double K0, int M) {
  if (M < 1 || K0 < 0.0) throw DomainError("local_probability_bound needs K0 >= 0 and M >= 1");
  const double m = static_cast<double>(M);
  return std::clamp(1.0 - 4.0 / (3.0 * m * m) * K0 * K0 * K0, 0.0, 1.0);
}

double grid_local_bound(std::span<const double> grid, const ScalarFn& density) {
  double sum = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double h = grid[k] - grid[k - 1];
    sum += density(grid[k - 1]) * h * h * h;
  }
  return std::clamp(1.0 - sum, 0.0, 1.0);
}

int min_samples(double K, double p) {
  require_probability(p);
  if (!(K >= 0.0) || !std::isfinite(K)) throw DomainError("K must be finite and nonnegative");
  const double k3 = K * K * K;
  auto ok = [&](double m) { return 1.0 - k3 / (m * m) >= p; };
  double m = std::max(1.0, std::ceil(std::pow(K, 1.5) / std::sqrt(1.0 - p)));
  while (m > 1.0 && ok(m - 1.0)) m -= 1.0;
  while (!ok(m)) m += 1.0;
  return static_cast<int>(m);
}

int uniform_bound_samples(double c0_max, double length, double p) {
  require_probability(p);
  if (!(c0_max >= 0.0) || !(length > 0.0)) throw DomainError("need C0max >= 0 and length > 0");
  const double load = 4.0 / 3.0 * c0_max * length * length * length;
  auto ok = [&](double m) { return load / (m * m) <= 1.0 - p; };
  double m = std::max(1.0, std::ceil(std::sqrt(load / (1.0 - p))));
  while (m > 1.0 && ok(m - 1.0)) m -= 1.0;
  while (!ok(m)) m += 1.0;
  return static_cast<int>(m);
}

Maximum locate_maximum(const ScalarFn& f, double a, double b) {
  constexpr int kScan = 1001;
  const double h = (b - a) / (kScan - 1);
  int best = 0;
  double best_value = f(a);
  for (int i = 1; i < kScan; ++i) {
    const double x = i + 1 == kScan ? b : a + i * h;
    const double v = f(x);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  Maximum out{best + 1 == kScan ? b : a + best * h, best_value};
  const double lo = std::max(a, a + (best - 1) * h);
  const double hi = std::min(b, a + (best + 1) * h);
  const double x = golden_section_max(f, lo, hi, 1e-10);
  const double v = f(x);
  if (v > out.value) out = {x, v};
  return out;
}

SamplingPlan build_plan(const FieldModel& model, const ThresholdFn& threshold, Strategy strategy,
                        std::optional<int> M, std::optional<double> p) {
  if (M.has_value() == p.has_value()) throw ConfigError("exactly one of M and p must be given");
  if (M && *M < 1) throw ConfigError("M must be at least 1");
  if (p) require_probability(*p);

  const Interval dom = model.domain();
  const ScalarFn density = topology_density(model, threshold);
  const CumulativeIntegral weight = cumulative_weight(density, dom.a, dom.b);

  SamplingPlan plan;
  plan.strategy = strategy;
  plan.K = weight.total();
  switch (strategy) {
    case Strategy::kTopology: {
      plan.M = M ? *M : min_samples(plan.K, *p);
      try {
        plan.grid = place_grid(weight, plan.M);
      } catch (const DegenerateDensity&) {
        plan.grid = uniform_grid(dom.a, dom.b, plan.M);
        plan.fallback = true;
      }
      const double m = plan.M;
      plan.vacuous = 1.0 - plan.K * plan.K * plan.K / (m * m) <= 0.0;
      plan.bound = failure_bound(plan.K, plan.M);
      break;
    }
    case Strategy::kUniform: {
      plan.c0_max = 0.75 * locate_maximum(density, dom.a, dom.b).value;
      plan.M = M ? *M : uniform_bound_samples(plan.c0_max, dom.length(), *p);
      plan.grid = uniform_grid(dom.a, dom.b, plan.M);
      const double m = plan.M;
      const double l3 = dom.length() * dom.length() * dom.length();
      const double raw = 1.0 - 4.0 / 3.0 * plan.c0_max * l3 / (m * m);
      plan.vacuous = raw <= 0.0;
      plan.bound = std::clamp(raw, 0.0, 1.0);
      break;
    }
    case Strategy::kDensityGuided: {
      plan.M = M ? *M : min_samples(plan.K, *p);
      try {
        plan.grid = density_guided_grid(zero_density_profile(model), dom.a, dom.b, plan.M);
      } catch (const DegenerateDensity&) {
        plan.grid = uniform_grid(dom.a, dom.b, plan.M);
        plan.fallback = true;
      }
      plan.bound = grid_local_bound(plan.grid, density);
      plan.vacuous = plan.bound <= 0.0;
      break;
    }
  }
  return plan;
}

std::vector<ScalingRow> scaling_study(Family family, std::span<const int> truncations, double p,
                                      int workers) {
  require_probability(p);
  std::vector<ScalingRow> rows(truncations.size());
  parallel_for(truncations.size(), workers, [&](std::size_t i) {
    const int n = truncations[i];
    const FieldModel model = FieldModel::builtin(family, n);
    const Interval dom = model.domain();
    const ScalarFn density = topology_density(model, ThresholdFn::zero());
    const CumulativeIntegral weight = cumulative_weight(density, dom.a, dom.b);
    ScalingRow row;
    row.N = n;
    row.K = weight.total();
    row.expected_zeros =
        integrate(zero_density_profile(model), dom.a, dom.b, kQuadratureTolerance, kMinPanels);
    row.M_topology = min_samples(row.K, p);
    const double c0_max = 0.75 * locate_maximum(density, dom.a, dom.b).value;
    row.M_uniform = uniform_bound_samples(c0_max, dom.length(), p);
    rows[i] = row;
  });
  return rows;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope needs two or more points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace topsamp

#ifndef TOPSAMP_PLANNER_HPP
#define TOPSAMP_PLANNER_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topsamp/field_model.hpp"
#include "topsamp/quadrature.hpp"

namespace topsamp {

enum class Strategy { kTopology, kUniform, kDensityGuided };

const char* strategy_name(Strategy strategy);
/// Accepts "topology", "uniform", "density" (or "density_guided").
Strategy parse_strategy(const std::string& name);

/**
 * Sampling density x -> C(x) of a model and threshold.
 *
 * Uses strict positivity as the G2 test. A G2 violation exactly at a domain
 * endpoint (e.g. the cosine family, whose derivative vanishes there) is
 * replaced by the one-sided limit, approximated at distance 1e-6 (b - a)
 * inside the domain; interior violations propagate.
 */
ScalarFn topology_density(const FieldModel& model, const ThresholdFn& threshold);

/// x -> D(x), the expected-zero density of the model.
ScalarFn zero_density_profile(const FieldModel& model);

/// F(x) = int_a^x C^{1/3}; total() is K. Adaptive Simpson, rel. tol 1e-10.
CumulativeIntegral cumulative_weight(const ScalarFn& density, double a, double b);

/// Points with F(x_k) = k K / M, endpoints exact. Throws DegenerateDensity if K = 0.
std::vector<double> place_grid(const CumulativeIntegral& weight, int M);

std::vector<double> uniform_grid(double a, double b, int M);

/// Equi-area grid for the expected-zero density D.
std::vector<double> density_guided_grid(const ScalarFn& zero_density, double a, double b, int M);

/// Leading-order probability bound clamp(1 - K^3 / M^2, 0, 1) for a
/// topology-guided grid with K = int C^{1/3}.
double failure_bound(double K, int M);

/// Same bound written in terms of K0 = int C0^{1/3}: clamp(1 - 4 K0^3 / (3 M^2)).
double local_probability_bound(double K0, int M);

/// Leading-order bound for an arbitrary grid: clamp(1 - sum_k C(x_{k-1}) h_k^3).
double grid_local_bound(std::span<const double> grid, const ScalarFn& density);

/// Smallest M with 1 - K^3 / M^2 >= p. Throws DomainError unless 0 <= p < 1.
int min_samples(double K, double p);

/// Smallest M with (4/3) C0max length^3 / M^2 <= 1 - p (uniform grid).
int uniform_bound_samples(double c0_max, double length, double p);

struct Maximum {
  double x = 0.0;
  double value = 0.0;
};

/// 1001-point scan followed by golden-section refinement to 1e-10 in x.
Maximum locate_maximum(const ScalarFn& f, double a, double b);

struct SamplingPlan {
  Strategy strategy = Strategy::kTopology;
  std::vector<double> grid;
  int M = 0;
  double K = 0.0;         ///< int C^{1/3} over the domain
  double bound = 0.0;     ///< leading-order correctness bound, clamped to [0, 1]
  double c0_max = 0.0;    ///< max C0, used by the uniform bound
  bool fallback = false;  ///< K = 0, uniform grid substituted
  bool vacuous = false;   ///< unclamped bound was <= 0
};

/// Builds a grid for the given strategy. Exactly one of M / p must be set;
/// with p the grid size is the smallest one whose bound reaches p
/// (density-guided grids use the topology-guided count).
SamplingPlan build_plan(const FieldModel& model, const ThresholdFn& threshold, Strategy strategy,
                        std::optional<int> M, std::optional<double> p);

struct ScalingRow {
  int N = 0;
  double expected_zeros = 0.0;
  int M_topology = 0;
  int M_uniform = 0;
  double K = 0.0;
};

/// Zero-threshold scaling table over truncations of a built-in family.
std::vector<ScalingRow> scaling_study(Family family, std::span<const int> truncations, double p,
                                      int workers = 1);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace topsamp

#endif  // TOPSAMP_PLANNER_HPP

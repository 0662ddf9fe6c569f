#ifndef TOPSAMP_TOPOLOGY_HPP
#define TOPSAMP_TOPOLOGY_HPP

#include <span>
#include <vector>

#include "topsamp/field_model.hpp"

namespace topsamp {

struct Beta0 {
  int plus = 0;
  int minus = 0;
};

/**
 * Component counts of the cubical sets built from the values v_k = (u - mu)(x_k)
 * on a grid x_0 < ... < x_M. Q+ is the union of cells [x_k, x_{k+1}]
 * (x_{M+1} = x_M) with v_k >= 0, Q- the same with v_k <= 0, so a zero value
 * belongs to both. Each count is the number of maximal runs of qualifying
 * indices.
 */
Beta0 cubical_beta0(std::span<const double> values);

struct OracleResult {
  int beta0_plus = 0;
  int beta0_minus = 0;
  std::vector<double> zeros;
  bool degenerate = false;
};

/// Basis values phi_k(x_i) on a fixed point set, for fast path evaluation.
class BasisTable {
 public:
  BasisTable(const FieldModel& model, std::vector<double> points);

  const std::vector<double>& points() const { return points_; }
  /// (u - mu)(x_i) for the given coefficients and threshold values mu(x_i).
  void difference(std::span<const double> coefficients, std::span<const double> mu,
                  std::span<double> out) const;

 private:
  std::vector<double> points_;
  std::size_t terms_;
  std::vector<double> table_;  // column-major, points x terms
};

/**
 * Exact component counts of {u - mu >= 0} and {u - mu <= 0} for sample
 * paths of one model and threshold.
 *
 * A path is scanned at `resolution` equispaced points. Each local minimum of
 * |u - mu| without a sign change is refined by golden-section search: a sign
 * change at the minimum reveals a hidden pair of zeros, and a minimum below
 * 1e-9 marks the path as degenerate. Zeros are located by bisection to 1e-12.
 */
class NodalOracle {
 public:
  NodalOracle(const FieldModel& model, const ThresholdFn& threshold, int resolution);

  int resolution() const { return static_cast<int>(table_.points().size()); }
  OracleResult operator()(const SamplePath& path) const;

 private:
  FieldModel model_;
  ThresholdFn threshold_;
  BasisTable table_;
  std::vector<double> mu_;
};

/// 4096 * max(1, ceil(int D)) scan points.
int default_oracle_resolution(const FieldModel& model);

/// One-off oracle call; resolution <= 0 selects the default.
OracleResult oracle_beta0(const SamplePath& path, const ThresholdFn& threshold, int resolution = 0);

/// (>= 0, <= 0, >= 0) or (<= 0, >= 0, <= 0).
bool double_crossover(double v_alpha, double v_mid, double v_beta);

/// No double crossover of u - mu on any dyadic subinterval of [alpha, beta]
/// of depth 0..depth. A finite-depth under-approximation of admissibility.
bool admissible_to_depth(const SamplePath& path, const ThresholdFn& threshold, double alpha,
                         double beta, int depth);

/// Same check on precomputed values at the 2^{depth+1} + 1 dyadic points.
bool admissible_values(std::span<const double> dyadic_values, int depth);

/// Leading term 4 C0 delta^3 / 3 of the probability that [x, x + delta] is
/// not admissible. Diagnostic only.
double inadmissibility_bound(double c0, double delta);

struct NodalReport {
  int beta0_N_plus = 0;
  int beta0_N_minus = 0;
  int beta0_Q_plus = 0;
  int beta0_Q_minus = 0;
  std::vector<double> zeros;
  bool match_plus = false;
  bool match_minus = false;
  bool degenerate = false;
};

/// Compares the cubical counts on `grid` with a precomputed oracle result.
NodalReport verify_match(const SamplePath& path, const ThresholdFn& threshold,
                         std::span<const double> grid, const OracleResult& nodal);
NodalReport verify_match(const SamplePath& path, const ThresholdFn& threshold,
                         std::span<const double> grid, const NodalOracle& oracle);
NodalReport verify_match(const SamplePath& path, const ThresholdFn& threshold,
                         std::span<const double> grid);

/// Sufficient conditions for a correct cubical count: u - mu nonzero on the
/// grid, no near-double zero, and every grid cell admissible to `depth`.
bool validation_criterion(const SamplePath& path, const ThresholdFn& threshold,
                          std::span<const double> grid, const OracleResult& oracle,
                          int depth = 12);

}  // namespace topsamp

#endif  // TOPSAMP_TOPOLOGY_HPP

#ifndef TOPSAMP_ORTHANT_HPP
#define TOPSAMP_ORTHANT_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "topsamp/field_model.hpp"

namespace topsamp {

/// int_x^inf exp(-s^2/2) ds = sqrt(pi/2) erfc(x/sqrt(2)).
double gaussian_tail(double x);

/**
 * S_alpha = 2 / (2^{n/2} Gamma(n/2)) exp(-sum_{k>=2} alpha_k^2 / 2)
 *           int_{alpha_1}^inf (s - alpha_1)^{n-1} exp(-s^2/2) ds,
 * with the integral truncated at alpha_1 + 40 and evaluated by adaptive
 * Simpson quadrature. n is alpha.size().
 */
double s_alpha(std::span<const double> alpha);

/// Closed form of S_alpha for n = 3.
double s_alpha_n3_closed(const std::array<double, 3>& alpha);

/// S_alpha + S_{-alpha} = 2 exp(-(alpha_2^2 + alpha_3^2)/2) (1 + alpha_1^2) for n = 3.
double s_alpha_pm_n3(const std::array<double, 3>& alpha);

struct SymmetricEigen {
  std::array<double, 3> values{};    ///< ascending
  Eigen::Matrix3d vectors;           ///< columns, matching values
};

/// Cyclic Jacobi eigen-decomposition of a symmetric 3x3 matrix. Converges
/// to high relative accuracy on graded matrices such as the covariance of
/// closely spaced samples expressed in difference coordinates.
SymmetricEigen jacobi_eigen(const Eigen::Matrix3d& a);

/**
 * Covariance of T = (u(x), u(x + delta/2), u(x + delta)) and the threshold
 * values tau at the same points.
 *
 * The eigen-decomposition is computed in the orthonormal frame
 * (1,-2,1)/sqrt6, (1,0,-1)/sqrt2, (1,1,1)/sqrt3, where the model-based
 * covariance is assembled from second differences, differences and sums of
 * the basis functions. This keeps the smallest eigenvalue, of order
 * delta^4, accurate to many digits.
 */
class LocalGaussian {
 public:
  /// Throws PdFailure unless lambda_1 exceeds the rounding error of the
  /// frame-assembled matrix, 16 eps sqrt(C'_11 trace C).
  static LocalGaussian from_model(const FieldModel& model, const ThresholdFn& threshold, double x,
                                  double delta);
  /// Direct-matrix mode; requires lambda_1 > 16 eps max|C_ij|.
  static LocalGaussian from_covariance(const Eigen::Matrix3d& covariance,
                                       const std::array<double, 3>& tau);

  double x() const { return x_; }
  double delta() const { return delta_; }
  const Eigen::Matrix3d& covariance() const { return cov_; }
  const std::array<double, 3>& tau() const { return tau_; }
  /// Ascending eigenvalues.
  const std::array<double, 3>& eigenvalues() const { return eig_.values; }
  /// Column k pairs with eigenvalues()[k]; signs align with the limit frame.
  const Eigen::Matrix3d& eigenvectors() const { return eig_.vectors; }
  /// tau . v_k for k = 1..3.
  const std::array<double, 3>& projected_tau() const { return projected_tau_; }
  double determinant() const;

  /// The limit frame, columns (1,-2,1)/sqrt6, (1,0,-1)/sqrt2, (1,1,1)/sqrt3.
  static const Eigen::Matrix3d& limit_frame();

 private:
  LocalGaussian(double x, double delta, const Eigen::Matrix3d& cov,
                const Eigen::Matrix3d& rotated, const std::array<double, 3>& tau,
                const std::array<double, 3>& rotated_tau, double pd_floor);

  double x_ = 0.0;
  double delta_ = 0.0;
  Eigen::Matrix3d cov_;
  std::array<double, 3> tau_{};
  SymmetricEigen eig_;
  std::array<double, 3> projected_tau_{};
};

/// Leading-order coefficients of the small-delta expansion.
struct ExpansionPrediction {
  std::array<double, 3> lambda{};  ///< of lambda_1/delta^4, lambda_2/delta^2, lambda_3
  std::array<double, 3> tau{};     ///< of tau.v_1/delta^2, tau.v_2/delta, tau.v_3
  double det = 0.0;                ///< of det C / delta^6
};

ExpansionPrediction predict_expansion(const CorrelationJet& jet, const BasisValue& mu);

struct ExpansionRow {
  double delta = 0.0;
  std::array<double, 3> lambda{};  ///< lambda_1/delta^4, lambda_2/delta^2, lambda_3
  std::array<double, 3> tau{};     ///< tau.v_1/delta^2, tau.v_2/delta, tau.v_3
  std::array<double, 3> angle{};   ///< angle between v_k and its limit, radians
  double det = 0.0;                ///< det C / delta^6
  std::array<double, 3> lambda_error{};  ///< relative
  std::array<double, 3> tau_error{};     ///< relative, absolute where the prediction is 0
  double det_error = 0.0;                ///< relative
};

struct EigenExpansion {
  double x = 0.0;
  ExpansionPrediction predicted;
  std::vector<ExpansionRow> rows;
  /// Log-log slopes of the errors against delta. Errors that sit at rounding
  /// level (below 1e-13) for all but one delta give +infinity.
  std::array<double, 3> lambda_order{};
  std::array<double, 3> tau_order{};
  double det_order = 0.0;
};

EigenExpansion eigen_expansion_check(const FieldModel& model, const ThresholdFn& threshold,
                                     double x, std::span<const double> deltas);

struct CrossoverEstimate {
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double probability = 0.0;
  double standard_error = 0.0;
};

/// Frequency of the sign patterns (>=,<=,>=) and (<=,>=,<=) of T - tau.
/// Trials run in chunks of 65536; chunk c draws from stream (seed, c), so
/// the estimate does not depend on the worker count.
CrossoverEstimate crossover_prob_mc(const LocalGaussian& local, std::uint64_t trials,
                                    std::uint64_t seed, int workers = 1);
CrossoverEstimate crossover_prob_mc(const FieldModel& model, const ThresholdFn& threshold,
                                    double x, double delta, std::uint64_t trials,
                                    std::uint64_t seed, int workers = 1);

}  // namespace topsamp

#endif  // TOPSAMP_ORTHANT_HPP

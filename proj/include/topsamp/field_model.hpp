#ifndef TOPSAMP_FIELD_MODEL_HPP
#define TOPSAMP_FIELD_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "topsamp/basis.hpp"

namespace topsamp {

class CounterRng;

/// Closed interval [a, b] with a < b.
struct Interval {
  double a = 0.0;
  double b = 1.0;

  double length() const { return b - a; }
  double midpoint() const { return 0.5 * (a + b); }
  bool contains(double x) const;
};

/**
 * A centered Gaussian random field given as a finite series
 * u(x) = sum_k g_k phi_k(x) with coefficient covariance E[g_k g_m].
 *
 * Instances are immutable and share their state, so copies are cheap and
 * safe to pass between threads. The covariance is factored once at
 * construction (cov = F F^T); construction throws FactorizationFailure if
 * the covariance is not positive semidefinite within 1e-12 times its
 * largest diagonal entry.
 */
class FieldModel {
 public:
  static FieldModel chebyshev(int n);
  static FieldModel cosine_neumann(int n);
  /// amplitudes[k] = a_k for k = 0..N; the domain is [0, period].
  static FieldModel periodic(std::vector<double> amplitudes, double period = 1.0);
  /// Periodic model with a_0 = 0 and a_k = N^{-1/2} for k = 1..N, so Var u = 1.
  static FieldModel periodic_equal(int n, double period = 1.0);
  static FieldModel polynomial_binomial(int n);
  static FieldModel polynomial_unit(int n);
  static FieldModel custom(std::vector<BasisFn> basis, Interval domain,
                           std::vector<double> variances);
  /// Built-in family with its default covariance; periodic uses periodic_equal.
  static FieldModel builtin(Family family, int n);

  /// Same basis with independent coefficients of the given variances.
  FieldModel with_variances(std::vector<double> variances) const;
  /// Same basis with a full symmetric coefficient covariance.
  FieldModel with_covariance(const Eigen::MatrixXd& covariance) const;

  Family family() const;
  int truncation() const;
  std::size_t size() const;
  Interval domain() const;
  double period() const;
  const std::vector<double>& amplitudes() const;
  bool diagonal() const;
  /// Diagonal of the coefficient covariance.
  std::vector<double> variances() const;
  const Eigen::MatrixXd& covariance() const;
  /// F with covariance = F F^T.
  const Eigen::MatrixXd& factor() const;
  std::string describe() const;

  /// Fills out[k] with (phi_k, phi_k', phi_k'') at x for all k; no domain check.
  void basis_all(double x, std::span<BasisValue> out) const;

  struct Impl;

 private:
  explicit FieldModel(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// One realization u(x) = sum_k g_k phi_k(x) of a field model.
class SamplePath {
 public:
  SamplePath(FieldModel model, std::vector<double> coefficients);

  const FieldModel& model() const { return model_; }
  std::span<const double> coefficients() const { return coefficients_; }

 private:
  FieldModel model_;
  std::vector<double> coefficients_;
};

/// u(x) and u'(x) of a sample path.
struct PathValue {
  double value = 0.0;
  double slope = 0.0;
};

/// Threshold function mu: a constant or a polynomial.
class ThresholdFn {
 public:
  enum class Kind { kZero, kConstant, kPolynomial, kCubicShift };

  static ThresholdFn zero();
  static ThresholdFn constant(double tau);
  /// coefficients[k] multiplies x^k.
  static ThresholdFn polynomial(std::vector<double> coefficients);
  /// mu(x) = x - x^3 + tau.
  static ThresholdFn cubic_shift(double tau);

  Kind kind() const { return kind_; }
  double tau() const { return tau_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  bool is_zero() const;

  double operator()(double x) const;
  /// (mu, mu', mu'') at x.
  BasisValue jet(double x) const;
  std::string describe() const;

 private:
  ThresholdFn(Kind kind, double tau, std::vector<double> coefficients);
  Kind kind_;
  double tau_;
  std::vector<double> coefficients_;
};

/// Values R_{k,l}(x) of the correlation derivatives on the diagonal, the
/// 2x2 minors of the 3x3 matrix they form, and its determinant.
struct CorrelationJet {
  double x = 0.0;
  double R00 = 0.0, R10 = 0.0, R11 = 0.0, R20 = 0.0, R21 = 0.0, R22 = 0.0;
  double m33 = 0.0, m32 = 0.0, m31 = 0.0;
  double detR = 0.0;

  /// Builds a jet from its six entries; minors and determinant by cofactors.
  static CorrelationJet from_entries(double x, double r00, double r10, double r11, double r20,
                                     double r21, double r22);
  Eigen::Matrix3d matrix() const;
  /// Strict positivity of R00, m33 and detR.
  bool positive_definite() const;
};

/// How correlation_jet reacts to a degenerate correlation matrix.
enum class G2Check {
  kRelative,        // m33, detR must exceed 1e-12 times their natural scale
  kStrictPositive,  // m33, detR must be > 0
  kNone,
};

BasisValue basis_eval(const FieldModel& model, std::size_t k, double x);

/// R(x, y) = sum_{i,j} alpha_{ij} phi_i(x) phi_j(y); exactly symmetric.
double correlation(const FieldModel& model, double x, double y);

/// R_{k,l}(x) for k, l <= 2 with minors and determinant. The determinant is
/// the squared product of the R-diagonal of a Householder QR of the basis
/// jet weighted by the covariance factor, which stays accurate where the
/// cofactor expansion cancels catastrophically.
CorrelationJet correlation_jet(const FieldModel& model, double x,
                               G2Check check = G2Check::kRelative);

SamplePath sample_path(const FieldModel& model, std::uint64_t seed);
/// Draws the coefficients from an explicit stream (one stream per trial).
SamplePath sample_path(const FieldModel& model, CounterRng& rng);

PathValue eval_path(const SamplePath& path, double x);

BasisValue threshold_jet(const ThresholdFn& threshold, double x);

}  // namespace topsamp

#endif  // TOPSAMP_FIELD_MODEL_HPP

#ifndef TOPSAMP_DENSITY_HPP
#define TOPSAMP_DENSITY_HPP

#include "topsamp/basis.hpp"
#include "topsamp/field_model.hpp"

namespace topsamp {

/// Pointwise sampling-density quantities at x.
struct DensityBreakdown {
  double x = 0.0;
  double C = 0.0;   ///< topology-guided sampling density
  double A = 0.0;   ///< threshold amplification term, >= 0
  double B = 0.0;   ///< threshold exponent, >= 0
  double S = 1.0;   ///< (1 + A) exp(-B)
  double C0 = 0.0;  ///< local double-crossover coefficient, 3C/4
  double D = 0.0;   ///< expected-zero density
};

/**
 * Sampling density of a Gaussian field at a point:
 *
 *   C = detR / (48 pi m33^{3/2}) (1 + A) exp(-B)
 *   A = (m31 mu - m32 mu' + m33 mu'')^2 / (m33 detR)
 *   B = ((R10 mu - R00 mu')^2 + m33 mu^2) / (2 R00 m33)
 *
 * Throws G2Violation if the jet is not strictly positive definite or if A
 * overflows.
 */
DensityBreakdown sampling_density(const CorrelationJet& jet, const BasisValue& mu);

/// Constant threshold tau, evaluated through the reduced form
/// S = (1 + m31^2 tau^2 / (m33 detR)) exp(-(R10^2 + m33) tau^2 / (2 R00 m33)).
DensityBreakdown sampling_density_constant_threshold(const CorrelationJet& jet, double tau);

/// Closed form for homogeneous L-periodic fields, parametrized by the
/// spectral moments A_l = sum_k k^{2l} a_k^2. Throws DomainError unless
/// A0 > 0, A1 > 0 and A0 A2 > A1^2.
double periodic_density_closed_form(double A0, double A1, double A2, double L,
                                    const BasisValue& mu);

/// Expected-zero density sqrt(m33) / (pi R00). Throws DomainError if R00 <= 0
/// or m33 is negative beyond rounding.
double zero_density(const CorrelationJet& jet);

/// Spectral moment sum_k k^{2l} a_k^2 of a periodic amplitude vector.
double spectral_moment(const std::vector<double>& amplitudes, int l);

}  // namespace topsamp

#endif  // TOPSAMP_DENSITY_HPP

#ifndef TOPSAMP_BASIS_HPP
#define TOPSAMP_BASIS_HPP

#include <cstddef>
#include <functional>
#include <span>

namespace topsamp {

/// Value and first two derivatives of a smooth function at a point.
struct BasisValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// User-supplied basis function returning (phi, phi', phi'').
using BasisFn = std::function<BasisValue(double)>;

enum class Family {
  kChebyshev,           // cos(k arccos x) on [-1, 1], unit variances
  kCosineNeumann,       // cos(k pi x) on [0, 1], unit variances
  kPeriodic,            // a_k (cos, sin)(2 pi k x / L) on [0, L]
  kPolynomialBinomial,  // x^k on [-3, 3], variance binom(N, k)
  kPolynomialUnit,      // x^k on [-3, 3], unit variances
  kCustom,
};

const char* family_name(Family family);

namespace basis {

// Each routine fills out[0..N] with the first N+1 basis functions at x.

/// Chebyshev polynomials T_k with T_k' = k U_{k-1} and the differentiated
/// three-term recurrence for T_k''; finite at x = +-1.
void chebyshev(double x, std::span<BasisValue> out);

/// cos(k pi x).
void cosine(double x, std::span<BasisValue> out);

/// Monomials x^k.
void monomial(double x, std::span<BasisValue> out);

/// Trigonometric basis on [0, L]: index 0 is the constant 1, index 2k-1 is
/// sin(2 pi k x / L) and index 2k is cos(2 pi k x / L). `out` has 2N+1 slots.
void trigonometric(double x, double period, std::span<BasisValue> out);

}  // namespace basis
}  // namespace topsamp

#endif  // TOPSAMP_BASIS_HPP

#include "topsamp/density.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "topsamp/errors.hpp"

namespace topsamp {

namespace {

void require_g2(const CorrelationJet& jet) {
  if (!jet.positive_definite()) {
    std::ostringstream os;
    os.precision(17);
    os << "sampling density undefined at x=" << jet.x << " (R00=" << jet.R00
       << ", m33=" << jet.m33 << ", detR=" << jet.detR << ")";
    throw G2Violation(os.str());
  }
}

double base_density(const CorrelationJet& jet) {
  return jet.detR / (48.0 * std::numbers::pi * jet.m33 * std::sqrt(jet.m33));
}

DensityBreakdown assemble(const CorrelationJet& jet, double a, double b) {
  DensityBreakdown out;
  out.x = jet.x;
  out.A = a;
  out.B = b;
  out.S = (1.0 + a) * std::exp(-b);
  out.C = base_density(jet) * out.S;
  out.C0 = 0.75 * out.C;
  out.D = zero_density(jet);
  return out;
}

double checked_quotient(double numerator, double denominator, double x) {
  const double q = numerator / denominator;
  if (!std::isfinite(q)) {
    std::ostringstream os;
    os.precision(17);
    os << "threshold term overflows at x=" << x;
    throw G2Violation(os.str());
  }
  return q;
}

}  // namespace

DensityBreakdown sampling_density(const CorrelationJet& jet, const BasisValue& mu) {
  require_g2(jet);
  const double lin = jet.m31 * mu.value - jet.m32 * mu.d1 + jet.m33 * mu.d2;
  const double a = checked_quotient(lin * lin, jet.m33 * jet.detR, jet.x);
  const double slope = jet.R10 * mu.value - jet.R00 * mu.d1;
  const double b = (slope * slope + jet.m33 * (mu.value * mu.value)) / (2.0 * jet.R00 * jet.m33);
  return assemble(jet, a, b);
}

DensityBreakdown sampling_density_constant_threshold(const CorrelationJet& jet, double tau) {
  require_g2(jet);
  const double t2 = tau * tau;
  const double a = checked_quotient(jet.m31 * jet.m31 * t2, jet.m33 * jet.detR, jet.x);
  const double b = (jet.R10 * jet.R10 + jet.m33) / (2.0 * jet.R00 * jet.m33) * t2;
  return assemble(jet, a, b);
}

double periodic_density_closed_form(double A0, double A1, double A2, double L,
                                    const BasisValue& mu) {
  if (!(A0 > 0.0) || !(A1 > 0.0) || !(A0 * A2 > A1 * A1) || !(L > 0.0)) {
    throw DomainError("periodic closed form needs A0 > 0, A1 > 0, A0 A2 > A1^2, L > 0");
  }
  constexpr double pi = std::numbers::pi;
  const double gap = A0 * A2 - A1 * A1;
  const double scale = L * L / (4.0 * pi * pi);
  const double prefactor = pi * pi / (6.0 * L * L * L) * gap / (A0 * std::sqrt(A0) * std::sqrt(A1));
  const double lin = A1 * mu.value + A0 * mu.d2 * scale;
  const double amplification = 1.0 + lin * lin / (A0 * gap);
  const double exponent =
      (A1 * mu.value * mu.value + A0 * mu.d1 * mu.d1 * scale) / (2.0 * A0 * A1);
  return prefactor * amplification * std::exp(-exponent);
}

double zero_density(const CorrelationJet& jet) {
  if (!(jet.R00 > 0.0)) throw DomainError("zero density needs R00 > 0");
  double m33 = jet.m33;
  if (m33 < 0.0) {
    const double scale = jet.R00 * jet.R11;
    if (m33 < -1e-12 * std::abs(scale)) throw DomainError("zero density needs m33 >= 0");
    m33 = 0.0;
  }
  return std::sqrt(m33) / (std::numbers::pi * jet.R00);
}

double spectral_moment(const std::vector<double>& amplitudes, int l) {
  double s = 0.0;
  for (std::size_t k = 0; k < amplitudes.size(); ++k) {
    const double kk = static_cast<double>(k);
    s += std::pow(kk, 2 * l) * amplitudes[k] * amplitudes[k];
  }
  return s;
}

}  // namespace topsamp

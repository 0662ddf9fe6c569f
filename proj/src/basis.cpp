#include "topsamp/basis.hpp"

#include <cmath>
#include <numbers>

namespace topsamp {

const char* family_name(Family family) {
  switch (family) {
    case Family::kChebyshev: return "chebyshev";
    case Family::kCosineNeumann: return "cosine";
    case Family::kPeriodic: return "periodic";
    case Family::kPolynomialBinomial: return "binomial";
    case Family::kPolynomialUnit: return "unit";
    case Family::kCustom: return "custom";
  }
  return "unknown";
}

namespace basis {

void chebyshev(double x, std::span<BasisValue> out) {
  if (out.empty()) return;
  out[0] = {1.0, 0.0, 0.0};
  if (out.size() == 1) return;
  out[1] = {x, 1.0, 0.0};
  // u_prev = U_{k-2}, u_cur = U_{k-1} while filling index k.
  double u_prev = 1.0;
  double u_cur = 2.0 * x;
  for (std::size_t k = 2; k < out.size(); ++k) {
    const BasisValue& t1 = out[k - 1];
    const BasisValue& t2 = out[k - 2];
    BasisValue& t = out[k];
    t.value = 2.0 * x * t1.value - t2.value;
    t.d1 = static_cast<double>(k) * u_cur;
    t.d2 = 2.0 * x * t1.d2 + 4.0 * t1.d1 - t2.d2;
    const double u_next = 2.0 * x * u_cur - u_prev;
    u_prev = u_cur;
    u_cur = u_next;
  }
}

void cosine(double x, std::span<BasisValue> out) {
  // Near x = 1 the phase is taken from 1 - x, which is exact there, so the
  // vanishing slopes at the right end keep their relative accuracy.
  const bool reflect = x > 0.5;
  const double t = reflect ? 1.0 - x : x;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double w = static_cast<double>(k) * std::numbers::pi;
    const double parity = reflect && (k % 2 == 1) ? -1.0 : 1.0;
    const double c = parity * std::cos(w * t);
    const double s = (reflect ? -parity : parity) * std::sin(w * t);
    out[k] = {c, -w * s, -w * w * c};
  }
}

void monomial(double x, std::span<BasisValue> out) {
  double p0 = 1.0;  // x^k
  double p1 = 0.0;  // x^{k-1}
  double p2 = 0.0;  // x^{k-2}
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double kk = static_cast<double>(k);
    out[k] = {p0, kk * p1, kk * (kk - 1.0) * p2};
    p2 = p1;
    p1 = p0;
    p0 *= x;
  }
}

void trigonometric(double x, double period, std::span<BasisValue> out) {
  if (out.empty()) return;
  out[0] = {1.0, 0.0, 0.0};
  const std::size_t modes = (out.size() - 1) / 2;
  for (std::size_t k = 1; k <= modes; ++k) {
    const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / period;
    const double s = std::sin(w * x);
    const double c = std::cos(w * x);
    out[2 * k - 1] = {s, w * c, -w * w * s};
    out[2 * k] = {c, -w * s, -w * w * c};
  }
}

}  // namespace basis
}  // namespace topsamp

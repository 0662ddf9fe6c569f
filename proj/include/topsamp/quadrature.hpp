#ifndef TOPSAMP_QUADRATURE_HPP
#define TOPSAMP_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace topsamp {

using ScalarFn = std::function<double(double)>;

/// Adaptive composite Simpson rule. The interval is split into
/// `min_panels` equal panels, each refined until the Richardson estimate
/// meets its share of rel_tol * |integral|. Throws NonFiniteDensity if the
/// integrand returns NaN or infinity.
double integrate(const ScalarFn& f, double a, double b, double rel_tol = 1e-10,
                 int min_panels = 64);

/**
 * Running integral F(x) = int_a^x f of a nonnegative integrand.
 *
 * The adaptive Simpson leaves are kept so that F and its inverse can be
 * evaluated at arbitrary points without re-integrating from a.
 */
class CumulativeIntegral {
 public:
  CumulativeIntegral(ScalarFn f, double a, double b, double rel_tol = 1e-10,
                     int min_panels = 64);

  double a() const { return a_; }
  double b() const { return b_; }
  double total() const { return total_; }
  /// F(x) for x in [a, b] (clamped).
  double operator()(double x) const;
  /// Smallest-width bracket solution of F(x) = target by bisection, to
  /// x_tol absolute. Requires 0 <= target <= total().
  double inverse(double target, double x_tol = 1e-12) const;
  /// Number of leaf panels after refinement.
  std::size_t leaves() const { return leaf_x_.size() - 1; }

 private:
  double partial(std::size_t leaf, double x) const;

  ScalarFn f_;
  double a_, b_;
  double abs_tol_ = 0.0;
  double total_ = 0.0;
  std::vector<double> leaf_x_;    // leaf boundaries, size leaves+1
  std::vector<double> leaf_cum_;  // F at leaf boundaries
};

/// Golden-section search for a maximum of f on [lo, hi] to x_tol.
double golden_section_max(const ScalarFn& f, double lo, double hi, double x_tol = 1e-10);

/// Golden-section search for a minimum of f on [lo, hi] to x_tol.
double golden_section_min(const ScalarFn& f, double lo, double hi, double x_tol = 1e-10);

}  // namespace topsamp

#endif  // TOPSAMP_QUADRATURE_HPP

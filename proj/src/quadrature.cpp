#include "topsamp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "topsamp/errors.hpp"

namespace topsamp {

namespace {

constexpr int kMaxDepth = 28;

double checked(const ScalarFn& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    std::ostringstream os;
    os.precision(17);
    os << "integrand is not finite at x=" << x;
    throw NonFiniteDensity(os.str());
  }
  return y;
}

struct Panel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
};

Panel make_panel(const ScalarFn& f, double a, double b, double fa, double fb) {
  const double m = 0.5 * (a + b);
  const double fm = checked(f, m);
  return {a, m, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb)};
}

// Refines one panel; appends leaf boundaries (excluding p.a) and leaf
// integrals in left-to-right order.
void refine(const ScalarFn& f, const Panel& p, double tol, int depth, std::vector<double>& xs,
            std::vector<double>& vals) {
  const Panel left = make_panel(f, p.a, p.m, p.fa, p.fm);
  const Panel right = make_panel(f, p.m, p.b, p.fm, p.fb);
  const double sum = left.whole + right.whole;
  const double err = sum - p.whole;
  if (depth >= kMaxDepth || std::abs(err) <= 15.0 * tol || p.b - p.a <= 1e-15 * std::abs(p.b)) {
    xs.push_back(p.b);
    vals.push_back(sum + err / 15.0);
    return;
  }
  refine(f, left, 0.5 * tol, depth + 1, xs, vals);
  refine(f, right, 0.5 * tol, depth + 1, xs, vals);
}

void adaptive(const ScalarFn& f, double a, double b, double rel_tol, int min_panels,
              std::vector<double>& xs, std::vector<double>& vals, double* abs_tol_out) {
  const int panels = std::max(1, min_panels);
  const double h = (b - a) / panels;
  std::vector<double> fx(static_cast<std::size_t>(panels) + 1);
  for (int i = 0; i <= panels; ++i) fx[static_cast<std::size_t>(i)] = checked(f, i == panels ? b : a + i * h);
  std::vector<Panel> coarse;
  coarse.reserve(static_cast<std::size_t>(panels));
  double estimate = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * h;
    const double hi = i + 1 == panels ? b : a + (i + 1) * h;
    coarse.push_back(make_panel(f, lo, hi, fx[static_cast<std::size_t>(i)], fx[static_cast<std::size_t>(i) + 1]));
    estimate += std::abs(coarse.back().whole);
  }
  const double abs_tol = rel_tol * std::max(estimate, 1e-300);
  if (abs_tol_out) *abs_tol_out = abs_tol;
  xs.assign(1, a);
  vals.clear();
  for (const Panel& p : coarse) refine(f, p, abs_tol / panels, 0, xs, vals);
}

}  // namespace

double integrate(const ScalarFn& f, double a, double b, double rel_tol, int min_panels) {
  if (a == b) return 0.0;
  std::vector<double> xs, vals;
  adaptive(f, a, b, rel_tol, min_panels, xs, vals, nullptr);
  double s = 0.0;
  for (double v : vals) s += v;
  return s;
}

CumulativeIntegral::CumulativeIntegral(ScalarFn f, double a, double b, double rel_tol,
                                       int min_panels)
    : f_(std::move(f)), a_(a), b_(b) {
  if (!(a < b)) throw DomainError("integration interval must satisfy a < b");
  std::vector<double> vals;
  adaptive(f_, a, b, rel_tol, min_panels, leaf_x_, vals, &abs_tol_);
  leaf_cum_.assign(leaf_x_.size(), 0.0);
  for (std::size_t i = 0; i < vals.size(); ++i) leaf_cum_[i + 1] = leaf_cum_[i] + vals[i];
  total_ = leaf_cum_.back();
}

double CumulativeIntegral::partial(std::size_t leaf, double x) const {
  const double lo = leaf_x_[leaf];
  if (x <= lo) return leaf_cum_[leaf];
  if (x >= leaf_x_[leaf + 1]) return leaf_cum_[leaf + 1];
  // The leaf already meets the tolerance, so one refinement level suffices.
  const double width_share = (x - lo) / (b_ - a_);
  std::vector<double> xs{lo}, vals;
  const Panel p = make_panel(f_, lo, x, checked(f_, lo), checked(f_, x));
  refine(f_, p, abs_tol_ * std::max(width_share, 1e-3), kMaxDepth - 8, xs, vals);
  double s = 0.0;
  for (double v : vals) s += v;
  return leaf_cum_[leaf] + s;
}

double CumulativeIntegral::operator()(double x) const {
  if (x <= a_) return 0.0;
  if (x >= b_) return total_;
  const auto it = std::upper_bound(leaf_x_.begin(), leaf_x_.end(), x);
  const auto leaf = static_cast<std::size_t>(it - leaf_x_.begin()) - 1;
  return partial(leaf, x);
}

double CumulativeIntegral::inverse(double target, double x_tol) const {
  if (target <= 0.0) return a_;
  if (target >= total_) return b_;
  const auto it = std::upper_bound(leaf_cum_.begin(), leaf_cum_.end(), target);
  std::size_t leaf = static_cast<std::size_t>(it - leaf_cum_.begin());
  leaf = leaf == 0 ? 0 : leaf - 1;
  leaf = std::min(leaf, leaf_x_.size() - 2);
  double lo = leaf_x_[leaf];
  double hi = leaf_x_[leaf + 1];
  while (hi - lo > x_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (partial(leaf, mid) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

constexpr double kInvPhi = 0.6180339887498949;

template <class Better>
double golden(const ScalarFn& f, double lo, double hi, double x_tol, Better better) {
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > x_tol; ++it) {
    if (better(f1, f2)) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double golden_section_max(const ScalarFn& f, double lo, double hi, double x_tol) {
  return golden(f, lo, hi, x_tol, [](double a, double b) { return a > b; });
}

double golden_section_min(const ScalarFn& f, double lo, double hi, double x_tol) {
  return golden(f, lo, hi, x_tol, [](double a, double b) { return a < b; });
}

}  // namespace topsamp

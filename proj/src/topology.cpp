#include "topsamp/topology.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "topsamp/errors.hpp"
#include "topsamp/planner.hpp"
#include "topsamp/quadrature.hpp"

namespace topsamp {

namespace {

constexpr double kZeroTolerance = 1e-12;
constexpr double kDegenerateLevel = 1e-9;

struct Sample {
  double x;
  double v;
};

/// Evaluates (u - mu)(x) with a reusable basis buffer.
class Difference {
 public:
  Difference(const SamplePath& path, const ThresholdFn& threshold)
      : path_(path), threshold_(threshold), buffer_(path.model().size()) {}

  double operator()(double x) {
    path_.model().basis_all(x, buffer_);
    const auto g = path_.coefficients();
    double u = 0.0;
    for (std::size_t k = 0; k < buffer_.size(); ++k) u += g[k] * buffer_[k].value;
    return u - threshold_(x);
  }

 private:
  const SamplePath& path_;
  const ThresholdFn& threshold_;
  std::vector<BasisValue> buffer_;
};

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

double bisect(Difference& f, double lo, double hi, double f_lo) {
  const int s = sign_of(f_lo);
  for (int it = 0; it < 200 && hi - lo > kZeroTolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (sign_of(fm) == s) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> scan_points(const Interval& dom, int resolution) {
  std::vector<double> x(static_cast<std::size_t>(resolution));
  const double h = dom.length() / (resolution - 1);
  for (int i = 0; i < resolution; ++i) x[static_cast<std::size_t>(i)] = dom.a + i * h;
  x.back() = dom.b;
  return x;
}

}  // namespace

Beta0 cubical_beta0(std::span<const double> values) {
  Beta0 out;
  bool in_plus = false;
  bool in_minus = false;
  for (const double v : values) {
    const bool p = v >= 0.0;
    const bool m = v <= 0.0;
    if (p && !in_plus) ++out.plus;
    if (m && !in_minus) ++out.minus;
    in_plus = p;
    in_minus = m;
  }
  return out;
}

BasisTable::BasisTable(const FieldModel& model, std::vector<double> points)
    : points_(std::move(points)), terms_(model.size()), table_(points_.size() * terms_) {
  std::vector<BasisValue> phi(terms_);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    model.basis_all(points_[i], phi);
    for (std::size_t k = 0; k < terms_; ++k) table_[k * points_.size() + i] = phi[k].value;
  }
}

void BasisTable::difference(std::span<const double> coefficients, std::span<const double> mu,
                            std::span<double> out) const {
  const auto n = static_cast<Eigen::Index>(points_.size());
  const auto m = static_cast<Eigen::Index>(terms_);
  Eigen::Map<Eigen::VectorXd> result(out.data(), n);
  result.noalias() = Eigen::Map<const Eigen::MatrixXd>(table_.data(), n, m) *
                     Eigen::Map<const Eigen::VectorXd>(coefficients.data(), m);
  result -= Eigen::Map<const Eigen::VectorXd>(mu.data(), n);
}

NodalOracle::NodalOracle(const FieldModel& model, const ThresholdFn& threshold, int resolution)
    : model_(model),
      threshold_(threshold),
      table_(model, scan_points(model.domain(), std::max(resolution, 2))) {
  mu_.reserve(table_.points().size());
  for (const double x : table_.points()) mu_.push_back(threshold_(x));
}

OracleResult NodalOracle::operator()(const SamplePath& path) const {
  const auto& x = table_.points();
  const std::size_t n = x.size();
  std::vector<double> v(n);
  table_.difference(path.coefficients(), mu_, v);
  Difference f(path, threshold_);
  OracleResult out;

  // Local minima of |u - mu| between samples of one strict sign.
  std::vector<Sample> hidden;
  auto probe = [&](std::size_t centre, std::size_t lo, std::size_t hi) {
    const int s = sign_of(v[centre]);
    if (s == 0 || sign_of(v[lo]) != s || sign_of(v[hi]) != s) return;
    const double xm = golden_section_min([&](double t) { return s * f(t); }, x[lo], x[hi]);
    const double fm = f(xm);
    const double level = s * fm;
    if (level < 0.0) {
      hidden.push_back({xm, fm});
    } else if (std::min(level, std::abs(v[centre])) < kDegenerateLevel) {
      out.degenerate = true;
    }
  };
  if (std::abs(v[0]) <= std::abs(v[1])) probe(0, 0, 1);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double a = std::abs(v[i]);
    if (a <= std::abs(v[i - 1]) && a <= std::abs(v[i + 1])) probe(i, i - 1, i + 1);
  }
  if (std::abs(v[n - 1]) <= std::abs(v[n - 2])) probe(n - 1, n - 2, n - 1);

  auto finish = [&](std::span<const double> xs, std::span<const double> vs) {
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (vs[i] == 0.0) {
        out.zeros.push_back(xs[i]);
      } else if (i > 0 && vs[i - 1] != 0.0 && (vs[i - 1] > 0.0) != (vs[i] > 0.0)) {
        out.zeros.push_back(bisect(f, xs[i - 1], xs[i], vs[i - 1]));
      }
    }
    const Beta0 b = cubical_beta0(vs);
    out.beta0_plus = b.plus;
    out.beta0_minus = b.minus;
  };
  if (hidden.empty()) {
    finish(x, v);
    return out;
  }

  std::sort(hidden.begin(), hidden.end(), [](const Sample& p, const Sample& q) { return p.x < q.x; });
  std::vector<double> mx, mv;
  mx.reserve(n + hidden.size());
  mv.reserve(n + hidden.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (; j < hidden.size() && hidden[j].x < x[i]; ++j) {
      mx.push_back(hidden[j].x);
      mv.push_back(hidden[j].v);
    }
    mx.push_back(x[i]);
    mv.push_back(v[i]);
  }
  for (; j < hidden.size(); ++j) {
    mx.push_back(hidden[j].x);
    mv.push_back(hidden[j].v);
  }
  finish(mx, mv);
  return out;
}

int default_oracle_resolution(const FieldModel& model) {
  const Interval dom = model.domain();
  const double zeros = integrate(zero_density_profile(model), dom.a, dom.b, 1e-8, 64);
  return 4096 * std::max(1, static_cast<int>(std::ceil(zeros)));
}

OracleResult oracle_beta0(const SamplePath& path, const ThresholdFn& threshold, int resolution) {
  const int r = resolution > 0 ? resolution : default_oracle_resolution(path.model());
  return NodalOracle(path.model(), threshold, r)(path);
}

bool double_crossover(double v_alpha, double v_mid, double v_beta) {
  return (v_alpha >= 0.0 && v_mid <= 0.0 && v_beta >= 0.0) ||
         (v_alpha <= 0.0 && v_mid >= 0.0 && v_beta <= 0.0);
}

bool admissible_values(std::span<const double> dyadic_values, int depth) {
  if (depth < 0) throw DomainError("admissibility depth must be nonnegative");
  const std::size_t last = std::size_t{1} << (depth + 1);
  if (dyadic_values.size() != last + 1) throw DomainError("expected 2^(depth+1)+1 dyadic values");
  for (int d = 0; d <= depth; ++d) {
    const std::size_t step = last >> d;
    for (std::size_t k = 0; k + step <= last; k += step) {
      if (double_crossover(dyadic_values[k], dyadic_values[k + step / 2], dyadic_values[k + step])) {
        return false;
      }
    }
  }
  return true;
}

bool admissible_to_depth(const SamplePath& path, const ThresholdFn& threshold, double alpha,
                         double beta, int depth) {
  if (depth < 0) throw DomainError("admissibility depth must be nonnegative");
  const std::size_t last = std::size_t{1} << (depth + 1);
  Difference f(path, threshold);
  std::vector<double> values(last + 1);
  for (std::size_t i = 0; i <= last; ++i) {
    values[i] = f(i == last ? beta : alpha + (beta - alpha) * static_cast<double>(i) / last);
  }
  return admissible_values(values, depth);
}

double inadmissibility_bound(double c0, double delta) {
  return 4.0 * c0 / 3.0 * delta * delta * delta;
}

NodalReport verify_match(const SamplePath& path, const ThresholdFn& threshold,
                         std::span<const double> grid, const OracleResult& nodal) {
  Difference f(path, threshold);
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) values[k] = f(grid[k]);
  const Beta0 q = cubical_beta0(values);
  NodalReport report;
  report.beta0_N_plus = nodal.beta0_plus;
  report.beta0_N_minus = nodal.beta0_minus;
  report.beta0_Q_plus = q.plus;
  report.beta0_Q_minus = q.minus;
  report.zeros = nodal.zeros;
  report.degenerate = nodal.degenerate;
  report.match_plus = report.beta0_N_plus == report.beta0_Q_plus;
  report.match_minus = report.beta0_N_minus == report.beta0_Q_minus;
  return report;
}

NodalReport verify_match(const SamplePath& path, const ThresholdFn& threshold,
                         std::span<const double> grid, const NodalOracle& oracle) {
  return verify_match(path, threshold, grid, oracle(path));
}

NodalReport verify_match(const SamplePath& path, const ThresholdFn& threshold,
                         std::span<const double> grid) {
  const NodalOracle oracle(path.model(), threshold, default_oracle_resolution(path.model()));
  return verify_match(path, threshold, grid, oracle);
}

bool validation_criterion(const SamplePath& path, const ThresholdFn& threshold,
                          std::span<const double> grid, const OracleResult& oracle, int depth) {
  if (oracle.degenerate) return false;
  Difference f(path, threshold);
  for (const double x : grid) {
    if (f(x) == 0.0) return false;
  }
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!admissible_to_depth(path, threshold, grid[k - 1], grid[k], depth)) return false;
  }
  return true;
}

}  // namespace topsamp

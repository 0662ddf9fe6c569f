#include "topsamp/orthant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "topsamp/errors.hpp"
#include "topsamp/parallel.hpp"
#include "topsamp/planner.hpp"
#include "topsamp/quadrature.hpp"
#include "topsamp/rng.hpp"
#include "topsamp/topology.hpp"

namespace topsamp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::uint64_t kChunk = 65536;
constexpr double kRoundingFloor = 1e-13;

const double kInvSqrt6 = 1.0 / std::sqrt(6.0);
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const double kInvSqrt3 = 1.0 / std::sqrt(3.0);

/// Coordinates of (f0, f1, f2) in the limit frame.
std::array<double, 3> to_frame(double f0, double f1, double f2) {
  return {((f0 - f1) - (f1 - f2)) * kInvSqrt6, (f0 - f2) * kInvSqrt2,
          (f0 + f1 + f2) * kInvSqrt3};
}

double relative_error(double observed, double predicted) {
  return predicted != 0.0 ? std::abs(observed - predicted) / std::abs(predicted)
                          : std::abs(observed);
}

double error_order(const std::vector<double>& deltas, const std::vector<double>& errors) {
  std::vector<double> d, e;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i] > kRoundingFloor) {
      d.push_back(deltas[i]);
      e.push_back(errors[i]);
    }
  }
  if (d.size() < 2) return std::numeric_limits<double>::infinity();
  return loglog_slope(d, e);
}

}  // namespace

double gaussian_tail(double x) {
  return std::sqrt(std::numbers::pi / 2.0) * std::erfc(x / std::numbers::sqrt2);
}

double s_alpha(std::span<const double> alpha) {
  if (alpha.empty()) throw DomainError("s_alpha needs n >= 1");
  const int n = static_cast<int>(alpha.size());
  const double a1 = alpha[0];
  double rest = 0.0;
  for (std::size_t k = 1; k < alpha.size(); ++k) rest += alpha[k] * alpha[k];
  const double integral = integrate(
      [a1, n](double s) { return std::pow(s - a1, n - 1) * std::exp(-0.5 * s * s); }, a1,
      a1 + 40.0, 1e-13, 64);
  const double norm = 2.0 / (std::pow(2.0, 0.5 * n) * std::tgamma(0.5 * n));
  return norm * std::exp(-0.5 * rest) * integral;
}

double s_alpha_n3_closed(const std::array<double, 3>& alpha) {
  const double a1 = alpha[0];
  return std::sqrt(2.0 / std::numbers::pi) *
         std::exp(-0.5 * (alpha[1] * alpha[1] + alpha[2] * alpha[2])) *
         (-a1 * std::exp(-0.5 * a1 * a1) + (1.0 + a1 * a1) * gaussian_tail(a1));
}

double s_alpha_pm_n3(const std::array<double, 3>& alpha) {
  return 2.0 * std::exp(-0.5 * (alpha[1] * alpha[1] + alpha[2] * alpha[2])) *
         (1.0 + alpha[0] * alpha[0]);
}

SymmetricEigen jacobi_eigen(const Eigen::Matrix3d& input) {
  Eigen::Matrix3d a = 0.5 * (input + input.transpose());
  Eigen::Matrix3d v = Eigen::Matrix3d::Identity();
  constexpr int kPairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (const auto& pair : kPairs) {
      const int p = pair[0];
      const int q = pair[1];
      const double apq = a(p, q);
      if (apq == 0.0) continue;
      if (std::abs(apq) <= kEps * std::sqrt(std::abs(a(p, p) * a(q, q)))) {
        a(p, q) = a(q, p) = 0.0;
        continue;
      }
      rotated = true;
      const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
      const double t = std::abs(theta) > 1e150
                           ? 0.5 / theta
                           : std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
      const double c = 1.0 / std::sqrt(t * t + 1.0);
      const double s = t * c;
      for (int k = 0; k < 3; ++k) {
        const double akp = a(k, p), akq = a(k, q);
        a(k, p) = c * akp - s * akq;
        a(k, q) = s * akp + c * akq;
      }
      for (int k = 0; k < 3; ++k) {
        const double apk = a(p, k), aqk = a(q, k);
        a(p, k) = c * apk - s * aqk;
        a(q, k) = s * apk + c * aqk;
      }
      a(p, q) = a(q, p) = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double vkp = v(k, p), vkq = v(k, q);
        v(k, p) = c * vkp - s * vkq;
        v(k, q) = s * vkp + c * vkq;
      }
    }
    if (!rotated) break;
  }
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });
  SymmetricEigen out;
  for (int k = 0; k < 3; ++k) {
    out.values[static_cast<std::size_t>(k)] = a(order[static_cast<std::size_t>(k)],
                                                order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

const Eigen::Matrix3d& LocalGaussian::limit_frame() {
  static const Eigen::Matrix3d frame = [] {
    Eigen::Matrix3d m;
    m.col(0) << kInvSqrt6, -2.0 * kInvSqrt6, kInvSqrt6;
    m.col(1) << kInvSqrt2, 0.0, -kInvSqrt2;
    m.col(2) << kInvSqrt3, kInvSqrt3, kInvSqrt3;
    return m;
  }();
  return frame;
}

LocalGaussian::LocalGaussian(double x, double delta, const Eigen::Matrix3d& cov,
                             const Eigen::Matrix3d& rotated, const std::array<double, 3>& tau,
                             const std::array<double, 3>& rotated_tau, double pd_floor)
    : x_(x), delta_(delta), cov_(cov), tau_(tau) {
  SymmetricEigen w = jacobi_eigen(rotated);
  for (int k = 0; k < 3; ++k) {
    if (w.vectors(k, k) < 0.0) w.vectors.col(k) *= -1.0;
    double p = 0.0;
    for (int j = 0; j < 3; ++j) p += rotated_tau[static_cast<std::size_t>(j)] * w.vectors(j, k);
    projected_tau_[static_cast<std::size_t>(k)] = p;
  }
  if (!(w.values[0] > pd_floor)) {
    throw PdFailure("local covariance is not positive definite");
  }
  eig_.values = w.values;
  eig_.vectors = limit_frame() * w.vectors;
}

LocalGaussian LocalGaussian::from_model(const FieldModel& model, const ThresholdFn& threshold,
                                        double x, double delta) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  const Interval dom = model.domain();
  const std::array<double, 3> p{x, x + 0.5 * delta, x + delta};
  if (!dom.contains(p[0]) || !dom.contains(p[2])) {
    throw DomainError("[x, x + delta] must lie in the model domain");
  }
  Eigen::Matrix3d cov;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      cov(i, j) = cov(j, i) =
          correlation(model, p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
    }
  }

  const std::size_t n = model.size();
  std::array<std::vector<BasisValue>, 3> phi;
  for (std::size_t i = 0; i < 3; ++i) {
    phi[i].resize(n);
    model.basis_all(p[i], phi[i]);
  }
  Eigen::MatrixXd d(3, static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const auto f = to_frame(phi[0][k].value, phi[1][k].value, phi[2][k].value);
    for (int r = 0; r < 3; ++r) d(r, static_cast<Eigen::Index>(k)) = f[static_cast<std::size_t>(r)];
  }
  Eigen::Matrix3d rotated;
  if (model.diagonal()) {
    const std::vector<double> var = model.variances();
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const auto kk = static_cast<Eigen::Index>(k);
          s += var[k] * d(i, kk) * d(j, kk);
        }
        rotated(i, j) = rotated(j, i) = s;
      }
    }
  } else {
    const Eigen::MatrixXd y = d * model.factor();
    rotated = y * y.transpose();
    rotated = 0.5 * (rotated + rotated.transpose()).eval();
  }

  const std::array<double, 3> tau{threshold(p[0]), threshold(p[1]), threshold(p[2])};
  // Rounding in the second differences perturbs the smallest eigenvalue by
  // about eps sqrt(rotated(0,0) trace).
  const double floor = 16.0 * kEps * std::sqrt(std::abs(rotated(0, 0)) * rotated.trace());
  return LocalGaussian(x, delta, cov, rotated, tau, to_frame(tau[0], tau[1], tau[2]), floor);
}

LocalGaussian LocalGaussian::from_covariance(const Eigen::Matrix3d& covariance,
                                             const std::array<double, 3>& tau) {
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw DomainError("covariance must be symmetric");
  }
  const Eigen::Matrix3d& v = limit_frame();
  const Eigen::Matrix3d rotated = v.transpose() * covariance * v;
  return LocalGaussian(0.0, 0.0, covariance, rotated, tau, to_frame(tau[0], tau[1], tau[2]),
                       16.0 * kEps * rotated.cwiseAbs().maxCoeff());
}

double LocalGaussian::determinant() const {
  return eig_.values[0] * eig_.values[1] * eig_.values[2];
}

ExpansionPrediction predict_expansion(const CorrelationJet& jet, const BasisValue& mu) {
  ExpansionPrediction out;
  out.lambda = {jet.detR / (96.0 * jet.m33), jet.m33 / (2.0 * jet.R00), 3.0 * jet.R00};
  out.tau = {(jet.m31 * mu.value - jet.m32 * mu.d1 + jet.m33 * mu.d2) /
                 (4.0 * std::sqrt(6.0) * jet.m33),
             (jet.R10 * mu.value - jet.R00 * mu.d1) / (std::numbers::sqrt2 * jet.R00),
             std::sqrt(3.0) * mu.value};
  out.det = jet.detR / 64.0;
  return out;
}

EigenExpansion eigen_expansion_check(const FieldModel& model, const ThresholdFn& threshold,
                                     double x, std::span<const double> deltas) {
  EigenExpansion out;
  out.x = x;
  out.predicted =
      predict_expansion(correlation_jet(model, x, G2Check::kStrictPositive), threshold.jet(x));
  const Eigen::Matrix3d& frame = LocalGaussian::limit_frame();
  std::vector<double> ds;
  std::array<std::vector<double>, 3> lambda_err, tau_err;
  std::vector<double> det_err;
  for (const double delta : deltas) {
    const LocalGaussian local = LocalGaussian::from_model(model, threshold, x, delta);
    ExpansionRow row;
    row.delta = delta;
    const double d2 = delta * delta;
    const std::array<double, 3> lambda_scale{d2 * d2, d2, 1.0};
    const std::array<double, 3> tau_scale{d2, delta, 1.0};
    for (std::size_t k = 0; k < 3; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      row.lambda[k] = local.eigenvalues()[k] / lambda_scale[k];
      row.tau[k] = local.projected_tau()[k] / tau_scale[k];
      row.angle[k] = 2.0 * std::asin(std::min(
                               1.0, 0.5 * (local.eigenvectors().col(kk) - frame.col(kk)).norm()));
      row.lambda_error[k] = relative_error(row.lambda[k], out.predicted.lambda[k]);
      row.tau_error[k] = relative_error(row.tau[k], out.predicted.tau[k]);
      lambda_err[k].push_back(row.lambda_error[k]);
      tau_err[k].push_back(row.tau_error[k]);
    }
    row.det = local.determinant() / (d2 * d2 * d2);
    row.det_error = relative_error(row.det, out.predicted.det);
    det_err.push_back(row.det_error);
    ds.push_back(delta);
    out.rows.push_back(row);
  }
  for (std::size_t k = 0; k < 3; ++k) {
    out.lambda_order[k] = error_order(ds, lambda_err[k]);
    out.tau_order[k] = error_order(ds, tau_err[k]);
  }
  out.det_order = error_order(ds, det_err);
  return out;
}

CrossoverEstimate crossover_prob_mc(const LocalGaussian& local, std::uint64_t trials,
                                    std::uint64_t seed, int workers) {
  if (trials < 1) throw DomainError("trials must be at least 1");
  const std::size_t chunks = static_cast<std::size_t>((trials + kChunk - 1) / kChunk);
  Eigen::Matrix3d scaled = local.eigenvectors();
  for (int k = 0; k < 3; ++k) scaled.col(k) *= std::sqrt(local.eigenvalues()[static_cast<std::size_t>(k)]);
  const std::array<double, 3> tau = local.tau();
  std::vector<std::uint64_t> hits(chunks, 0);
  parallel_for(chunks, workers, [&](std::size_t c) {
    CounterRng rng(seed, c);
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min<std::uint64_t>(trials, begin + kChunk);
    std::uint64_t h = 0;
    for (std::uint64_t t = begin; t < end; ++t) {
      const double z0 = rng.normal(), z1 = rng.normal(), z2 = rng.normal();
      double v[3];
      for (int i = 0; i < 3; ++i) {
        v[i] = scaled(i, 0) * z0 + scaled(i, 1) * z1 + scaled(i, 2) * z2 -
               tau[static_cast<std::size_t>(i)];
      }
      if (double_crossover(v[0], v[1], v[2])) ++h;
    }
    hits[c] = h;
  });
  CrossoverEstimate out;
  out.trials = trials;
  for (const std::uint64_t h : hits) out.hits += h;
  out.probability = static_cast<double>(out.hits) / static_cast<double>(trials);
  out.standard_error =
      std::sqrt(out.probability * (1.0 - out.probability) / static_cast<double>(trials));
  return out;
}

CrossoverEstimate crossover_prob_mc(const FieldModel& model, const ThresholdFn& threshold,
                                    double x, double delta, std::uint64_t trials,
                                    std::uint64_t seed, int workers) {
  return crossover_prob_mc(LocalGaussian::from_model(model, threshold, x, delta), trials, seed,
                           workers);
}

}  // namespace topsamp

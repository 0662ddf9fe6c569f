#include "topsamp/field_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "topsamp/errors.hpp"
#include "topsamp/rng.hpp"

namespace topsamp {

namespace {

constexpr double kPsdTolerance = 1e-12;
constexpr double kG2Tolerance = 1e-12;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

}  // namespace

bool Interval::contains(double x) const {
  const double slack = 1e-12 * (b - a);
  return x >= a - slack && x <= b + slack;
}

struct FieldModel::Impl {
  Family family = Family::kCustom;
  int truncation = 0;
  std::size_t size = 0;
  Interval domain;
  double period = 1.0;
  std::vector<double> amplitudes;
  std::vector<BasisFn> custom;
  bool diagonal = true;
  std::vector<double> variances;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd factor;
};

namespace {

void factor_diagonal(FieldModel::Impl& impl) {
  const std::size_t n = impl.variances.size();
  double largest = 0.0;
  for (double v : impl.variances) largest = std::max(largest, v);
  const double tol = kPsdTolerance * largest;
  impl.covariance = Eigen::MatrixXd::Zero(n, n);
  impl.factor = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double v = impl.variances[j];
    if (!std::isfinite(v) || v < -tol) {
      throw FactorizationFailure("coefficient variance " + std::to_string(j) +
                                 " is negative or not finite");
    }
    v = std::max(v, 0.0);
    impl.variances[j] = v;
    impl.covariance(j, j) = v;
    impl.factor(j, j) = std::sqrt(v);
  }
}

void factor_full(FieldModel::Impl& impl, const Eigen::MatrixXd& cov) {
  const Eigen::Index n = cov.rows();
  if (cov.cols() != n || static_cast<std::size_t>(n) != impl.size) {
    throw FactorizationFailure("covariance must be a square matrix matching the basis size");
  }
  if (!cov.allFinite()) throw FactorizationFailure("covariance has non-finite entries");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw FactorizationFailure("covariance is not symmetric");
  }
  const double largest = n > 0 ? cov.diagonal().maxCoeff() : 0.0;
  const double tol = kPsdTolerance * std::max(largest, 0.0);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  Eigen::VectorXd d = ldlt.vectorD();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(d(i)) || d(i) < -tol) {
      throw FactorizationFailure("covariance is not positive semidefinite");
    }
    d(i) = std::max(d(i), 0.0);
  }
  Eigen::MatrixXd l = ldlt.matrixL();
  Eigen::MatrixXd f = l * d.cwiseSqrt().asDiagonal();
  f = ldlt.transpositionsP().transpose() * f;
  const double residual = n > 0 ? (f * f.transpose() - cov).cwiseAbs().maxCoeff() : 0.0;
  if (!(residual <= std::max(tol, 64.0 * std::numeric_limits<double>::epsilon() * largest))) {
    throw FactorizationFailure("covariance is not positive semidefinite");
  }
  impl.diagonal = false;
  impl.covariance = cov;
  impl.factor = std::move(f);
  impl.variances.assign(cov.diagonal().data(), cov.diagonal().data() + n);
}

}  // namespace

FieldModel::FieldModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

FieldModel FieldModel::chebyshev(int n) {
  if (n < 0) throw DomainError("truncation must be nonnegative");
  auto impl = std::make_shared<Impl>();
  impl->family = Family::kChebyshev;
  impl->truncation = n;
  impl->size = static_cast<std::size_t>(n) + 1;
  impl->domain = {-1.0, 1.0};
  impl->variances.assign(impl->size, 1.0);
  factor_diagonal(*impl);
  return FieldModel(std::move(impl));
}

FieldModel FieldModel::cosine_neumann(int n) {
  if (n < 0) throw DomainError("truncation must be nonnegative");
  auto impl = std::make_shared<Impl>();
  impl->family = Family::kCosineNeumann;
  impl->truncation = n;
  impl->size = static_cast<std::size_t>(n) + 1;
  impl->domain = {0.0, 1.0};
  impl->variances.assign(impl->size, 1.0);
  factor_diagonal(*impl);
  return FieldModel(std::move(impl));
}

FieldModel FieldModel::periodic(std::vector<double> amplitudes, double period) {
  if (amplitudes.empty()) throw DomainError("periodic model needs at least one amplitude");
  if (!(period > 0.0) || !std::isfinite(period)) throw DomainError("period must be positive");
  if (std::none_of(amplitudes.begin(), amplitudes.end(), [](double a) { return a != 0.0; })) {
    throw DomainError("periodic model needs a nonzero amplitude");
  }
  auto impl = std::make_shared<Impl>();
  impl->family = Family::kPeriodic;
  impl->truncation = static_cast<int>(amplitudes.size()) - 1;
  impl->size = 2 * amplitudes.size() - 1;
  impl->domain = {0.0, period};
  impl->period = period;
  impl->variances.assign(impl->size, 0.0);
  impl->variances[0] = amplitudes[0] * amplitudes[0];
  for (std::size_t k = 1; k < amplitudes.size(); ++k) {
    impl->variances[2 * k - 1] = amplitudes[k] * amplitudes[k];
    impl->variances[2 * k] = amplitudes[k] * amplitudes[k];
  }
  impl->amplitudes = std::move(amplitudes);
  factor_diagonal(*impl);
  return FieldModel(std::move(impl));
}

FieldModel FieldModel::periodic_equal(int n, double period) {
  if (n < 1) throw DomainError("periodic_equal needs N >= 1");
  std::vector<double> a(static_cast<std::size_t>(n) + 1, 1.0 / std::sqrt(static_cast<double>(n)));
  a[0] = 0.0;
  return periodic(std::move(a), period);
}

FieldModel FieldModel::polynomial_binomial(int n) {
  if (n < 0) throw DomainError("truncation must be nonnegative");
  auto impl = std::make_shared<Impl>();
  impl->family = Family::kPolynomialBinomial;
  impl->truncation = n;
  impl->size = static_cast<std::size_t>(n) + 1;
  impl->domain = {-3.0, 3.0};
  impl->variances.resize(impl->size);
  for (int k = 0; k <= n; ++k) impl->variances[static_cast<std::size_t>(k)] = binomial(n, k);
  factor_diagonal(*impl);
  return FieldModel(std::move(impl));
}

FieldModel FieldModel::polynomial_unit(int n) {
  if (n < 0) throw DomainError("truncation must be nonnegative");
  auto impl = std::make_shared<Impl>();
  impl->family = Family::kPolynomialUnit;
  impl->truncation = n;
  impl->size = static_cast<std::size_t>(n) + 1;
  impl->domain = {-3.0, 3.0};
  impl->variances.assign(impl->size, 1.0);
  factor_diagonal(*impl);
  return FieldModel(std::move(impl));
}

FieldModel FieldModel::custom(std::vector<BasisFn> basis, Interval domain,
                              std::vector<double> variances) {
  if (!(domain.a < domain.b)) throw DomainError("domain must satisfy a < b");
  if (basis.size() != variances.size()) {
    throw DomainError("custom model needs one variance per basis function");
  }
  auto impl = std::make_shared<Impl>();
  impl->family = Family::kCustom;
  impl->size = basis.size();
  impl->truncation = static_cast<int>(basis.size()) - 1;
  impl->domain = domain;
  impl->custom = std::move(basis);
  impl->variances = std::move(variances);
  factor_diagonal(*impl);
  return FieldModel(std::move(impl));
}

FieldModel FieldModel::builtin(Family family, int n) {
  switch (family) {
    case Family::kChebyshev: return chebyshev(n);
    case Family::kCosineNeumann: return cosine_neumann(n);
    case Family::kPeriodic: return periodic_equal(n);
    case Family::kPolynomialBinomial: return polynomial_binomial(n);
    case Family::kPolynomialUnit: return polynomial_unit(n);
    case Family::kCustom: break;
  }
  throw DomainError("custom family has no built-in construction");
}

FieldModel FieldModel::with_variances(std::vector<double> variances) const {
  if (variances.size() != impl_->size) {
    throw FactorizationFailure("variance vector does not match the basis size");
  }
  auto impl = std::make_shared<Impl>(*impl_);
  impl->diagonal = true;
  impl->variances = std::move(variances);
  factor_diagonal(*impl);
  return FieldModel(std::move(impl));
}

FieldModel FieldModel::with_covariance(const Eigen::MatrixXd& covariance) const {
  auto impl = std::make_shared<Impl>(*impl_);
  factor_full(*impl, covariance);
  return FieldModel(std::move(impl));
}

Family FieldModel::family() const { return impl_->family; }
int FieldModel::truncation() const { return impl_->truncation; }
std::size_t FieldModel::size() const { return impl_->size; }
Interval FieldModel::domain() const { return impl_->domain; }
double FieldModel::period() const { return impl_->period; }
const std::vector<double>& FieldModel::amplitudes() const { return impl_->amplitudes; }
bool FieldModel::diagonal() const { return impl_->diagonal; }
std::vector<double> FieldModel::variances() const { return impl_->variances; }
const Eigen::MatrixXd& FieldModel::covariance() const { return impl_->covariance; }
const Eigen::MatrixXd& FieldModel::factor() const { return impl_->factor; }

std::string FieldModel::describe() const {
  std::ostringstream os;
  os << family_name(impl_->family) << "(N=" << impl_->truncation;
  if (impl_->family == Family::kPeriodic) os << ", L=" << impl_->period;
  os << (impl_->diagonal ? ", diagonal" : ", full") << " covariance)";
  return os.str();
}

void FieldModel::basis_all(double x, std::span<BasisValue> out) const {
  const Impl& m = *impl_;
  switch (m.family) {
    case Family::kChebyshev: basis::chebyshev(x, out); return;
    case Family::kCosineNeumann: basis::cosine(x, out); return;
    case Family::kPeriodic: basis::trigonometric(x, m.period, out); return;
    case Family::kPolynomialBinomial:
    case Family::kPolynomialUnit: basis::monomial(x, out); return;
    case Family::kCustom:
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = m.custom[k](x);
      return;
  }
}

SamplePath::SamplePath(FieldModel model, std::vector<double> coefficients)
    : model_(std::move(model)), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != model_.size()) {
    throw DomainError("coefficient vector does not match the basis size");
  }
}

ThresholdFn::ThresholdFn(Kind kind, double tau, std::vector<double> coefficients)
    : kind_(kind), tau_(tau), coefficients_(std::move(coefficients)) {}

ThresholdFn ThresholdFn::zero() { return ThresholdFn(Kind::kZero, 0.0, {}); }
ThresholdFn ThresholdFn::constant(double tau) { return ThresholdFn(Kind::kConstant, tau, {tau}); }
ThresholdFn ThresholdFn::polynomial(std::vector<double> coefficients) {
  const double tau = coefficients.empty() ? 0.0 : coefficients.front();
  return ThresholdFn(Kind::kPolynomial, tau, std::move(coefficients));
}
ThresholdFn ThresholdFn::cubic_shift(double tau) {
  return ThresholdFn(Kind::kCubicShift, tau, {tau, 1.0, 0.0, -1.0});
}

bool ThresholdFn::is_zero() const {
  return std::all_of(coefficients_.begin(), coefficients_.end(), [](double c) { return c == 0.0; });
}

double ThresholdFn::operator()(double x) const { return jet(x).value; }

BasisValue ThresholdFn::jet(double x) const {
  // Horner for the polynomial and its first two derivatives.
  double p = 0.0, dp = 0.0, ddp = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
    ddp = ddp * x + 2.0 * dp;
    dp = dp * x + p;
    p = p * x + *it;
  }
  return {p, dp, ddp};
}

std::string ThresholdFn::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::kZero: return "zero";
    case Kind::kConstant: os << "constant(" << tau_ << ")"; return os.str();
    case Kind::kCubicShift: os << "cubic_shift(" << tau_ << ")"; return os.str();
    case Kind::kPolynomial:
      os << "polynomial(";
      for (std::size_t i = 0; i < coefficients_.size(); ++i) os << (i ? "," : "") << coefficients_[i];
      os << ")";
      return os.str();
  }
  return "unknown";
}

CorrelationJet CorrelationJet::from_entries(double x, double r00, double r10, double r11,
                                            double r20, double r21, double r22) {
  CorrelationJet j;
  j.x = x;
  j.R00 = r00;
  j.R10 = r10;
  j.R11 = r11;
  j.R20 = r20;
  j.R21 = r21;
  j.R22 = r22;
  j.m33 = r00 * r11 - r10 * r10;
  j.m32 = r00 * r21 - r10 * r20;
  j.m31 = r10 * r21 - r11 * r20;
  // Cofactor expansion along the last row.
  j.detR = r20 * j.m31 - r21 * j.m32 + r22 * j.m33;
  return j;
}

Eigen::Matrix3d CorrelationJet::matrix() const {
  Eigen::Matrix3d m;
  m << R00, R10, R20, R10, R11, R21, R20, R21, R22;
  return m;
}

bool CorrelationJet::positive_definite() const { return R00 > 0.0 && m33 > 0.0 && detR > 0.0; }

BasisValue basis_eval(const FieldModel& model, std::size_t k, double x) {
  if (k >= model.size()) throw std::out_of_range("basis index out of range");
  if (!model.domain().contains(x)) throw DomainError("point outside the model domain");
  std::vector<BasisValue> phi(model.size());
  model.basis_all(x, phi);
  return phi[k];
}

double correlation(const FieldModel& model, double x, double y) {
  const Interval dom = model.domain();
  if (!dom.contains(x) || !dom.contains(y)) throw DomainError("point outside the model domain");
  const std::size_t n = model.size();
  std::vector<BasisValue> px(n), py(n);
  model.basis_all(x, px);
  model.basis_all(y, py);
  double r = 0.0;
  if (model.diagonal()) {
    const std::vector<double> var = model.variances();
    for (std::size_t j = 0; j < n; ++j) r += var[j] * (px[j].value * py[j].value);
  } else {
    const Eigen::MatrixXd& f = model.factor();
    Eigen::VectorXd vx(n), vy(n);
    for (std::size_t j = 0; j < n; ++j) {
      vx(static_cast<Eigen::Index>(j)) = px[j].value;
      vy(static_cast<Eigen::Index>(j)) = py[j].value;
    }
    const Eigen::VectorXd bx = f.transpose() * vx;
    const Eigen::VectorXd by = f.transpose() * vy;
    for (Eigen::Index k = 0; k < bx.size(); ++k) r += bx(k) * by(k);
  }
  return r;
}

CorrelationJet correlation_jet(const FieldModel& model, double x, G2Check check) {
  if (!model.domain().contains(x)) throw DomainError("point outside the model domain");
  const std::size_t n = model.size();
  std::vector<BasisValue> phi(n);
  model.basis_all(x, phi);

  Eigen::MatrixXd jet(3, static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    jet(0, c) = phi[j].value;
    jet(1, c) = phi[j].d1;
    jet(2, c) = phi[j].d2;
  }
  const Eigen::MatrixXd weighted = jet * model.factor();

  double r[3][3] = {};
  if (model.diagonal()) {
    const std::vector<double> var = model.variances();
    for (int k = 0; k < 3; ++k) {
      for (int l = 0; l <= k; ++l) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const auto c = static_cast<Eigen::Index>(j);
          s += var[j] * (jet(k, c) * jet(l, c));
        }
        r[k][l] = s;
      }
    }
  } else {
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l <= k; ++l) r[k][l] = weighted.row(k).dot(weighted.row(l));
  }

  CorrelationJet out =
      CorrelationJet::from_entries(x, r[0][0], r[1][0], r[1][1], r[2][0], r[2][1], r[2][2]);
  if (weighted.cols() >= 3) {
    const Eigen::MatrixXd qr = weighted.transpose().householderQr().matrixQR();
    const double p = qr(0, 0) * qr(1, 1) * qr(2, 2);
    out.detR = p * p;
  } else {
    out.detR = 0.0;
  }

  if (check == G2Check::kNone) return out;
  const bool strict = check == G2Check::kStrictPositive;
  const double m33_floor = strict ? 0.0 : kG2Tolerance * out.R00 * out.R11;
  const double det_floor = strict ? 0.0 : kG2Tolerance * out.R00 * out.R11 * out.R22;
  if (!(out.R00 > 0.0) || !(out.m33 > m33_floor) || !(out.detR > det_floor)) {
    std::ostringstream os;
    os.precision(17);
    os << "correlation matrix not positive definite at x=" << x << " (R00=" << out.R00
       << ", m33=" << out.m33 << ", detR=" << out.detR << ")";
    throw G2Violation(os.str());
  }
  return out;
}

SamplePath sample_path(const FieldModel& model, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  return sample_path(model, rng);
}

SamplePath sample_path(const FieldModel& model, CounterRng& rng) {
  const auto n = static_cast<Eigen::Index>(model.size());
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
  std::vector<double> g(static_cast<std::size_t>(n));
  if (model.diagonal()) {
    const Eigen::MatrixXd& f = model.factor();
    for (Eigen::Index i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = f(i, i) * z(i);
  } else {
    const Eigen::VectorXd v = model.factor() * z;
    for (Eigen::Index i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = v(i);
  }
  return SamplePath(model, std::move(g));
}

PathValue eval_path(const SamplePath& path, double x) {
  const FieldModel& model = path.model();
  if (!model.domain().contains(x)) throw DomainError("point outside the model domain");
  std::vector<BasisValue> phi(model.size());
  model.basis_all(x, phi);
  PathValue out;
  const auto g = path.coefficients();
  for (std::size_t k = 0; k < phi.size(); ++k) {
    out.value += g[k] * phi[k].value;
    out.slope += g[k] * phi[k].d1;
  }
  return out;
}

BasisValue threshold_jet(const ThresholdFn& threshold, double x) { return threshold.jet(x); }

}  // namespace topsamp

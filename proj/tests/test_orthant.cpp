#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "topsamp/density.hpp"
#include "topsamp/errors.hpp"
#include "topsamp/orthant.hpp"

using namespace topsamp;

namespace {

FieldModel section_model() { return FieldModel::periodic_equal(5); }

std::vector<double> dyadic_deltas(int from, int to) {
  std::vector<double> d;
  for (int j = from; j <= to; ++j) d.push_back(std::ldexp(1.0, -j));
  return d;
}

}  // namespace

TEST_CASE("orthant factor examples") {
  const std::vector<double> zero3{0.0, 0.0, 0.0};
  CHECK(s_alpha(zero3) == doctest::Approx(1.0).epsilon(1e-12));
  for (int n = 1; n <= 6; ++n) {
    const std::vector<double> z(static_cast<std::size_t>(n), 0.0);
    CHECK(s_alpha(z) == doctest::Approx(1.0).epsilon(1e-10));
  }
  const std::vector<double> a{1.0, 0.0, 0.0};
  CHECK(s_alpha(a) == doctest::Approx(0.15069).epsilon(1e-4));
  const std::vector<double> b{0.0, 1.0, 0.0};
  CHECK(s_alpha(b) == doctest::Approx(std::exp(-0.5)).epsilon(1e-10));

  CHECK(s_alpha_n3_closed({0.0, 0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s_alpha_n3_closed({1.0, 0.0, 0.0}) == doctest::Approx(0.15069).epsilon(1e-4));
  CHECK(s_alpha_n3_closed({-1.0, 0.0, 0.0}) == doctest::Approx(3.84931).epsilon(1e-5));
  CHECK(s_alpha_n3_closed({1.0, 0.0, 0.0}) + s_alpha_n3_closed({-1.0, 0.0, 0.0}) ==
        doctest::Approx(4.0).epsilon(1e-14));
  CHECK(s_alpha_pm_n3({0.0, 0.0, 0.0}) == 2.0);
  CHECK(s_alpha_pm_n3({1.0, 0.0, 0.0}) == 4.0);
}

TEST_CASE("gaussian tail") {
  const double half = std::sqrt(std::numbers::pi / 2.0);
  CHECK(gaussian_tail(0.0) == doctest::Approx(half).epsilon(1e-15));
  CHECK(gaussian_tail(-40.0) == doctest::Approx(2.0 * half).epsilon(1e-15));
  // Mills ratio asymptotics: tail(x) ~ exp(-x^2/2)/x (1 - 1/x^2 + 3/x^4).
  const double x = 30.0;
  const double mills = std::exp(-x * x / 2.0) / x * (1.0 - 1.0 / (x * x) + 3.0 / std::pow(x, 4));
  CHECK(gaussian_tail(x) == doctest::Approx(mills).epsilon(2e-7));
}

TEST_CASE("quadrature and closed form agree on random alpha") {
  std::mt19937_64 gen(20261016);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const std::array<double, 3> a{U(gen), U(gen), U(gen)};
    const std::array<double, 3> m{-a[0], -a[1], -a[2]};
    const double q = s_alpha(a);
    const double qm = s_alpha(m);
    CHECK(std::abs(q - s_alpha_n3_closed(a)) <= 1e-8);
    CHECK(std::abs(q + qm - s_alpha_pm_n3(a)) <= 1e-10);
  }
}

TEST_CASE("jacobi reconstructs symmetric matrices") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> N01;
  for (int i = 0; i < 50; ++i) {
    Eigen::Matrix3d b;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) b(r, c) = N01(gen);
    const Eigen::Matrix3d a = b + b.transpose();
    const SymmetricEigen e = jacobi_eigen(a);
    CHECK(e.values[0] <= e.values[1]);
    CHECK(e.values[1] <= e.values[2]);
    const Eigen::Vector3d l(e.values[0], e.values[1], e.values[2]);
    const Eigen::Matrix3d back = e.vectors * l.asDiagonal() * e.vectors.transpose();
    CHECK((back - a).norm() <= 1e-13 * a.norm());
    CHECK((e.vectors.transpose() * e.vectors - Eigen::Matrix3d::Identity()).norm() <= 1e-14);
  }
}

TEST_CASE("local covariance structure") {
  const FieldModel cheb = FieldModel::chebyshev(6);
  const LocalGaussian g = LocalGaussian::from_model(cheb, ThresholdFn::zero(), -0.3, 0.05);
  CHECK(g.covariance()(0, 0) == correlation(cheb, -0.3, -0.3));
  CHECK(g.covariance()(0, 2) == g.covariance()(2, 0));
  const Eigen::Vector3d l(g.eigenvalues()[0], g.eigenvalues()[1], g.eigenvalues()[2]);
  const Eigen::Matrix3d back = g.eigenvectors() * l.asDiagonal() * g.eigenvectors().transpose();
  CHECK((back - g.covariance()).norm() <= 1e-12 * g.covariance().norm());

  const FieldModel per = FieldModel::periodic_equal(4);
  const LocalGaussian p = LocalGaussian::from_model(per, ThresholdFn::zero(), 0.37, 0.1);
  const Eigen::Matrix3d& c = p.covariance();
  CHECK(c(0, 0) == doctest::Approx(c(1, 1)).epsilon(1e-13));
  CHECK(c(1, 1) == doctest::Approx(c(2, 2)).epsilon(1e-13));
  CHECK(c(0, 1) == doctest::Approx(c(1, 2)).epsilon(1e-13));
  CHECK(c(0, 1) == doctest::Approx(correlation(per, 0.0, 0.05)).epsilon(1e-13));
  CHECK(c(0, 2) == doctest::Approx(correlation(per, 0.0, 0.1)).epsilon(1e-13));
}

TEST_CASE("determinant scaling") {
  const FieldModel m = FieldModel::chebyshev(5);
  const EigenExpansion e = eigen_expansion_check(m, ThresholdFn::zero(), 0.2, dyadic_deltas(4, 10));
  CHECK(e.predicted.det == doctest::Approx(correlation_jet(m, 0.2).detR / 64.0).epsilon(1e-14));
  CHECK(e.det_order >= 0.8);
  CHECK(e.rows.back().det_error < 1e-2);
  // Where the field is locally symmetric the first-order correction vanishes.
  const EigenExpansion p =
      eigen_expansion_check(section_model(), ThresholdFn::zero(), 0.4, dyadic_deltas(4, 10));
  CHECK(p.det_order >= 1.0);
  const EigenExpansion b =
      eigen_expansion_check(FieldModel::polynomial_binomial(5), ThresholdFn::zero(), 0.0, dyadic_deltas(4, 10));
  CHECK(b.det_order >= 1.0);
}

TEST_CASE("eigen expansion on the equal-amplitude periodic model") {
  const FieldModel m = section_model();
  const double target = 2.0 * std::numbers::pi * std::numbers::pi * 11.0;
  const EigenExpansion e = eigen_expansion_check(m, ThresholdFn::zero(), 0.3, dyadic_deltas(4, 10));
  CHECK(e.predicted.lambda[1] == doctest::Approx(target).epsilon(1e-12));
  CHECK(target == doctest::Approx(217.13).epsilon(1e-5));
  const ExpansionRow& last = e.rows.back();
  for (int k = 0; k < 3; ++k) {
    CHECK(e.lambda_order[k] >= 0.8);
    CHECK(last.lambda_error[k] <= 0.02);
    CHECK(last.angle[k] <= 1e-3);
  }
}

TEST_CASE("eigenvector limits hold for every built-in family") {
  const std::vector<FieldModel> models{FieldModel::chebyshev(7), FieldModel::cosine_neumann(6),
                                       FieldModel::periodic_equal(3),
                                       FieldModel::polynomial_binomial(6),
                                       FieldModel::polynomial_unit(5)};
  const std::vector<double> xs{0.1, 0.3, 0.2, -0.7, 0.4};
  const std::vector<double> deltas = dyadic_deltas(6, 10);
  for (std::size_t i = 0; i < models.size(); ++i) {
    const EigenExpansion e = eigen_expansion_check(models[i], ThresholdFn::cubic_shift(0.5), xs[i], deltas);
    CHECK(e.rows.back().angle[0] <= 1e-3);
    for (int k = 0; k < 3; ++k) {
      INFO(i, " ", k);
      CHECK(e.rows.back().angle[k] <= 0.02);
      CHECK(e.rows.back().lambda_error[k] <= 0.02);
      CHECK(e.rows.back().tau_error[k] <= 0.02);
    }
  }
}

TEST_CASE("constant threshold projects onto the constant direction") {
  const double tau0 = 0.7;
  const EigenExpansion e =
      eigen_expansion_check(FieldModel::chebyshev(5), ThresholdFn::constant(tau0), 0.1, dyadic_deltas(4, 10));
  CHECK(e.predicted.tau[2] == doctest::Approx(std::sqrt(3.0) * tau0).epsilon(1e-14));
  const CorrelationJet jet = correlation_jet(FieldModel::chebyshev(5), 0.1);
  CHECK(e.predicted.tau[0] == doctest::Approx(jet.m31 * tau0 / (4.0 * std::sqrt(6.0) * jet.m33)).epsilon(1e-14));
  CHECK(e.predicted.tau[1] == doctest::Approx(jet.R10 * tau0 / (std::sqrt(2.0) * jet.R00)).epsilon(1e-14));
  CHECK(e.rows.back().tau[2] == doctest::Approx(std::sqrt(3.0) * tau0).epsilon(1e-3));
}

TEST_CASE("crossover probability by simulation") {
  const LocalGaussian indep =
      LocalGaussian::from_covariance(Eigen::Matrix3d::Identity(), {0.0, 0.0, 0.0});
  const CrossoverEstimate e = crossover_prob_mc(indep, 200000, 17, 2);
  CHECK(std::abs(e.probability - 0.25) <= 3.0 * e.standard_error);

  CHECK_THROWS_AS(LocalGaussian::from_covariance(Eigen::Matrix3d::Ones(), {0.0, 0.0, 0.0}), PdFailure);

  const FieldModel m = section_model();
  const double delta = 0.02;
  const double leading = 0.75 * sampling_density(correlation_jet(m, 0.3), BasisValue{}).C * std::pow(delta, 3);
  const CrossoverEstimate p = crossover_prob_mc(m, ThresholdFn::zero(), 0.3, delta, 2000000, 4, 2);
  CHECK(p.hits > 100);
  CHECK(std::abs(p.probability - leading) <= 4.0 * p.standard_error);
}

TEST_CASE("simulation does not depend on the worker count") {
  const FieldModel m = FieldModel::chebyshev(5);
  const CrossoverEstimate a = crossover_prob_mc(m, ThresholdFn::zero(), 0.1, 0.05, 300000, 9, 1);
  const CrossoverEstimate b = crossover_prob_mc(m, ThresholdFn::zero(), 0.1, 0.05, 300000, 9, 3);
  CHECK(a.hits == b.hits);
  CHECK(a.probability == b.probability);
}

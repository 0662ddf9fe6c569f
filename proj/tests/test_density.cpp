#include <doctest.h>

#include <cmath>
#include <numbers>

#include "topsamp/density.hpp"
#include "topsamp/errors.hpp"

using namespace topsamp;

namespace {

const double kPi = std::numbers::pi;

/// Closed-form density of the binomial-variance polynomial family, mu = 0.
double binomial_density(int n, double x) {
  const double q = 1.0 + x * x;
  return std::sqrt(static_cast<double>(n)) * (n - 1) / (24.0 * kPi * q * q * q);
}

/// Its expected-zero density, from R = (1 + xy)^N: m33 = N (1 + x^2)^{2N-2}.
double binomial_zero_density(int n, double x) {
  return std::sqrt(static_cast<double>(n)) / (kPi * (1.0 + x * x));
}

}  // namespace

TEST_CASE("binomial polynomials reproduce the closed-form density") {
  for (int n = 2; n <= 10; ++n) {
    const FieldModel m = FieldModel::polynomial_binomial(n);
    for (int i = 0; i <= 100; ++i) {
      const double x = -3.0 + 0.06 * i;
      const DensityBreakdown d = sampling_density(correlation_jet(m, x), {0.0, 0.0, 0.0});
      INFO("N=", n, " x=", x);
      CHECK(std::abs(d.C / binomial_density(n, x) - 1.0) <= 1e-10);
      CHECK(std::abs(d.D / binomial_zero_density(n, x) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("binomial N=5 at the origin") {
  const DensityBreakdown d =
      sampling_density(correlation_jet(FieldModel::polynomial_binomial(5), 0.0), {0.0, 0.0, 0.0});
  CHECK(d.C == doctest::Approx(std::sqrt(5.0) / (6.0 * kPi)).epsilon(1e-13));
  CHECK(d.C == doctest::Approx(0.1186265).epsilon(1e-6));
  CHECK(d.A == 0.0);
  CHECK(d.B == 0.0);
  CHECK(d.S == 1.0);
}

TEST_CASE("periodic example: constant density and zero density") {
  const FieldModel m = FieldModel::periodic_equal(5);
  const double a0 = spectral_moment(m.amplitudes(), 0);
  const double a1 = spectral_moment(m.amplitudes(), 1);
  const double a2 = spectral_moment(m.amplitudes(), 2);
  CHECK(a0 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a1 == doctest::Approx(11.0).epsilon(1e-15));
  CHECK(a2 == doctest::Approx(195.8).epsilon(1e-15));
  for (double x : {0.0, 0.3, 0.77}) {
    const DensityBreakdown d = sampling_density(correlation_jet(m, x), {0.0, 0.0, 0.0});
    CHECK(d.C == doctest::Approx(37.0985).epsilon(1e-5));
    CHECK(d.C == doctest::Approx(kPi * kPi / 6.0 * 74.8 / std::sqrt(11.0)).epsilon(1e-12));
    CHECK(d.D == doctest::Approx(2.0 * std::sqrt(11.0)).epsilon(1e-12));
    CHECK(d.C0 == 0.75 * d.C);
  }
}

TEST_CASE("periodic closed form agrees with the general density for varying thresholds") {
  for (double L : {1.0, 2.5}) {
    const FieldModel m = FieldModel::periodic({0.0, 0.6, 0.0, 0.5, 0.3}, L);
    const double a0 = spectral_moment(m.amplitudes(), 0);
    const double a1 = spectral_moment(m.amplitudes(), 1);
    const double a2 = spectral_moment(m.amplitudes(), 2);
    for (double tau : {-0.4, 0.0, 0.35}) {
      const ThresholdFn mu = ThresholdFn::polynomial({tau, 0.8 / L, -0.5 / (L * L), 0.3 / (L * L * L)});
      for (double s : {0.05, 0.4, 0.9}) {
        const double x = s * L;
        const DensityBreakdown d = sampling_density(correlation_jet(m, x), mu.jet(x));
        const double closed = periodic_density_closed_form(a0, a1, a2, L, mu.jet(x));
        CHECK(d.C == doctest::Approx(closed).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("constant-threshold reduced form agrees with the general formula") {
  for (const FieldModel& m : {FieldModel::chebyshev(6), FieldModel::polynomial_unit(5),
                              FieldModel::cosine_neumann(4)}) {
    for (double tau : {-1.2, 0.0, 0.4, 2.0}) {
      for (double s : {0.2, 0.5, 0.65}) {
        const double x = m.domain().a + s * m.domain().length();
        const CorrelationJet j = correlation_jet(m, x);
        const DensityBreakdown g = sampling_density(j, {tau, 0.0, 0.0});
        const DensityBreakdown r = sampling_density_constant_threshold(j, tau);
        CHECK(g.C == doctest::Approx(r.C).epsilon(1e-12));
        CHECK(g.S == doctest::Approx(r.S).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("density terms are nonnegative and consistent") {
  const FieldModel m = FieldModel::chebyshev(8);
  const ThresholdFn mu = ThresholdFn::cubic_shift(0.3);
  for (int i = 1; i < 40; ++i) {
    const double x = -1.0 + i / 20.0;
    const DensityBreakdown d = sampling_density(correlation_jet(m, x), mu.jet(x));
    CHECK(d.A >= 0.0);
    CHECK(d.B >= 0.0);
    CHECK(d.S > 0.0);
    CHECK(d.S <= 1.0 + d.A);
    CHECK(d.C >= 0.0);
    CHECK(d.C0 == 0.75 * d.C);
    CHECK(d.D >= 0.0);
  }
}

TEST_CASE("a single sinusoid has zero density 2 per unit length") {
  const FieldModel m = FieldModel::periodic({0.0, 1.0});
  for (double x : {0.0, 0.25, 0.6}) {
    CHECK(zero_density(correlation_jet(m, x, G2Check::kNone)) == doctest::Approx(2.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(correlation_jet(m, 0.3), G2Violation);
}

TEST_CASE("degenerate inputs are rejected") {
  const CorrelationJet zero = CorrelationJet::from_entries(0.0, 0, 0, 0, 0, 0, 0);
  CHECK_THROWS_AS(zero_density(zero), DomainError);
  CHECK_THROWS_AS(sampling_density(zero, {0, 0, 0}), G2Violation);
  CHECK_THROWS_AS(periodic_density_closed_form(1.0, 1.0, 1.0, 1.0, {0, 0, 0}), DomainError);
}

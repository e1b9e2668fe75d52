#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "resetfp/analytic.hpp"
#include "resetfp/error.hpp"

using namespace resetfp;
using namespace resetfp::analytic;
using doctest::Approx;

namespace {

const ResetModel kCanonical{0.0, 1.0, 1.0};
const ResetModel kDrifted{-1.0, 1.0, 1.0};
const ResetModel kFig9{0.0, 1.0, 0.5};

template <class F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidArgument;
}

const std::vector<double> kGridX = {0.01, 0.1, 1.0, 10.0};
const std::vector<double> kGridR = {0.1, 1.0, 10.0};
const std::vector<double> kGridXr = {0.5, 1.0, 2.0};

}  // namespace

TEST_CASE("fpt transform values") {
  CHECK(fpt_lt(kCanonical, 1.0, 1.0) == Approx(oracle::kLtCanonical).epsilon(1e-15));
  CHECK(fpt_lt(kCanonical, 1.0, 1.0) ==
        Approx(2.0 * std::exp(-2.0) / (1.0 + std::exp(-2.0))).epsilon(1e-15));
  CHECK(fpt_lt({0.0, 0.0, 1.0}, 1.0, 2.0) == Approx(std::exp(-2.0)).epsilon(1e-15));
  // x = 2, lambda = 1 simplifies to e^-2 exactly
  CHECK(fpt_lt(kCanonical, 2.0, 1.0) == Approx(oracle::kLtAtTwo).epsilon(1e-14));
  CHECK(fpt_lt(kDrifted, 1.0, 1.0) == Approx(oracle::kLtDrifted).epsilon(1e-14));
  CHECK(fpt_lt(kCanonical, 0.0, 3.0) == 1.0);
}

TEST_CASE("fpt transform is exactly 1 at lambda = 0") {
  for (double mu : {-2.0, -0.5, 0.0, 0.7})
    for (double r : kGridR)
      for (double xr : kGridXr)
        for (double x : kGridX) CHECK(fpt_lt({mu, r, xr}, x, 0.0) == 1.0);
  CHECK(fpt_lt_at_reset(kDrifted, 0.0) == 1.0);
  CHECK(fpt_lt_at_reset(kCanonical, 0.0) == 1.0);
}

TEST_CASE("fpt transform at the reset point") {
  CHECK(fpt_lt_at_reset(kCanonical, 1.0) == Approx(oracle::kLtCanonical).epsilon(1e-15));
  for (double lambda : {0.1, 1.0, 7.0}) {
    CHECK(fpt_lt_at_reset(kDrifted, lambda) == Approx(fpt_lt(kDrifted, 1.0, lambda)).epsilon(1e-14));
  }
  CHECK(code_of([] { fpt_lt_at_reset({0.0, 0.0, 1.0}, 1.0); }) == Errc::NoResetLimit);
  CHECK(code_of([] { fpt_lt(kCanonical, 1.0, -1.0); }) == Errc::InvalidArgument);
  CHECK(code_of([] { fpt_lt(kCanonical, 1.0, NAN); }) == Errc::NonFinite);
}

TEST_CASE("driftless formulas agree with an independent transcription") {
  for (double r : kGridR)
    for (double xr : kGridXr)
      for (double x : kGridX) {
        const ResetModel m{0.0, r, xr};
        CHECK(fpt_lt(m, x, 0.7) == Approx(oracle::lt(r, xr, x, 0.7)).epsilon(1e-14));
        CHECK(fpt_mean(m, x) == Approx(oracle::mean_tau(r, xr, x)).epsilon(1e-14));
        CHECK(fpt_second_moment(m, x) == Approx(oracle::second_tau(r, xr, x)).epsilon(1e-12));
        CHECK(fpa_mean(m, x) == Approx(oracle::mean_area(r, xr, x)).epsilon(1e-14));
        CHECK(*fpa_second_moment(m, x) == Approx(oracle::second_area(r, xr, x)).epsilon(1e-12));
        CHECK(*joint_moment_tau_area(m, x) == Approx(oracle::joint(r, xr, x)).epsilon(1e-12));
      }
}

TEST_CASE("mean first-passage time") {
  CHECK(fpt_mean(kCanonical, 1.0) == Approx(std::exp(std::sqrt(2.0)) - 1.0).epsilon(1e-15));
  CHECK(fpt_mean(kCanonical, 1.0) == Approx(oracle::kMeanTau).epsilon(1e-15));
  CHECK(fpt_mean(kDrifted, 1.0) == Approx(std::exp(std::sqrt(3.0) - 1.0) - 1.0).epsilon(1e-14));
  CHECK(fpt_mean(kDrifted, 1.0) == Approx(oracle::kMeanTauDrifted).epsilon(1e-14));
  CHECK(fpt_mean(kCanonical, 0.0) == 0.0);
  CHECK(code_of([] { fpt_mean({0.0, 0.0, 1.0}, 1.0); }) == Errc::NoResetLimit);
  // far field: e^{x_R sqrt(2r)} / r = a1 / sqrt(2r)
  CHECK(fpt_mean(kCanonical, 60.0) == Approx(oracle::kA1 / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("second moment of the first-passage time") {
  const double s2 = std::sqrt(2.0);
  CHECK(fpt_second_moment(kCanonical, 1.0) ==
        Approx(std::exp(s2) * (2.0 * std::exp(s2) - 2.0 - s2)).epsilon(1e-14));
  CHECK(fpt_second_moment(kCanonical, 1.0) == Approx(oracle::kSecondTau).epsilon(1e-14));
  CHECK(fpt_second_moment(kDrifted, 1.0) == Approx(oracle::kSecondTauDrifted).epsilon(1e-13));
  CHECK(fpt_second_moment(kCanonical, 1e-12) < 1e-9);
  CHECK(fpt_second_moment(kCanonical, 80.0) == Approx(oracle::kA3).epsilon(1e-13));
}

TEST_CASE("mean first-passage area") {
  CHECK(fpa_mean(kCanonical, 1.0) == Approx(std::exp(std::sqrt(2.0))).epsilon(1e-15));
  CHECK(fpa_mean(kCanonical, 1.0) == Approx(oracle::kMeanArea).epsilon(1e-15));
  // at mu = -1, r = x_R = 1 the area mean reduces to x
  CHECK(fpa_mean(kDrifted, 1.0) == Approx(1.0).epsilon(1e-14));
  CHECK(fpa_mean(kDrifted, 2.5) == Approx(2.5).epsilon(1e-14));
  CHECK(fpa_mean({0.5, 1.0, 1.0}, 1.0) == Approx(oracle::kMeanAreaHalfDrift).epsilon(1e-14));
  CHECK(fpa_mean(kCanonical, 0.0) == 0.0);
  // far-field slope 1/r
  const double big = 200.0;
  CHECK((fpa_mean({0.0, 2.0, 1.0}, big + 1.0) - fpa_mean({0.0, 2.0, 1.0}, big)) ==
        Approx(0.5).epsilon(1e-12));
}

TEST_CASE("second moment of the area and its availability") {
  CHECK(*fpa_second_moment(kCanonical, 1.0) == Approx(oracle::kSecondArea).epsilon(1e-14));
  const double e = std::exp(std::sqrt(2.0));
  CHECK(*fpa_second_moment(kCanonical, 1.0) ==
        Approx(2.0 * e * (0.75 + e + 1.0 - 1.0 / (2.0 * std::sqrt(2.0))) - 2.0).epsilon(1e-14));
  const Maybe<double> drifted = fpa_second_moment(kDrifted, 1.0);
  CHECK_FALSE(drifted.has_value());
  CHECK(drifted.reason() == "no closed form for mu≠0; use bvp");
  CHECK(code_of([&] { (void)drifted.value(); }) == Errc::FunctionalUnavailable);
  CHECK(*fpa_second_moment(kCanonical, 0.0) == 0.0);
  // E[A^2] / x^2 -> 2 / r^2
  const double x = 1e5;
  CHECK(*fpa_second_moment(kCanonical, x) / (x * x) == Approx(2.0).epsilon(1e-4));
}

TEST_CASE("joint moment of time and area") {
  const double e = std::exp(std::sqrt(2.0));
  CHECK(*joint_moment_tau_area(kCanonical, 1.0) ==
        Approx(e * ((8.0 * e - 1.0) / 4.0 - 3.0 / (2.0 * std::sqrt(2.0)))).epsilon(1e-14));
  CHECK(*joint_moment_tau_area(kCanonical, 1.0) == Approx(oracle::kJoint).epsilon(1e-14));
  CHECK(*joint_moment_tau_area(kCanonical, 0.0) == 0.0);
  CHECK_FALSE(joint_moment_tau_area(kDrifted, 1.0).has_value());
  const double x = 5.0;
  CHECK(*joint_moment_tau_area(kCanonical, x) <=
        std::sqrt(fpt_second_moment(kCanonical, x) * *fpa_second_moment(kCanonical, x)));
}

TEST_CASE("correlation of time and area") {
  const double rho = *correlation_tau_area(kCanonical, 1.0);
  CHECK(rho > 0.0);
  CHECK(rho < 1.0);
  CHECK(rho == Approx(oracle::kCorr).epsilon(1e-12));
  const double rho0 = *correlation_tau_area(kCanonical, 1e-6);
  const double rho_inf = *correlation_tau_area(kCanonical, 1e3);
  CHECK(rho0 == Approx(oracle::kCorrSmallX).epsilon(1e-6));
  CHECK(rho_inf == Approx(oracle::kCorrLargeX).epsilon(1e-9));
  CHECK(rho_inf < rho0);
  CHECK_FALSE(correlation_tau_area(kDrifted, 1.0).has_value());
}

TEST_CASE("passage moments bundle") {
  const PassageMoments m = passage_moments(kCanonical, 1.0);
  CHECK(m.var_tau == Approx(m.second_tau - m.mean_tau * m.mean_tau).epsilon(1e-15));
  CHECK(*m.var_area == Approx(*m.second_area - m.mean_area * m.mean_area).epsilon(1e-15));
  CHECK(*m.cov == Approx(*m.joint_tau_area - m.mean_tau * m.mean_area).epsilon(1e-15));
  CHECK(*m.corr == Approx(oracle::kCorr).epsilon(1e-12));
  const PassageMoments d = passage_moments(kDrifted, 1.0);
  CHECK(d.mean_area == Approx(1.0).epsilon(1e-14));
  CHECK_FALSE(d.var_area.has_value());
  CHECK_FALSE(d.corr.has_value());
}

TEST_CASE("property: variances nonnegative and Cauchy-Schwarz on the parameter grid") {
  for (double r : kGridR)
    for (double xr : kGridXr)
      for (double x : kGridX) {
        const PassageMoments m = passage_moments({0.0, r, xr}, x);
        CHECK(m.var_tau >= 0.0);
        CHECK(*m.var_area >= 0.0);
        CHECK(*m.joint_tau_area <= std::sqrt(m.second_tau * *m.second_area));
        CHECK(*m.corr > 0.0);
        CHECK(*m.corr < 1.0);
      }
}

TEST_CASE("property: monotonicity in lambda and x") {
  for (double mu : {-1.0, 0.0, 0.5}) {
    const ResetModel m{mu, 1.0, 1.0};
    double prev_mean = 0.0, prev_area = 0.0;
    for (int i = 1; i <= 60; ++i) {
      const double x = 0.1 * i;
      CHECK(fpt_lt(m, x, 0.5) < fpt_lt(m, x - 0.1, 0.5));
      CHECK(fpt_lt(m, x, 0.5) > fpt_lt(m, x, 0.6));
      const double mean = fpt_mean(m, x), area = fpa_mean(m, x);
      CHECK(mean > prev_mean);
      CHECK(area > prev_area);
      prev_mean = mean;
      prev_area = area;
    }
  }
}

TEST_CASE("derivatives of the transform give the moments") {
  // central differences across lambda = 0 use the continuation of the closed
  // form to small negative lambda, which the complex overload evaluates
  for (double r : kGridR)
    for (double xr : kGridXr)
      for (double x : kGridX) {
        const ResetModel m{0.0, r, xr};
        const auto f = [&](double l) { return fpt_lt(m, x, std::complex<double>(l, 0.0)).real(); };
        const double t1 = fpt_mean(m, x), t2 = fpt_second_moment(m, x);
        const double scale = oracle::mean_tau(r, xr, 1e9);  // far-field mean sets the time scale
        CHECK(-oracle::central_first(f, 0.0, 5e-6 / scale) == Approx(t1).epsilon(1e-5));
        CHECK(oracle::central_second(f, 0.0, 1.5e-4 / scale) == Approx(t2).epsilon(1e-4));
      }
}

TEST_CASE("the transform and moments satisfy their differential equations") {
  const double h = 1e-4;
  for (double x : {0.5, 1.0, 2.0}) {
    for (double lambda : {0.3, 1.0}) {
      const auto m = [&](double y) { return fpt_lt(kCanonical, y, lambda); };
      const double residual = 0.5 * oracle::central_second(m, x, h) - (lambda + 1.0) * m(x) +
                              fpt_lt_at_reset(kCanonical, lambda);
      CHECK(std::abs(residual) < 1e-5);
    }
    const auto a1 = [&](double y) { return fpa_mean(kCanonical, y); };
    const auto a2 = [&](double y) { return *fpa_second_moment(kCanonical, y); };
    CHECK(std::abs(0.5 * oracle::central_second(a1, x, h) - a1(x) + a1(1.0) + x) < 1e-5);
    CHECK(std::abs(0.5 * oracle::central_second(a2, x, h) - a2(x) + a2(1.0) + 2.0 * x * a1(x)) <
          1e-5);
  }
}

TEST_CASE("asymptotic constants") {
  const AsymptoticConstants c = *asymptotic_constants(kCanonical);
  CHECK(c.a1 == Approx(oracle::kA1).epsilon(1e-15));
  CHECK(c.a2 == Approx(oracle::kA2).epsilon(1e-14));
  CHECK(c.a3 == Approx(oracle::kA3).epsilon(1e-14));
  CHECK(c.a4 == Approx(oracle::kA4).epsilon(1e-13));
  CHECK(c.a4 == Approx(c.a3 - std::pow(c.a1 / std::sqrt(2.0), 2)).epsilon(1e-14));
  CHECK(c.area_limit_slope == 1.0);
  CHECK(c.area_slope_zero == Approx(std::sqrt(2.0) * std::exp(std::sqrt(2.0)) + 1.0).epsilon(1e-14));
  const double x = 1e-6;
  CHECK(fpt_mean(kCanonical, x) / x == Approx(c.a1).epsilon(1e-4));
  CHECK(fpt_second_moment(kCanonical, x) / x == Approx(c.a2).epsilon(1e-4));
  CHECK(fpa_mean(kCanonical, x) / x == Approx(c.area_slope_zero).epsilon(1e-4));
  CHECK_FALSE(asymptotic_constants(kDrifted).has_value());
}

TEST_CASE("maximum displacement coefficients solve their linear system") {
  const MaxDisplacementCoefficients c = maxdispl_coefficients(kFig9, 2.0);
  CHECK(c.c1 == Approx(oracle::kFig9C1).epsilon(1e-13));
  CHECK(c.c2 == Approx(oracle::kFig9C2).epsilon(1e-13));
  CHECK(c.a == Approx(oracle::kFig9A).epsilon(1e-13));
  const double s = std::sqrt(2.0);
  const auto ref = oracle::solve_dense<3>(
      {{{1.0, 1.0, 1.0}, {std::exp(-2.0 * s), std::exp(2.0 * s), 1.0},
        {std::exp(-0.5 * s), std::exp(0.5 * s), 0.0}}},
      {1.0, 0.0, 0.0});
  CHECK(c.c1 == Approx(ref[0]).epsilon(1e-13));
  CHECK(c.c2 == Approx(ref[1]).epsilon(1e-13));
  CHECK(c.a == Approx(ref[2]).epsilon(1e-13));
  CHECK(std::abs(c.c1 + c.c2 + c.a - 1.0) < 1e-12);
  CHECK(std::abs(c.c1 * std::exp(c.d1 * 2.0) + c.c2 * std::exp(c.d2 * 2.0) + c.a) < 1e-12);
  CHECK(std::abs(c.c1 * std::exp(c.d1 * 0.5) + c.c2 * std::exp(c.d2 * 0.5)) < 1e-12);
}

TEST_CASE("maximum displacement distribution") {
  CHECK(maxdispl_cdf(kFig9, 1.0, 2.0) == Approx(oracle::kFig9Cdf).epsilon(1e-13));
  CHECK(maxdispl_cdf(kFig9, 1.0, 0.9) == 0.0);
  const double at_x = maxdispl_cdf(kFig9, 1.0, 1.0);
  CHECK(at_x >= 0.0);
  CHECK(at_x < maxdispl_cdf(kFig9, 1.0, 2.0));
  CHECK(maxdispl_cdf(kFig9, 1.0, 1.0 + 40.0 / std::sqrt(2.0)) == Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < oracle::kFig9PdfZ.size(); ++i) {
    const double z = oracle::kFig9PdfZ[i];
    CHECK(maxdispl_pdf(kFig9, 1.0, z) == Approx(oracle::kFig9Pdf[i]).epsilon(1e-12));
    const auto F = [&](double v) { return maxdispl_cdf(kFig9, 1.0, v); };
    CHECK(std::abs(oracle::central_first(F, z, 1e-5) - maxdispl_pdf(kFig9, 1.0, z)) < 1e-6);
  }
}

TEST_CASE("property: maximum displacement CDF is a distribution function") {
  for (double mu : {-1.0, 0.0, 0.8})
    for (double xr : {0.3, 1.0, 2.5})
      for (double x : {0.2, 1.0, 3.0}) {
        const ResetModel m{mu, 1.0, xr};
        double prev = 0.0;
        for (int i = 0; i <= 400; ++i) {
          const double z = x + 0.05 * i;
          const double f = maxdispl_cdf(m, x, z);
          CHECK(f >= prev - 1e-15);
          CHECK(f <= 1.0);
          prev = f;
        }
        // continuous across z = x_R and with its density
        if (xr > x) {
          CHECK(maxdispl_cdf(m, x, xr * (1 + 1e-12)) == Approx(maxdispl_cdf(m, x, xr)).epsilon(1e-9));
        }
        const double mass =
            maxdispl_cdf(m, x, x) +
            oracle::integrate([&](double z) { return maxdispl_pdf(m, x, z); }, x, x + 60.0, 6000);
        CHECK(mass == Approx(1.0).epsilon(1e-6));
      }
}

TEST_CASE("maximum displacement density decays exponentially") {
  std::vector<double> zs, logs;
  for (double z = 6.0; z <= 16.0; z += 0.5) {
    zs.push_back(z);
    logs.push_back(std::log(maxdispl_pdf(kFig9, 1.0, z)));
  }
  // the log-slope settles: curvature shrinks geometrically towards 0
  double prev = INFINITY;
  for (std::size_t i = 1; i + 1 < logs.size(); ++i) {
    const double curvature = std::abs(logs[i + 1] - 2.0 * logs[i] + logs[i - 1]);
    CHECK(curvature < prev);
    prev = curvature;
  }
  CHECK(prev < 1e-7);
  const double slope = (logs.back() - logs[logs.size() - 2]) / 0.5;
  CHECK(slope < -1.0);
}

TEST_CASE("maximum displacement without resetting") {
  CHECK(maxdispl_cdf_noreset(0.0, 1.0, 2.0) == 0.5);
  CHECK(maxdispl_cdf_noreset(0.0, 1.0, 0.5) == 0.0);
  CHECK(maxdispl_cdf_noreset(0.0, 1.0, 1e12) == Approx(1.0));
  const double mu = -1.0, x = 1.0, z = 2.5;
  CHECK(maxdispl_cdf_noreset(mu, x, z) ==
        Approx((std::exp(-2.0 * mu * x) - std::exp(-2.0 * mu * z)) / (1.0 - std::exp(-2.0 * mu * z)))
            .epsilon(1e-14));
  CHECK(maxdispl_mean_noreset(mu, x) == Approx(oracle::kMeanMaxNoResetDrifted).epsilon(1e-13));
  const double by_quadrature =
      x + oracle::integrate([&](double v) { return 1.0 - maxdispl_cdf_noreset(mu, x, v); }, x, 40.0);
  CHECK(maxdispl_mean_noreset(mu, x) == Approx(by_quadrature).epsilon(1e-10));
  CHECK(std::isinf(maxdispl_mean_noreset(0.0, 1.0)));
  CHECK(code_of([] { maxdispl_cdf_noreset(0.5, 1.0, 2.0); }) == Errc::PositiveDriftNoReset);
  CHECK(code_of([] { maxdispl_cdf({0.0, 0.0, 1.0}, 1.0, 2.0); }) == Errc::NoResetLimit);
  const auto F = [&](double v) { return maxdispl_cdf_noreset(mu, x, v); };
  CHECK(maxdispl_pdf_noreset(mu, x, z) == Approx(oracle::central_first(F, z, 1e-5)).epsilon(1e-8));
}

TEST_CASE("drifted formulas reduce to the driftless ones at mu = 0") {
  for (double r : kGridR)
    for (double xr : kGridXr)
      for (double x : kGridX) {
        const ResetModel tiny{1e-300, r, xr};
        const ResetModel zero{0.0, r, xr};
        CHECK(fpt_mean(tiny, x) == Approx(fpt_mean(zero, x)).epsilon(1e-14));
        CHECK(fpt_second_moment(tiny, x) == Approx(fpt_second_moment(zero, x)).epsilon(1e-14));
        CHECK(fpa_mean(tiny, x) == Approx(fpa_mean(zero, x)).epsilon(1e-14));
        CHECK(maxdispl_cdf(tiny, x, x + 1.0) == Approx(maxdispl_cdf(zero, x, x + 1.0)).epsilon(1e-14));
      }
}

TEST_CASE("exponent overflow is reported") {
  CHECK(code_of([] { fpt_mean({0.0, 1e6, 1.0}, 1.0); }) == Errc::RangeOverflow);
  CHECK(code_of([] { fpt_mean({0.0, 1.0, 1.0}, -1.0); }) == Errc::InvalidArgument);
}

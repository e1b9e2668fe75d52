#pragma once

#include <complex>

#include "resetfp/error.hpp"
#include "resetfp/model.hpp"

/// Closed-form first-passage quantities of drifted Brownian motion with
/// Poissonian resetting, absorbed at 0. Every driftless formula is the mu = 0
/// instance of the drifted one.
///
/// Start points x >= 0 are accepted; x = 0 is the absorbed state and yields the
/// trivial value (transform 1, moments 0). Exponents beyond 700 raise
/// RangeOverflow instead of returning inf.
namespace resetfp::analytic {

// ---------------------------------------------------------------------------
// First-passage time
// ---------------------------------------------------------------------------

/// E[exp(-lambda tau(x))]. r = 0 gives exp(-x(mu + sqrt(mu^2 + 2 lambda))).
double fpt_lt(const ResetModel& model, double x, double lambda);

/// Holomorphic continuation for Re(lambda) > 0, principal square root.
std::complex<double> fpt_lt(const ResetModel& model, double x, std::complex<double> lambda);

/// E[exp(-lambda tau(x_R))]; requires r > 0.
double fpt_lt_at_reset(const ResetModel& model, double lambda);

double fpt_mean(const ResetModel& model, double x);
double fpt_second_moment(const ResetModel& model, double x);

// ---------------------------------------------------------------------------
// First-passage area
// ---------------------------------------------------------------------------

double fpa_mean(const ResetModel& model, double x);

/// E[A(x)^2]. Only the driftless case has a closed form; mu != 0 is Unavailable.
Maybe<double> fpa_second_moment(const ResetModel& model, double x);

/// E[tau(x) A(x)], driftless only.
Maybe<double> joint_moment_tau_area(const ResetModel& model, double x);

/// Correlation of tau(x) and A(x), driftless only. Throws DegenerateVariance if
/// either variance is not positive in floating point.
Maybe<double> correlation_tau_area(const ResetModel& model, double x);

struct PassageMoments {
  double x = 0.0;
  double mean_tau = 0.0;
  double second_tau = 0.0;
  double var_tau = 0.0;
  double mean_area = 0.0;
  Maybe<double> second_area = Unavailable{};
  Maybe<double> var_area = Unavailable{};
  Maybe<double> joint_tau_area = Unavailable{};
  Maybe<double> cov = Unavailable{};
  Maybe<double> corr = Unavailable{};
};

PassageMoments passage_moments(const ResetModel& model, double x);

/// Small- and large-x constants of the driftless FPT moments:
///   E[tau]   = a1 x + o(x),  E[tau] -> a1 / sqrt(2r)
///   E[tau^2] = a2 x + o(x),  E[tau^2] -> a3,  Var[tau] -> a4
///   E[A]     = area_slope_zero x + o(x),  E[A] ~ area_limit_slope x
struct AsymptoticConstants {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double a4 = 0.0;
  double area_slope_zero = 0.0;
  double area_limit_slope = 0.0;
};

Maybe<AsymptoticConstants> asymptotic_constants(const ResetModel& model);

// ---------------------------------------------------------------------------
// Maximum displacement M_x = max of the process over [0, tau(x)]
// ---------------------------------------------------------------------------

/// P(M_x <= z). Requires r > 0. For z <= x_R a reset can only push the path
/// past z, so the CDF is the probability of reaching 0 before z and before the
/// first reset; for z > x_R it is the nonlocal three-condition solution.
double maxdispl_cdf(const ResetModel& model, double x, double z);

/// d/dz of maxdispl_cdf, differentiated in closed form. Zero for z < x.
double maxdispl_pdf(const ResetModel& model, double x, double z);

/// Coefficients of w(x) = c1 e^{d1 x} + c2 e^{d2 x} + a solving
/// w(0) = 1, w(z) = 0, w(x_R) = a, with d1 = -mu - s, d2 = -mu + s,
/// s = sqrt(mu^2 + 2r). Defined for z > x_R.
struct MaxDisplacementCoefficients {
  double c1 = 0.0;
  double c2 = 0.0;
  double a = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

MaxDisplacementCoefficients maxdispl_coefficients(const ResetModel& model, double z);

/// No-reset limits, mu <= 0. mu > 0 throws PositiveDriftNoReset (the law is
/// defective).
double maxdispl_cdf_noreset(double mu, double x, double z);
double maxdispl_pdf_noreset(double mu, double x, double z);

/// E[M_x] without resetting; +inf for mu = 0.
double maxdispl_mean_noreset(double mu, double x);

}  // namespace resetfp::analytic

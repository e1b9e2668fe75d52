#include "resetfp/analytic.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace resetfp::analytic {
namespace {

constexpr double kMaxExponent = 700.0;
constexpr const char* kDriftedUnavailable = "no closed form for mu≠0; use bvp";

double bounded_exp(double exponent) {
  if (exponent > kMaxExponent) {
    throw Error(Errc::RangeOverflow,
                "exponent " + std::to_string(exponent) + " exceeds " + std::to_string(kMaxExponent));
  }
  return std::exp(exponent);
}

void check_start(double x) {
  if (!std::isfinite(x)) throw Error(Errc::NonFinite, "start point must be finite");
  if (x < 0.0) throw Error(Errc::InvalidArgument, "start point must be >= 0");
}

void check_rate(double lambda) {
  if (!std::isfinite(lambda)) throw Error(Errc::NonFinite, "Laplace variable must be finite");
  if (lambda < 0.0) throw Error(Errc::InvalidArgument, "Laplace variable must be >= 0");
}

// 1 - e^{-v}, accurate for small v
double one_minus_exp(double v) { return -std::expm1(-v); }

// Quantities shared by the moment formulas at lambda = 0.
struct Rates {
  double k0;      // mu + s
  double s;       // sqrt(mu^2 + 2r)
  double growth;  // e^{x_R k0}
};

Rates moment_rates(const ResetModel& model) {
  const double k0 = decay_exponent(model, 0.0);
  return {k0, spread(model, 0.0), bounded_exp(model.x_reset * k0)};
}

double second_tau_at_reset(const ResetModel& model, const Rates& q) {
  const double r = model.r;
  return q.growth * (2.0 / (r * r) * q.growth - 2.0 / (r * r) - 2.0 * model.x_reset / (r * q.s));
}

// E[A^2(x_R)] of the driftless process
double area_second_at_reset(const ResetModel& model, const Rates& q) {
  const double r = model.r;
  const double xr = model.x_reset;
  const double g = q.s;
  return 2.0 * q.growth / r *
             (xr * xr / r * (0.75 + q.growth) + 1.0 / (r * r) - xr * xr * xr / (2.0 * g)) -
         2.0 / (r * r * r);
}

double joint_at_reset(const ResetModel& model, const Rates& q) {
  const double r = model.r;
  const double xr = model.x_reset;
  return q.growth *
         ((8.0 * q.growth - 1.0) * xr / (4.0 * r * r) - 3.0 * xr * xr / (2.0 * r * q.s));
}

// Denominator-like function of the maximum-displacement CDF, scaled by e^{-d2 y}
// so it stays bounded: e^{-d2 y} [expm1(d1 y) - e^{-2 s x_R} expm1(d2 y)].
// Both terms are negative for y > 0.
double scaled_exit_function(double y, double k0, double d2, double reset_weight) {
  return std::exp(-d2 * y) * std::expm1(-k0 * y) + reset_weight * std::expm1(-d2 * y);
}

}  // namespace

double fpt_lt(const ResetModel& model, double x, double lambda) {
  validate(model);
  check_start(x);
  check_rate(lambda);
  if (lambda == 0.0 && model.r > 0.0) return 1.0;
  const double k = decay_exponent(model, lambda);
  const double direct = std::exp(-x * k);
  if (model.r == 0.0) return direct;
  const double reset_hit = model.r * std::exp(-model.x_reset * k);
  return direct + reset_hit * one_minus_exp(x * k) / (lambda + reset_hit);
}

std::complex<double> fpt_lt(const ResetModel& model, double x, std::complex<double> lambda) {
  validate(model);
  check_start(x);
  if (lambda == 0.0 && model.r > 0.0) return 1.0;
  const std::complex<double> k = decay_exponent(model, lambda);
  const std::complex<double> direct = std::exp(-x * k);
  if (model.r == 0.0) return direct;
  const std::complex<double> reset_hit = model.r * std::exp(-model.x_reset * k);
  return direct + reset_hit * (1.0 - direct) / (lambda + reset_hit);
}

double fpt_lt_at_reset(const ResetModel& model, double lambda) {
  validate(model);
  check_rate(lambda);
  require_reset(model, "the transform at x_R is defined through the reset coupling; use fpt_lt");
  const double k = decay_exponent(model, lambda);
  const double e = std::exp(-model.x_reset * k);
  return (lambda + model.r) * e / (lambda + model.r * e);
}

double fpt_mean(const ResetModel& model, double x) {
  validate(model);
  check_start(x);
  require_reset(model, "E[tau] is +inf without resetting for mu >= 0");
  const Rates q = moment_rates(model);
  return q.growth * one_minus_exp(x * q.k0) / model.r;
}

double fpt_second_moment(const ResetModel& model, double x) {
  validate(model);
  check_start(x);
  require_reset(model, "E[tau^2] is +inf without resetting for mu >= 0");
  const Rates q = moment_rates(model);
  const double r = model.r;
  const double at_reset = second_tau_at_reset(model, q);
  const double tail = std::exp(-x * q.k0);
  return (2.0 * q.growth / (r * r) + at_reset) * one_minus_exp(x * q.k0) -
         2.0 * q.growth / (r * q.s) * x * tail;
}

double fpa_mean(const ResetModel& model, double x) {
  validate(model);
  check_start(x);
  require_reset(model, "E[A] is +inf without resetting for mu = 0");
  const Rates q = moment_rates(model);
  const double r = model.r;
  const double drift_shift = model.mu / (r * r);
  const double at_reset =
      q.growth * (model.x_reset / r + drift_shift * one_minus_exp(model.x_reset * q.k0));
  return (at_reset + drift_shift) * one_minus_exp(x * q.k0) + x / r;
}

Maybe<double> fpa_second_moment(const ResetModel& model, double x) {
  validate(model);
  check_start(x);
  if (model.mu != 0.0) return Unavailable{kDriftedUnavailable};
  require_reset(model, "E[A^2] is +inf without resetting");
  const Rates q = moment_rates(model);
  const double r = model.r;
  const double xr = model.x_reset;
  const double g = q.s;
  const double alpha2 = area_second_at_reset(model, q);
  return one_minus_exp(x * g) * (alpha2 + 2.0 / (r * r * r)) +
         2.0 * x / (r * r) * (x + xr * q.growth) -
         xr * x / r * (x / g + 1.0 / (2.0 * r)) * q.growth * std::exp(-x * g);
}

Maybe<double> joint_moment_tau_area(const ResetModel& model, double x) {
  validate(model);
  check_start(x);
  if (model.mu != 0.0) return Unavailable{kDriftedUnavailable};
  require_reset(model, "E[tau A] is +inf without resetting");
  const Rates q = moment_rates(model);
  const double r = model.r;
  const double xr = model.x_reset;
  const double g = q.s;
  const double at_reset = joint_at_reset(model, q);
  // V(x) = -(x_R E/r^2 + V_R) e^{-gx} + Vbar(x), with the constant part of Vbar
  // folded into the first term.
  return (xr * q.growth / (r * r) + at_reset) * one_minus_exp(x * g) +
         (q.growth + 1.0) * x / (r * r) -
         q.growth * std::exp(-x * g) *
             (x * x / (2.0 * r * g) + (1.0 + 2.0 * xr * g) * x / (4.0 * r * r));
}

Maybe<double> correlation_tau_area(const ResetModel& model, double x) {
  validate(model);
  check_start(x);
  if (model.mu != 0.0) return Unavailable{kDriftedUnavailable};
  if (x == 0.0) throw Error(Errc::InvalidArgument, "correlation needs x > 0");
  const double t1 = fpt_mean(model, x);
  const double t2 = fpt_second_moment(model, x);
  const double a1 = fpa_mean(model, x);
  const double a2 = *fpa_second_moment(model, x);
  const double v = *joint_moment_tau_area(model, x);
  const double var_tau = t2 - t1 * t1;
  const double var_area = a2 - a1 * a1;
  if (!(var_tau > 0.0) || !(var_area > 0.0)) {
    throw Error(Errc::DegenerateVariance, "variance underflow at x = " + std::to_string(x));
  }
  return (v - t1 * a1) / std::sqrt(var_tau * var_area);
}

PassageMoments passage_moments(const ResetModel& model, double x) {
  PassageMoments m;
  m.x = x;
  m.mean_tau = fpt_mean(model, x);
  m.second_tau = fpt_second_moment(model, x);
  m.var_tau = m.second_tau - m.mean_tau * m.mean_tau;
  m.mean_area = fpa_mean(model, x);
  m.second_area = fpa_second_moment(model, x);
  m.joint_tau_area = joint_moment_tau_area(model, x);
  if (m.second_area) {
    m.var_area = *m.second_area - m.mean_area * m.mean_area;
  } else {
    m.var_area = Unavailable{m.second_area.reason()};
  }
  if (m.joint_tau_area) {
    m.cov = *m.joint_tau_area - m.mean_tau * m.mean_area;
    if (x > 0.0) {
      m.corr = correlation_tau_area(model, x);
    } else {
      m.corr = Unavailable{"correlation undefined at the absorbed state x = 0"};
    }
  } else {
    m.cov = Unavailable{m.joint_tau_area.reason()};
    m.corr = Unavailable{m.joint_tau_area.reason()};
  }
  return m;
}

Maybe<AsymptoticConstants> asymptotic_constants(const ResetModel& model) {
  validate(model);
  if (model.mu != 0.0) return Unavailable{"asymptotic constants are stated for mu = 0 only"};
  require_reset(model, "moments are +inf without resetting");
  const Rates q = moment_rates(model);
  const double r = model.r;
  const double g = q.s;
  const double t2r = second_tau_at_reset(model, q);
  bounded_exp(2.0 * model.x_reset * g);
  AsymptoticConstants c;
  c.a1 = g / r * q.growth;
  c.a2 = g * t2r + std::sqrt(2.0) / (r * std::sqrt(r)) * q.growth;
  c.a3 = t2r + 2.0 / (r * r) * q.growth;
  c.a4 = c.a3 - q.growth * q.growth / (r * r);
  c.area_slope_zero = model.x_reset * g / r * q.growth + 1.0 / r;
  c.area_limit_slope = 1.0 / r;
  return c;
}

double maxdispl_cdf(const ResetModel& model, double x, double z) {
  validate(model);
  validate_start(x);
  if (!std::isfinite(z)) {
    if (std::isnan(z)) throw Error(Errc::NonFinite, "z must not be NaN");
    return z > 0.0 ? 1.0 : 0.0;
  }
  require_reset(model, "use maxdispl_cdf_noreset");
  if (z <= x) return 0.0;
  const double s = spread(model, 0.0);
  const double k0 = decay_exponent(model, 0.0);
  if (z <= model.x_reset) {
    // absorbed at 0 before reaching z and before the first reset
    return std::exp(-k0 * x) * std::expm1(2.0 * s * (x - z)) / std::expm1(-2.0 * s * z);
  }
  const double d2 = s - model.mu;
  const double reset_weight = std::exp(-2.0 * s * model.x_reset);
  const double ratio = scaled_exit_function(x, k0, d2, reset_weight) /
                       scaled_exit_function(z, k0, d2, reset_weight) * std::exp(d2 * (x - z));
  return 1.0 - ratio;
}

double maxdispl_pdf(const ResetModel& model, double x, double z) {
  validate(model);
  validate_start(x);
  if (std::isnan(z)) throw Error(Errc::NonFinite, "z must not be NaN");
  require_reset(model, "use maxdispl_pdf_noreset");
  if (z < x || std::isinf(z)) return 0.0;
  const double s = spread(model, 0.0);
  const double k0 = decay_exponent(model, 0.0);
  if (z <= model.x_reset) {
    const double denom = std::expm1(-2.0 * s * z);
    return 2.0 * s * std::exp(-k0 * x - 2.0 * s * z) * std::expm1(2.0 * s * x) / (denom * denom);
  }
  const double d2 = s - model.mu;
  const double reset_weight = std::exp(-2.0 * s * model.x_reset);
  const double nz = scaled_exit_function(z, k0, d2, reset_weight);
  const double slope = -k0 * std::exp(-2.0 * s * z) - d2 * reset_weight;
  return scaled_exit_function(x, k0, d2, reset_weight) * slope * std::exp(d2 * (x - z)) / (nz * nz);
}

MaxDisplacementCoefficients maxdispl_coefficients(const ResetModel& model, double z) {
  validate(model);
  require_reset(model, "no reset coupling without resetting");
  if (!(z > model.x_reset)) {
    throw Error(Errc::InvalidArgument, "coefficients are defined for z > x_R");
  }
  const double s = spread(model, 0.0);
  MaxDisplacementCoefficients c;
  c.d1 = -decay_exponent(model, 0.0);
  c.d2 = s - model.mu;
  const double reset_weight = std::exp(-2.0 * s * model.x_reset);
  c.c1 = -1.0 / (std::expm1(c.d1 * z) - reset_weight * bounded_exp(c.d2 * z) + reset_weight);
  c.c2 = -reset_weight * c.c1;
  c.a = 1.0 - c.c1 - c.c2;
  return c;
}

namespace {
void check_noreset(double mu, double x, double z) {
  if (!std::isfinite(mu) || std::isnan(z)) throw Error(Errc::NonFinite, "inputs must be finite");
  validate_start(x);
  if (mu > 0.0) {
    throw Error(Errc::PositiveDriftNoReset,
                "hitting 0 is not sure for mu > 0 without resetting; the law is defective");
  }
}
}  // namespace

double maxdispl_cdf_noreset(double mu, double x, double z) {
  check_noreset(mu, x, z);
  if (z < x) return 0.0;
  if (std::isinf(z)) return 1.0;
  if (mu == 0.0) return 1.0 - x / z;
  const double nu = -2.0 * mu;
  return std::expm1(nu * (x - z)) / std::expm1(-nu * z);
}

double maxdispl_pdf_noreset(double mu, double x, double z) {
  check_noreset(mu, x, z);
  if (z < x || std::isinf(z)) return 0.0;
  if (mu == 0.0) return x / (z * z);
  const double sh = std::sinh(mu * z);
  return -mu * std::expm1(-2.0 * mu * x) / (2.0 * sh * sh);
}

double maxdispl_mean_noreset(double mu, double x) {
  check_noreset(mu, x, x);
  if (mu == 0.0) return std::numeric_limits<double>::infinity();
  // x - (1 - e^{-2 mu x}) / (2 mu) * ln(1 - e^{2 mu x})
  return x + std::expm1(-2.0 * mu * x) / (2.0 * mu) * std::log(-std::expm1(2.0 * mu * x));
}

}  // namespace resetfp::analytic

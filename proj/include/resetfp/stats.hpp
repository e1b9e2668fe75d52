#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

namespace resetfp::stats {

/// 1.959964 standard errors: the two-sided 95% normal quantile.
inline constexpr double kZ95 = 1.959963984540054;

struct SummaryStats {
  double estimate = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
};

/// Sample mean with its standard error (n - 1 denominator) and the
/// normal-approximation 95% interval. Throws EmptySample.
SummaryStats summarize(std::span<const double> values);

/// Estimate with a given standard error; the interval is +-kZ95 * se.
SummaryStats from_estimate(double estimate, double std_error, std::size_t n);

struct ComparisonRecord {
  std::string label;
  double analytic_value = 0.0;
  double numeric_value = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;  ///< abs_err / |analytic|; +inf when analytic is 0
  std::optional<double> n_sigma;
  double std_error = 0.0;
  double rel_tol = 0.0;
  double tolerance = 0.0;  ///< max(3 se, rel_tol |analytic|)
  bool pass = false;
};

/// pass iff |estimate - analytic| <= max(3 se, rel_tol |analytic|).
/// n_sigma is reported when se > 0. Throws InvalidArgument for rel_tol <= 0.
ComparisonRecord compare(double analytic, const SummaryStats& numeric, double rel_tol,
                         std::string label = {});

/// Comparison of two deterministic numbers (no standard error).
ComparisonRecord compare(double analytic, double numeric, double rel_tol, std::string label = {});

/// sup |F_n - F| over the sample. Throws EmptySample.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// sup |F_n - G_m| between two empirical distributions. Throws EmptySample.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Asymptotic Kolmogorov tail P(D > d) with the Stephens small-sample factor;
/// `effective_n` is n for one sample and nm/(n+m) for two.
double ks_pvalue(double d, double effective_n);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope x. Throws InvalidArgument for
/// fewer than two points or mismatched lengths, DegenerateVariance when all x
/// coincide.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace resetfp::stats

#include "resetfp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "resetfp/error.hpp"

namespace resetfp::stats {

SummaryStats summarize(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::EmptySample, "no samples to summarize");
  const auto n = static_cast<double>(values.size());
  // two-pass mean and variance
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double se = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return from_estimate(mean, se, values.size());
}

SummaryStats from_estimate(double estimate, double std_error, std::size_t n) {
  return {estimate, std_error, estimate - kZ95 * std_error, estimate + kZ95 * std_error, n};
}

ComparisonRecord compare(double analytic, const SummaryStats& numeric, double rel_tol,
                         std::string label) {
  if (!(rel_tol > 0.0)) throw Error(Errc::InvalidArgument, "rel_tol must be > 0");
  ComparisonRecord rec;
  rec.label = std::move(label);
  rec.analytic_value = analytic;
  rec.numeric_value = numeric.estimate;
  rec.abs_err = std::abs(numeric.estimate - analytic);
  rec.rel_err = analytic != 0.0 ? rec.abs_err / std::abs(analytic)
                                : (rec.abs_err == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  rec.std_error = numeric.std_error;
  if (numeric.std_error > 0.0) rec.n_sigma = rec.abs_err / numeric.std_error;
  rec.rel_tol = rel_tol;
  rec.tolerance = std::max(3.0 * numeric.std_error, rel_tol * std::abs(analytic));
  rec.pass = rec.abs_err <= rec.tolerance;
  return rec;
}

ComparisonRecord compare(double analytic, double numeric, double rel_tol, std::string label) {
  return compare(analytic, SummaryStats{numeric, 0.0, numeric, numeric, 1}, rel_tol,
                 std::move(label));
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw Error(Errc::EmptySample, "no samples for the KS statistic");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return std::min(d, 1.0);
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(Errc::EmptySample, "no samples for the KS statistic");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto n = static_cast<double>(x.size());
  const auto m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

double ks_pvalue(double d, double effective_n) {
  if (!(effective_n > 0.0)) throw Error(Errc::InvalidArgument, "effective_n must be > 0");
  const double root = std::sqrt(effective_n);
  const double lambda = (root + 0.12 + 0.11 / root) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(Errc::InvalidArgument, "linear fit needs two or more paired points");
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(Errc::DegenerateVariance, "all abscissae coincide");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  fit.n = x.size();
  return fit;
}

}  // namespace resetfp::stats

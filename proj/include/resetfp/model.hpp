#pragma once

#include <complex>
#include <string_view>

namespace resetfp {

/// Drifted Brownian motion with unit diffusion, reset to `x_reset` at the
/// epochs of a rate-`r` Poisson process. The underlying SDE is dX = mu dt + dB.
struct ResetModel {
  double mu = 0.0;
  double r = 1.0;
  double x_reset = 1.0;
};

/// Returns `model` unchanged, or throws NonFinite / NonPositiveResetPoint /
/// NegativeRate.
const ResetModel& validate(const ResetModel& model);

/// Throws NonFinite for a non-finite start point and InvalidArgument for x <= 0.
void validate_start(double x);

/// Throws NoResetLimit when r == 0; `what` names the quantity and its limit.
void require_reset(const ResetModel& model, std::string_view what);

/// sqrt(mu^2 + 2(lambda + r)).
double spread(const ResetModel& model, double lambda);

/// mu + sqrt(mu^2 + 2(lambda + r)): the decay rate of the bounded homogeneous
/// solution, which replaces sqrt(2(lambda + r)) of the driftless formulas.
/// Evaluated without cancellation for mu < 0.
double decay_exponent(const ResetModel& model, double lambda);

/// Principal-branch continuation used by the Laplace inversion.
std::complex<double> decay_exponent(const ResetModel& model, std::complex<double> lambda);

}  // namespace resetfp

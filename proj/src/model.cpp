#include "resetfp/model.hpp"

#include <cmath>
#include <string>

#include "resetfp/error.hpp"

namespace resetfp {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::NonPositiveResetPoint: return "NonPositiveResetPoint";
    case Errc::NegativeRate: return "NegativeRate";
    case Errc::NonFinite: return "NonFinite";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NoResetLimit: return "NoResetLimit";
    case Errc::RangeOverflow: return "RangeOverflow";
    case Errc::DegenerateVariance: return "DegenerateVariance";
    case Errc::PositiveDriftNoReset: return "PositiveDriftNoReset";
    case Errc::SingularCoupling: return "SingularCoupling";
    case Errc::IllConditioned: return "IllConditioned";
    case Errc::FarFieldMissing: return "FarFieldMissing";
    case Errc::ContourFailure: return "ContourFailure";
    case Errc::FunctionalUnavailable: return "FunctionalUnavailable";
    case Errc::EmptySample: return "EmptySample";
  }
  return "Unknown";
}

const ResetModel& validate(const ResetModel& model) {
  if (!std::isfinite(model.mu) || !std::isfinite(model.r) || !std::isfinite(model.x_reset)) {
    throw Error(Errc::NonFinite, "model parameters must be finite");
  }
  if (model.x_reset <= 0.0) {
    throw Error(Errc::NonPositiveResetPoint,
                "reset point must be > 0, got " + std::to_string(model.x_reset));
  }
  if (model.r < 0.0) {
    throw Error(Errc::NegativeRate, "reset rate must be >= 0, got " + std::to_string(model.r));
  }
  return model;
}

void validate_start(double x) {
  if (!std::isfinite(x)) throw Error(Errc::NonFinite, "start point must be finite");
  if (x <= 0.0) throw Error(Errc::InvalidArgument, "start point must be > 0");
}

void require_reset(const ResetModel& model, std::string_view what) {
  if (model.r == 0.0) {
    throw Error(Errc::NoResetLimit, std::string(what));
  }
}

double spread(const ResetModel& model, double lambda) {
  return std::sqrt(model.mu * model.mu + 2.0 * (lambda + model.r));
}

double decay_exponent(const ResetModel& model, double lambda) {
  const double s = 2.0 * (lambda + model.r);
  const double root = std::sqrt(model.mu * model.mu + s);
  if (model.mu >= 0.0) return model.mu + root;
  // mu + root == s / (root - mu); the right side has no cancellation for mu < 0
  return s / (root - model.mu);
}

std::complex<double> decay_exponent(const ResetModel& model, std::complex<double> lambda) {
  const std::complex<double> s = 2.0 * (lambda + model.r);
  const std::complex<double> root = std::sqrt(model.mu * model.mu + s);
  if (model.mu >= 0.0) return model.mu + root;
  return s / (root - model.mu);
}

}  // namespace resetfp

#include "resetfp/ilt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "resetfp/analytic.hpp"
#include "resetfp/error.hpp"

namespace resetfp::ilt {
namespace {

constexpr double kShift = -0.6122;
constexpr double kScale = 0.5017;
constexpr double kAngle = 0.6407;
constexpr double kHeight = 0.2645;
constexpr double kMaxDigits = 16.0;
constexpr double kRingingFloor = -1e-9;

// Three quarters of the nodes, kept even. A coarser run bounds the error of
// the finer one while truncation dominates, and carries less cancellation once
// roundoff dominates, so the difference tracks the error of `nodes` in both
// regimes. A doubled run would report its own roundoff instead.
int check_nodes(int nodes) { return std::max(4, (3 * nodes / 4) & ~1); }

double talbot_sum(const Transform& transform, double t, int nodes) {
  const double n = static_cast<double>(nodes);
  const double step = 2.0 * std::numbers::pi / n;
  double sum = 0.0;
  for (int k = 0; k < nodes / 2; ++k) {
    const double theta = (k + 0.5) * step;
    const double cot = 1.0 / std::tan(kAngle * theta);
    const double sin = std::sin(kAngle * theta);
    const std::complex<double> z =
        (n / t) * std::complex<double>(kShift + kScale * theta * cot, kHeight * theta);
    const std::complex<double> dz =
        (n / t) * std::complex<double>(kScale * (cot - kAngle * theta / (sin * sin)), kHeight);
    sum += (std::exp(z * t) * transform(z) * dz).imag();
  }
  return 2.0 * sum / n;
}

}  // namespace

Inversion talbot(const Transform& transform, double t, int nodes) {
  if (!std::isfinite(t) || t <= 0.0) throw Error(Errc::InvalidArgument, "t must be > 0");
  if (nodes < 4 || nodes % 2 != 0) {
    throw Error(Errc::InvalidArgument, "node count must be even and >= 4");
  }
  const double value = talbot_sum(transform, t, nodes);
  const double check = talbot_sum(transform, t, check_nodes(nodes));
  if (!std::isfinite(value) || !std::isfinite(check)) {
    throw Error(Errc::ContourFailure, "non-finite contour sum at t = " + std::to_string(t));
  }
  const double diff = std::abs(value - check);
  const double size = std::max(std::abs(value), std::abs(check));
  double digits = kMaxDigits;
  if (diff > 0.0) {
    digits = size > 0.0 ? std::clamp(-std::log10(diff / size), 0.0, kMaxDigits) : 0.0;
  }
  return {value, digits};
}

Inversion fpt_density(const ResetModel& model, double x, double t,
                      const InversionOptions& options) {
  validate(model);
  validate_start(x);
  const Transform transform = [&](std::complex<double> lambda) {
    return analytic::fpt_lt(model, x, lambda);
  };
  return talbot(transform, t, options.nodes);
}

DensityCurve invert_fpt_density(const ResetModel& model, double x, std::span<const double> times,
                                const InversionOptions& options) {
  if (times.empty()) throw Error(Errc::InvalidArgument, "no times requested");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] <= 0.0 || (i > 0 && times[i] <= times[i - 1])) {
      throw Error(Errc::InvalidArgument, "times must be positive and strictly increasing");
    }
  }
  DensityCurve curve;
  curve.times.assign(times.begin(), times.end());
  curve.density.reserve(times.size());
  curve.digits.reserve(times.size());
  for (double t : times) {
    const Inversion point = fpt_density(model, x, t, options);
    if (point.digits < options.min_digits) {
      throw Error(Errc::ContourFailure, "contour sum lost its digits at t = " + std::to_string(t) +
                                            " (estimate " + std::to_string(point.digits) + ")");
    }
    if (point.value < kRingingFloor) {
      throw Error(Errc::ContourFailure, "negative density " + std::to_string(point.value) +
                                            " at t = " + std::to_string(t));
    }
    curve.density.push_back(std::max(point.value, 0.0));
    curve.digits.push_back(point.digits);
  }
  curve.cdf.resize(times.size());
  double mass = 0.5 * times[0] * curve.density[0];
  curve.cdf[0] = mass;
  for (std::size_t i = 1; i < times.size(); ++i) {
    mass += 0.5 * (times[i] - times[i - 1]) * (curve.density[i] + curve.density[i - 1]);
    curve.cdf[i] = mass;
  }
  curve.mass_check = std::abs(mass - 1.0);
  return curve;
}

}  // namespace resetfp::ilt

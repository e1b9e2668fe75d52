#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "resetfp/model.hpp"

/// Numerical inversion of Laplace transforms along a fixed Talbot-type
/// contour, used to recover the first-passage-time density from its transform.
namespace resetfp::ilt {

/// Nodes on the full contour. The verification run uses three quarters as many.
inline constexpr int kDefaultNodes = 32;

using Transform = std::function<std::complex<double>(std::complex<double>)>;

struct Inversion {
  double value = 0.0;
  /// -log10 of the relative difference between the n- and 3n/4-node sums,
  /// capped at 16.
  double digits = 0.0;
};

/// f(t) from F(lambda) = int_0^inf e^{-lambda t} f(t) dt for t > 0.
///
/// Contour (optimized cotangent shape, theta in (-pi, pi)):
///   z(theta) = (n/t) (-0.6122 + 0.5017 theta cot(0.6407 theta) + 0.2645 i theta).
/// It crosses the real axis at 0.1709 n/t > 0 and opens to the left, so it
/// encloses every singularity on the negative real axis. For the reset
/// transforms these are the branch point at lambda = -r - mu^2/2 and the poles
/// in (-r - mu^2/2, 0) that set the exponential tail. F must satisfy
/// F(conj z) = conj F(z); only the upper half of the contour is summed.
///
/// The truncation error falls like e^{-1.36 n} while cancellation in the sum
/// grows like eps e^{0.17 n} relative to max |F| on the contour, so n = 32 is
/// at the double-precision floor; more nodes lose digits.
Inversion talbot(const Transform& transform, double t, int nodes = kDefaultNodes);

struct DensityCurve {
  std::vector<double> times;
  std::vector<double> density;  ///< clipped at 0 after the ringing check
  std::vector<double> cdf;      ///< trapezoid from t = 0, where f vanishes
  std::vector<double> digits;   ///< per-time digit estimate
  double mass_check = 0.0;      ///< |cdf.back() - 1|
};

struct InversionOptions {
  int nodes = kDefaultNodes;
  /// ContourFailure below this many agreeing digits.
  double min_digits = 1.0;
};

/// Density of tau(x) at one time, through the closed-form transform evaluated
/// at complex lambda.
Inversion fpt_density(const ResetModel& model, double x, double t,
                      const InversionOptions& options = {});

/// Throws InvalidArgument unless times are positive and strictly increasing,
/// and ContourFailure if any point has fewer than min_digits or a density
/// below -1e-9 (ringing beyond clipping tolerance).
DensityCurve invert_fpt_density(const ResetModel& model, double x, std::span<const double> times,
                                const InversionOptions& options = {});

}  // namespace resetfp::ilt

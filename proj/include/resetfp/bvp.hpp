#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "resetfp/model.hpp"

/// Finite-difference solver for the second-order linear problems with a
/// nonlocal reset coupling,
///
///   1/2 u'' + mu u' - (r + lambda U(x)) u + r C + s(x) = 0,   C = u(x_R),
///   u(0) = left_value,  far-field closure at X_max,
///
/// which covers the Laplace transforms (s = 0) and the moment recursion
/// (lambda = 0, s = n U T_{n-1}) of first-passage time and area.
namespace resetfp::bvp {

/// U(x) = constant + slope * x, both nonnegative.
struct Potential {
  double constant = 1.0;
  double slope = 0.0;

  double at(double x) const { return constant + slope * x; }
};

/// s(x) = constant + slope * x + table[i]; `table` is either empty or holds
/// one value per grid node.
struct Source {
  double constant = 0.0;
  double slope = 0.0;
  std::vector<double> table;
};

/// Condition imposed at the right end X_max of the truncated domain.
struct FarField {
  enum class Kind {
    /// u(X) = r C / (lambda U(X) + r): the bounded, slowly varying branch of a
    /// transform problem.
    BoundedTransform,
    /// u(X) = value
    Value,
    /// u'(X) = value + growth * X
    Slope,
  };

  Kind kind = Kind::BoundedTransform;
  double value = 0.0;
  double growth = 0.0;

  static FarField bounded_transform() { return {}; }
  static FarField fixed(double v) { return {Kind::Value, v, 0.0}; }
  static FarField slope(double v, double growth_rate = 0.0) {
    return {Kind::Slope, v, growth_rate};
  }
};

struct ResetBvp {
  ResetModel model;
  Potential potential;
  double lambda = 0.0;
  Source source;
  double left_value = 1.0;
  FarField far_field;
};

/// Uniform grid 0 = x_0 < ... < x_N with x_R on node `reset_index`.
struct Grid {
  double h = 0.0;
  std::size_t intervals = 0;
  std::size_t reset_index = 0;
  double snap_distance = 0.0;

  double x(std::size_t i) const { return h * static_cast<double>(i); }
  double x_max() const { return x(intervals); }
  std::vector<double> abscissae() const;
};

inline constexpr std::size_t kDefaultGridN = 4096;
inline constexpr std::size_t kMinGridN = 64;

/// Picks h so that x_R is a grid node (h = x_R / m with m closest to
/// x_R grid_n / x_max) and covers at least [0, x_max].
Grid make_grid(const ResetModel& model, std::size_t grid_n, double x_max);

/// x_R plus 20 decay lengths of the slowest homogeneous mode, 1/(s - |mu|)
/// with s = sqrt(mu^2 + 2r). Equals x_R + 20/sqrt(2r) for mu = 0.
double default_x_max(const ResetModel& model);

struct GridSolution {
  std::vector<double> grid;
  std::vector<double> values;
  double coupling = 0.0;
  double residual_max = 0.0;
  double residual_tolerance = 0.0;
  double h = 0.0;
  double snap_distance = 0.0;
  std::size_t reset_index = 0;

  /// Four-point Lagrange interpolation; throws InvalidArgument outside the grid.
  double at(double x) const;
};

/// Solves by superposition over the affine coupling: u_a with C = 0, u_b the
/// response to C = 1, then C* = u_a(x_R) / (1 - u_b(x_R)) and u = u_a + C* u_b.
/// Throws SingularCoupling when |1 - u_b(x_R)| < 1e-10 and IllConditioned on a
/// zero pivot, a cell Peclet number |mu| h >= 1, or a residual above tolerance.
GridSolution solve(const ResetBvp& problem, const Grid& grid);
GridSolution solve(const ResetBvp& problem, std::size_t grid_n, double x_max);

/// Same discretization with C held fixed (no coupling solve).
GridSolution solve_with_coupling(const ResetBvp& problem, const Grid& grid, double coupling);

struct SolveOptions {
  std::size_t grid_n = kDefaultGridN;
  std::optional<double> x_max;
};

/// Transform problem E[exp(-lambda int U)] on the grid chosen by `options`,
/// widened when x_needed lies beyond it. Requires r > 0.
GridSolution transform_solution(const ResetModel& model, const Potential& potential, double lambda,
                                const SolveOptions& options = {}, double x_needed = 0.0);

/// E[exp(-lambda A(x))], the first-passage-area transform (U(x) = x).
double fpa_lt(const ResetModel& model, double x, double lambda, const SolveOptions& options = {});

/// E[exp(-lambda tau(x))] solved numerically (U = 1); used to cross-check the
/// closed form.
double fpt_lt(const ResetModel& model, double x, double lambda, const SolveOptions& options = {});

enum class MomentKind {
  Fpt,    ///< E[tau^n]
  Fpa,    ///< E[A^n]
  Joint,  ///< E[tau A]; the order argument is ignored
};

struct MomentSolution {
  std::vector<double> values;  ///< at the requested abscissae
  GridSolution solution;
  /// No closed form exists to check against (drifted E[A^2], drifted E[tau A]).
  bool numeric_only = false;
  /// The far-field closure extrapolates driftless asymptotics.
  bool closure_extrapolated = false;
};

/// Moments through the recursion 1/2 T_n'' + mu T_n' - r T_n
///   = -n U T_{n-1} - r T_n(x_R),  T_n(0) = 0,
/// lower orders solved first on the same grid. Orders other than 1 and 2 throw
/// FarFieldMissing.
MomentSolution moment_solve(const ResetModel& model, MomentKind which, int order,
                            std::span<const double> x_grid, const SolveOptions& options = {});

}  // namespace resetfp::bvp

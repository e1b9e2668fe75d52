#include "resetfp/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "resetfp/error.hpp"
#include "resetfp/tridiagonal.hpp"

namespace resetfp::bvp {
namespace {

constexpr double kSingularCoupling = 1e-10;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double source_at(const Source& source, const Grid& grid, std::size_t i) {
  double s = source.constant + source.slope * grid.x(i);
  if (!source.table.empty()) s += source.table[i];
  return s;
}

void check_problem(const ResetBvp& problem, const Grid& grid) {
  validate(problem.model);
  if (!std::isfinite(problem.lambda) || problem.lambda < 0.0) {
    throw Error(Errc::InvalidArgument, "lambda must be finite and >= 0");
  }
  if (problem.potential.constant < 0.0 || problem.potential.slope < 0.0) {
    throw Error(Errc::InvalidArgument, "potential coefficients must be >= 0");
  }
  if (!problem.source.table.empty() && problem.source.table.size() != grid.intervals + 1) {
    throw Error(Errc::InvalidArgument, "tabulated source does not match the grid");
  }
  if (grid.intervals < 3 || grid.reset_index == 0 || grid.reset_index >= grid.intervals) {
    throw Error(Errc::InvalidArgument, "grid must place x_R strictly inside the domain");
  }
  if (std::abs(problem.model.mu) * grid.h >= 1.0) {
    throw Error(Errc::IllConditioned, "cell Peclet number |mu| h >= 1; refine the grid");
  }
}

// Far-field data split into its C-independent part and its coefficient of C.
struct FarFieldData {
  bool dirichlet = true;
  double fixed = 0.0;
  double per_coupling = 0.0;
};

FarFieldData far_field_data(const ResetBvp& problem, const Grid& grid) {
  const double x_max = grid.x_max();
  const FarField& ff = problem.far_field;
  switch (ff.kind) {
    case FarField::Kind::BoundedTransform: {
      const double r = problem.model.r;
      const double denom = problem.lambda * problem.potential.at(x_max) + r;
      if (denom <= 0.0) {
        throw Error(Errc::FarFieldMissing, "bounded closure needs lambda U(X) + r > 0");
      }
      return {true, 0.0, r / denom};
    }
    case FarField::Kind::Value:
      return {true, ff.value, 0.0};
    case FarField::Kind::Slope:
      return {false, ff.value + ff.growth * x_max, 0.0};
  }
  throw Error(Errc::FarFieldMissing, "unknown far-field closure");
}

// Discrete system over the unknowns u_1 .. u_N, plus the two right-hand sides
// (C-independent and per unit of C).
struct Discretization {
  Tridiagonal matrix;
  std::vector<double> rhs_fixed;
  std::vector<double> rhs_coupling;
  double scale = 0.0;  // largest coefficient magnitude, for the residual tolerance
};

Discretization discretize(const ResetBvp& problem, const Grid& grid) {
  const std::size_t n = grid.intervals;
  const double h = grid.h;
  const double mu = problem.model.mu;
  const double r = problem.model.r;
  const double lo = 0.5 / (h * h) - mu / (2.0 * h);
  const double up = 0.5 / (h * h) + mu / (2.0 * h);

  Discretization d{Tridiagonal(n), std::vector<double>(n), std::vector<double>(n), 0.0};
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t row = i - 1;
    const double kill = r + problem.lambda * problem.potential.at(grid.x(i));
    d.matrix.lower[row] = lo;
    d.matrix.diag[row] = -1.0 / (h * h) - kill;
    d.matrix.upper[row] = up;
    d.rhs_fixed[row] = -source_at(problem.source, grid, i);
    d.rhs_coupling[row] = -r;
    d.scale = std::max(d.scale, 1.0 / (h * h) + std::abs(mu) / h + kill);
  }
  d.rhs_fixed[0] -= lo * problem.left_value;

  const FarFieldData ff = far_field_data(problem, grid);
  const std::size_t last = n - 1;
  if (ff.dirichlet) {
    d.matrix.lower[last] = 0.0;
    d.matrix.diag[last] = 1.0;
    d.rhs_fixed[last] = ff.fixed;
    d.rhs_coupling[last] = ff.per_coupling;
  } else {
    // (3 u_N - 4 u_{N-1} + u_{N-2}) / 2h = g, with u_{N-2} eliminated through
    // the equation of node N-1 so the system stays tridiagonal.
    const std::size_t prev = last - 1;
    const double a = d.matrix.lower[prev];
    d.matrix.lower[last] = -4.0 - d.matrix.diag[prev] / a;
    d.matrix.diag[last] = 3.0 - d.matrix.upper[prev] / a;
    d.rhs_fixed[last] = 2.0 * h * ff.fixed - d.rhs_fixed[prev] / a;
    d.rhs_coupling[last] = -d.rhs_coupling[prev] / a;
  }
  return d;
}

GridSolution assemble(const ResetBvp& problem, const Grid& grid, std::vector<double> interior,
                      double coupling) {
  GridSolution sol;
  sol.grid = grid.abscissae();
  sol.values.reserve(grid.intervals + 1);
  sol.values.push_back(problem.left_value);
  sol.values.insert(sol.values.end(), interior.begin(), interior.end());
  sol.coupling = coupling;
  sol.h = grid.h;
  sol.snap_distance = grid.snap_distance;
  sol.reset_index = grid.reset_index;

  const double h = grid.h;
  const double mu = problem.model.mu;
  const double r = problem.model.r;
  double residual = 0.0;
  double u_max = 0.0;
  double s_max = 0.0;
  double scale = 0.0;
  for (std::size_t i = 1; i < grid.intervals; ++i) {
    const double um = sol.values[i - 1], u0 = sol.values[i], up = sol.values[i + 1];
    const double kill = r + problem.lambda * problem.potential.at(grid.x(i));
    const double s = source_at(problem.source, grid, i);
    const double res = 0.5 * (um - 2.0 * u0 + up) / (h * h) + mu * (up - um) / (2.0 * h) -
                       kill * u0 + r * coupling + s;
    residual = std::max(residual, std::abs(res));
    u_max = std::max(u_max, std::abs(u0));
    s_max = std::max(s_max, std::abs(s));
    scale = std::max(scale, 1.0 / (h * h) + std::abs(mu) / h + kill);
  }
  sol.residual_max = residual;
  sol.residual_tolerance = 1e3 * kEps * (scale * (1.0 + u_max) + r * std::abs(coupling) + s_max);
  if (!(residual <= sol.residual_tolerance)) {
    throw Error(Errc::IllConditioned, "discrete residual " + std::to_string(residual) +
                                          " exceeds tolerance " +
                                          std::to_string(sol.residual_tolerance));
  }
  return sol;
}

}  // namespace

std::vector<double> Grid::abscissae() const {
  std::vector<double> xs(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) xs[i] = x(i);
  return xs;
}

double default_x_max(const ResetModel& model) {
  validate(model);
  require_reset(model, "no bounded far field without resetting");
  const double s = spread(model, 0.0);
  const double abs_mu = std::abs(model.mu);
  // s - |mu| written without cancellation
  const double slowest = 2.0 * model.r / (s + abs_mu);
  return model.x_reset + 20.0 / slowest;
}

Grid make_grid(const ResetModel& model, std::size_t grid_n, double x_max) {
  validate(model);
  if (grid_n < kMinGridN) {
    throw Error(Errc::InvalidArgument, "grid_n must be >= " + std::to_string(kMinGridN));
  }
  if (!std::isfinite(x_max) || !(x_max > model.x_reset)) {
    throw Error(Errc::InvalidArgument, "x_max must be finite and > x_R");
  }
  const double nominal = x_max / static_cast<double>(grid_n);
  const double steps_to_reset = std::max(1.0, std::round(model.x_reset / nominal));
  Grid grid;
  grid.h = model.x_reset / steps_to_reset;
  grid.reset_index = static_cast<std::size_t>(steps_to_reset);
  grid.intervals = static_cast<std::size_t>(std::ceil(x_max / grid.h - 1e-9));
  grid.intervals = std::max(grid.intervals, grid.reset_index + 3);
  grid.snap_distance = std::abs(grid.x(grid.reset_index) - model.x_reset);
  return grid;
}

double GridSolution::at(double x) const {
  if (!(x >= 0.0) || x > grid.back() * (1.0 + 1e-12)) {
    throw Error(Errc::InvalidArgument, "abscissa " + std::to_string(x) + " outside the grid");
  }
  const std::size_t n = grid.size() - 1;
  const double pos = x / h;
  const auto nearest = static_cast<std::size_t>(std::llround(pos));
  if (std::abs(pos - static_cast<double>(nearest)) < 1e-12 && nearest <= n) return values[nearest];
  std::size_t left = static_cast<std::size_t>(std::floor(pos));
  left = std::min(left, n - 1);
  // nodes left-1 .. left+2, shifted to stay inside [0, n]
  std::size_t first = left == 0 ? 0 : left - 1;
  first = std::min(first, n - 3);
  double sum = 0.0;
  for (std::size_t j = first; j < first + 4; ++j) {
    double weight = 1.0;
    for (std::size_t k = first; k < first + 4; ++k) {
      if (k != j) weight *= (x - grid[k]) / (grid[j] - grid[k]);
    }
    sum += weight * values[j];
  }
  return sum;
}

GridSolution solve(const ResetBvp& problem, const Grid& grid) {
  check_problem(problem, grid);
  const Discretization d = discretize(problem, grid);
  const ThomasFactorization lu(d.matrix);
  std::vector<double> ua = lu.solve(d.rhs_fixed);
  const std::vector<double> ub = lu.solve(d.rhs_coupling);

  const std::size_t m = grid.reset_index - 1;
  const double denom = 1.0 - ub[m];
  if (std::abs(denom) < kSingularCoupling) {
    throw Error(Errc::SingularCoupling, "1 - u_b(x_R) = " + std::to_string(denom));
  }
  const double coupling = ua[m] / denom;
  for (std::size_t i = 0; i < ua.size(); ++i) ua[i] += coupling * ub[i];
  ua[m] = coupling;
  return assemble(problem, grid, std::move(ua), coupling);
}

GridSolution solve(const ResetBvp& problem, std::size_t grid_n, double x_max) {
  return solve(problem, make_grid(problem.model, grid_n, x_max));
}

GridSolution solve_with_coupling(const ResetBvp& problem, const Grid& grid, double coupling) {
  check_problem(problem, grid);
  const Discretization d = discretize(problem, grid);
  std::vector<double> rhs(d.rhs_fixed.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = d.rhs_fixed[i] + coupling * d.rhs_coupling[i];
  return assemble(problem, grid, ThomasFactorization(d.matrix).solve(rhs), coupling);
}

namespace {

Grid grid_for(const ResetModel& model, const SolveOptions& options, double x_needed) {
  double x_max = options.x_max.value_or(default_x_max(model));
  if (x_needed >= x_max) x_max = x_needed + (default_x_max(model) - model.x_reset);
  return make_grid(model, options.grid_n, x_max);
}

void check_transform_args(const ResetModel& model, double x, double lambda) {
  validate(model);
  require_reset(model, "the numeric transforms need r > 0");
  if (!std::isfinite(x) || x < 0.0) throw Error(Errc::InvalidArgument, "x must be >= 0");
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw Error(Errc::InvalidArgument, "lambda must be finite and >= 0");
  }
}

}  // namespace

GridSolution transform_solution(const ResetModel& model, const Potential& potential, double lambda,
                                const SolveOptions& options, double x_needed) {
  check_transform_args(model, x_needed, lambda);
  ResetBvp problem;
  problem.model = model;
  problem.potential = potential;
  problem.lambda = lambda;
  problem.left_value = 1.0;
  problem.far_field = FarField::bounded_transform();
  return solve(problem, grid_for(model, options, x_needed));
}

double fpa_lt(const ResetModel& model, double x, double lambda, const SolveOptions& options) {
  return transform_solution(model, {0.0, 1.0}, lambda, options, x).at(x);
}

double fpt_lt(const ResetModel& model, double x, double lambda, const SolveOptions& options) {
  return transform_solution(model, {1.0, 0.0}, lambda, options, x).at(x);
}

MomentSolution moment_solve(const ResetModel& model, MomentKind which, int order,
                            std::span<const double> x_grid, const SolveOptions& options) {
  validate(model);
  require_reset(model, "moments are +inf or undefined without resetting");
  if (which != MomentKind::Joint && order != 1 && order != 2) {
    throw Error(Errc::FarFieldMissing,
                "no far-field closure for moment order " + std::to_string(order));
  }
  double x_needed = 0.0;
  for (double x : x_grid) {
    if (!std::isfinite(x) || x < 0.0) throw Error(Errc::InvalidArgument, "x must be >= 0");
    x_needed = std::max(x_needed, x);
  }
  const Grid grid = grid_for(model, options, x_needed);
  const double r = model.r;

  ResetBvp base;
  base.model = model;
  base.lambda = 0.0;
  base.left_value = 0.0;

  auto tabulate = [&](const GridSolution& lower, auto&& weight) {
    std::vector<double> table(lower.values.size());
    for (std::size_t i = 0; i < table.size(); ++i) table[i] = weight(grid.x(i)) * lower.values[i];
    return table;
  };

  // E[tau]: source 1, bounded at infinity
  auto fpt_first = [&] {
    ResetBvp p = base;
    p.source.constant = 1.0;
    p.far_field = FarField::slope(0.0);
    return solve(p, grid);
  };
  // E[A]: source x, E[A] ~ x / r
  auto fpa_first = [&] {
    ResetBvp p = base;
    p.source.slope = 1.0;
    p.far_field = FarField::slope(1.0 / r);
    return solve(p, grid);
  };

  MomentSolution out;
  switch (which) {
    case MomentKind::Fpt: {
      out.solution = fpt_first();
      if (order == 2) {
        ResetBvp p = base;
        p.source.table = tabulate(out.solution, [](double) { return 2.0; });
        p.far_field = FarField::slope(0.0);
        out.solution = solve(p, grid);
      }
      break;
    }
    case MomentKind::Fpa: {
      out.solution = fpa_first();
      if (order == 2) {
        ResetBvp p = base;
        p.source.table = tabulate(out.solution, [](double x) { return 2.0 * x; });
        // E[A] ~ x/r + a_inf makes the particular branch of E[A^2] equal to
        // 2x^2/r^2 + b x + const with b = (2 a_inf + 4 mu / r^2) / r.
        const double a_inf = out.solution.values.back() - grid.x_max() / r;
        const double b = (2.0 * a_inf + 4.0 * model.mu / (r * r)) / r;
        p.far_field = FarField::slope(b, 4.0 / (r * r));
        out.solution = solve(p, grid);
        out.numeric_only = model.mu != 0.0;
        out.closure_extrapolated = model.mu != 0.0;
      }
      break;
    }
    case MomentKind::Joint: {
      const GridSolution tau = fpt_first();
      const GridSolution area = fpa_first();
      ResetBvp p = base;
      p.source.table.resize(grid.intervals + 1);
      for (std::size_t i = 0; i <= grid.intervals; ++i) {
        p.source.table[i] = grid.x(i) * tau.values[i] + area.values[i];
      }
      const double growth = model.x_reset * decay_exponent(model, 0.0);
      if (growth > 700.0) throw Error(Errc::RangeOverflow, "e^{x_R k0} overflows");
      p.far_field = FarField::slope((std::exp(growth) + 1.0) / (r * r));
      out.solution = solve(p, grid);
      out.numeric_only = model.mu != 0.0;
      out.closure_extrapolated = model.mu != 0.0;
      break;
    }
  }
  out.values.reserve(x_grid.size());
  for (double x : x_grid) out.values.push_back(out.solution.at(x));
  return out;
}

}  // namespace resetfp::bvp

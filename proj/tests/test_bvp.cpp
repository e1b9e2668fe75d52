#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "resetfp/analytic.hpp"
#include "resetfp/bvp.hpp"
#include "resetfp/error.hpp"
#include "resetfp/tridiagonal.hpp"

using namespace resetfp;
using doctest::Approx;

namespace {

const ResetModel kCanonical{0.0, 1.0, 1.0};
const ResetModel kDrifted{-1.0, 1.0, 1.0};

template <class F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidArgument;
}

bvp::SolveOptions fine(std::size_t n = 16384) {
  bvp::SolveOptions o;
  o.grid_n = n;
  return o;
}

double moment_at(const ResetModel& m, bvp::MomentKind kind, int order, double x,
                 const bvp::SolveOptions& opts) {
  const double xs[] = {x};
  return bvp::moment_solve(m, kind, order, xs, opts).values.front();
}

}  // namespace

TEST_CASE("Thomas solver reproduces a dense solve") {
  Tridiagonal t(5);
  const double lower[] = {0.0, -1.0, 0.5, -2.0, 1.0};
  const double diag[] = {4.0, 5.0, 6.0, 7.0, 3.0};
  const double upper[] = {1.0, 2.0, -1.0, 1.5, 0.0};
  std::array<std::array<double, 5>, 5> dense{};
  for (int i = 0; i < 5; ++i) {
    t.lower[i] = lower[i];
    t.diag[i] = diag[i];
    t.upper[i] = upper[i];
    dense[i][i] = diag[i];
    if (i > 0) dense[i][i - 1] = lower[i];
    if (i < 4) dense[i][i + 1] = upper[i];
  }
  const std::array<double, 5> rhs = {1.0, -2.0, 3.0, 0.5, 4.0};
  const auto ref = oracle::solve_dense<5>(dense, rhs);
  const auto got = ThomasFactorization(t).solve(rhs);
  for (int i = 0; i < 5; ++i) CHECK(got[i] == Approx(ref[i]).epsilon(1e-14));

  Tridiagonal singular(2);
  singular.diag = {0.0, 1.0};
  CHECK(code_of([&] { ThomasFactorization{singular}; }) == Errc::IllConditioned);
}

TEST_CASE("grid places the reset point on a node") {
  for (double xr : {0.3, 1.0, 2.7}) {
    const ResetModel m{0.0, 1.0, xr};
    const bvp::Grid g = bvp::make_grid(m, 4096, bvp::default_x_max(m));
    CHECK(g.snap_distance < 1e-14);
    CHECK(g.x(g.reset_index) == Approx(xr).epsilon(1e-15));
    CHECK(g.x_max() >= bvp::default_x_max(m) - 1e-12);
  }
  CHECK(bvp::default_x_max(kCanonical) == Approx(1.0 + 20.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(code_of([] { bvp::make_grid(kCanonical, 10, 5.0); }) == Errc::InvalidArgument);
  CHECK(code_of([] { bvp::make_grid(kCanonical, 4096, 0.5); }) == Errc::InvalidArgument);
  CHECK(code_of([] { bvp::default_x_max({0.0, 0.0, 1.0}); }) == Errc::NoResetLimit);
}

TEST_CASE("fpt transform agrees with the closed form") {
  CHECK(std::abs(bvp::fpt_lt(kCanonical, 1.0, 1.0, fine()) - oracle::kLtCanonical) < 1e-6);
  CHECK(std::abs(bvp::fpt_lt(kCanonical, 1.0, 1.0) - oracle::kLtCanonical) < 1e-6);
  for (double mu : {-1.0, 0.4})
    for (double lambda : {0.2, 1.0, 5.0})
      for (double x : {0.3, 1.0, 2.5}) {
        const ResetModel m{mu, 1.0, 1.0};
        CHECK(bvp::fpt_lt(m, x, lambda, fine()) ==
              Approx(analytic::fpt_lt(m, x, lambda)).epsilon(1e-6));
      }
}

TEST_CASE("transform solutions decrease monotonically and ignore domain truncation") {
  for (double mu : {-1.0, 0.0, 0.5}) {
    const ResetModel m{mu, 1.0, 1.0};
    for (const bvp::Potential& p : {bvp::Potential{1.0, 0.0}, bvp::Potential{0.0, 1.0}}) {
      const bvp::GridSolution sol = bvp::transform_solution(m, p, 1.0);
      // the tail flattens onto its far-field constant, so ties are allowed there
      for (std::size_t i = 1; i < sol.values.size(); ++i) CHECK(sol.values[i] <= sol.values[i - 1] + 1e-13);
      CHECK(sol.values.back() < sol.values[sol.reset_index]);
      CHECK(sol.residual_max <= sol.residual_tolerance);
    }
  }
  const double g = std::sqrt(2.0);
  for (const bvp::Potential& p : {bvp::Potential{1.0, 0.0}, bvp::Potential{0.0, 1.0}}) {
    bvp::SolveOptions near = fine(8192), far = fine(8192);
    near.x_max = 1.0 + 10.0 / g;
    far.x_max = 1.0 + 20.0 / g;
    // same spacing on both domains so only the truncation differs
    far.grid_n = 2 * 8192 - static_cast<std::size_t>(8192 * 1.0 / near.x_max.value());
    const double a = bvp::transform_solution(kCanonical, p, 0.5, near).coupling;
    const double b = bvp::transform_solution(kCanonical, p, 0.5, far).coupling;
    CHECK(std::abs(a - b) < 1e-7);
  }
}

TEST_CASE("moment recursion reproduces the closed forms") {
  const auto opts = fine();
  using K = bvp::MomentKind;
  CHECK(moment_at(kCanonical, K::Fpt, 1, 1.0, opts) == Approx(oracle::kMeanTau).epsilon(1e-6));
  CHECK(moment_at(kCanonical, K::Fpt, 2, 1.0, opts) == Approx(oracle::kSecondTau).epsilon(1e-6));
  CHECK(moment_at(kCanonical, K::Fpa, 1, 1.0, opts) == Approx(oracle::kMeanArea).epsilon(1e-6));
  CHECK(moment_at(kCanonical, K::Fpa, 2, 1.0, opts) == Approx(oracle::kSecondArea).epsilon(1e-6));
  CHECK(moment_at(kCanonical, K::Joint, 1, 1.0, opts) == Approx(oracle::kJoint).epsilon(1e-6));
  for (double x : {0.5, 1.0, 2.5}) {
    CHECK(moment_at(kDrifted, K::Fpt, 1, x, opts) ==
          Approx(analytic::fpt_mean(kDrifted, x)).epsilon(1e-6));
    CHECK(moment_at(kDrifted, K::Fpt, 2, x, opts) ==
          Approx(analytic::fpt_second_moment(kDrifted, x)).epsilon(1e-6));
    CHECK(moment_at(kDrifted, K::Fpa, 1, x, opts) ==
          Approx(analytic::fpa_mean(kDrifted, x)).epsilon(1e-6));
  }
  const ResetModel up{0.5, 1.0, 1.0};
  CHECK(moment_at(up, K::Fpa, 1, 1.0, opts) == Approx(oracle::kMeanAreaHalfDrift).epsilon(1e-6));
}

TEST_CASE("moment solutions report their provenance flags") {
  const double xs[] = {0.5, 1.0};
  const auto drifted = bvp::moment_solve(kDrifted, bvp::MomentKind::Fpa, 2, xs);
  CHECK(drifted.numeric_only);
  CHECK(drifted.closure_extrapolated);
  CHECK(drifted.values.size() == 2);
  const auto plain = bvp::moment_solve(kCanonical, bvp::MomentKind::Fpa, 2, xs);
  CHECK_FALSE(plain.numeric_only);
  CHECK(code_of([&] { bvp::moment_solve(kCanonical, bvp::MomentKind::Fpt, 3, xs); }) ==
        Errc::FarFieldMissing);
  CHECK(code_of([&] { bvp::moment_solve({0.0, 0.0, 1.0}, bvp::MomentKind::Fpt, 1, xs); }) ==
        Errc::NoResetLimit);
}

TEST_CASE("drifted second area moment and joint moment are self-consistent") {
  // Cauchy-Schwarz and variance positivity for the numeric-only quantities
  const auto opts = fine(8192);
  using K = bvp::MomentKind;
  for (double x : {0.3, 1.0, 3.0}) {
    const double t1 = moment_at(kDrifted, K::Fpt, 1, x, opts);
    const double t2 = moment_at(kDrifted, K::Fpt, 2, x, opts);
    const double a1 = moment_at(kDrifted, K::Fpa, 1, x, opts);
    const double a2 = moment_at(kDrifted, K::Fpa, 2, x, opts);
    const double j = moment_at(kDrifted, K::Joint, 1, x, opts);
    CHECK(a2 > a1 * a1);
    CHECK(j < std::sqrt(t2 * a2));
    CHECK(j > t1 * a1);
  }
  // grid refinement changes the values only at the discretization level
  const double coarse = moment_at(kDrifted, K::Fpa, 2, 1.0, fine(4096));
  const double finer = moment_at(kDrifted, K::Fpa, 2, 1.0, fine(16384));
  CHECK(coarse == Approx(finer).epsilon(1e-5));
}

TEST_CASE("second-order convergence under grid halving") {
  // x_max = 12 with grid_n = 12 m puts x_R = 1 on a node and halves h exactly
  std::vector<double> errors;
  std::vector<double> hs;
  for (std::size_t n : {384u, 768u, 1536u}) {
    bvp::SolveOptions o;
    o.grid_n = n;
    o.x_max = 12.0;
    const double xs[] = {1.0};
    const auto sol = bvp::moment_solve(kCanonical, bvp::MomentKind::Fpt, 1, xs, o);
    errors.push_back(std::abs(sol.values[0] - oracle::kMeanTau));
    hs.push_back(sol.solution.h);
  }
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    const double order = std::log(errors[i] / errors[i + 1]) / std::log(hs[i] / hs[i + 1]);
    CHECK(order == Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("first-passage-area transform") {
  double prev = 1.0;
  for (double lambda : {0.0, 0.01, 0.1, 1.0, 10.0}) {
    const double v = bvp::fpa_lt(kCanonical, 1.0, lambda);
    if (lambda == 0.0) {
      CHECK(v == Approx(1.0).epsilon(1e-12));
    } else {
      CHECK(v > 0.0);
      CHECK(v < prev);
    }
    prev = v;
  }
  // Jensen: E[e^{-lambda A}] >= e^{-lambda E[A]}
  for (double lambda : {0.1, 1.0}) {
    CHECK(bvp::fpa_lt(kCanonical, 1.0, lambda) >= std::exp(-lambda * oracle::kMeanArea));
  }
}

TEST_CASE("solver failure modes") {
  // cell Peclet number above 1 on a coarse grid with strong drift
  const ResetModel steep{-300.0, 1.0, 1.0};
  bvp::SolveOptions coarse;
  coarse.grid_n = 64;
  coarse.x_max = 40.0;
  CHECK(code_of([&] { bvp::fpt_lt(steep, 1.0, 1.0, coarse); }) == Errc::IllConditioned);
  CHECK(code_of([] { bvp::fpa_lt({0.0, 0.0, 1.0}, 1.0, 1.0); }) == Errc::NoResetLimit);
  CHECK(code_of([] { bvp::fpa_lt(kCanonical, 1.0, -1.0); }) == Errc::InvalidArgument);
}

TEST_CASE("interpolation on the grid solution") {
  const bvp::GridSolution sol = bvp::transform_solution(kCanonical, {1.0, 0.0}, 1.0, fine());
  CHECK(sol.at(1.0) == sol.coupling);
  for (double x : {0.0123, 0.77, 3.3333}) {
    CHECK(sol.at(x) == Approx(analytic::fpt_lt(kCanonical, x, 1.0)).epsilon(1e-6));
  }
  CHECK(code_of([&] { (void)sol.at(sol.grid.back() + 1.0); }) == Errc::InvalidArgument);
  CHECK(code_of([&] { (void)sol.at(-0.1); }) == Errc::InvalidArgument);
}

TEST_CASE("solve_with_coupling at the resolved coupling reproduces the solution") {
  bvp::ResetBvp p;
  p.model = kCanonical;
  p.lambda = 1.0;
  const bvp::Grid g = bvp::make_grid(kCanonical, 2048, bvp::default_x_max(kCanonical));
  const bvp::GridSolution a = bvp::solve(p, g);
  const bvp::GridSolution b = bvp::solve_with_coupling(p, g, a.coupling);
  for (std::size_t i = 0; i < a.values.size(); i += 97) {
    CHECK(b.values[i] == Approx(a.values[i]).epsilon(1e-12));
  }
}

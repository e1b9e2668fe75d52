#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "resetfp/model.hpp"
#include "resetfp/stats.hpp"

/// Monte Carlo samplers for the reset process started at x.
///
/// Sample i of a batch draws only from the random stream (seed, first_index + i),
/// so results do not depend on the thread count, and a run split into
/// contiguous index ranges reproduces the sequential run once the pieces are
/// concatenated in order.
namespace resetfp::mc {

enum class Engine {
  Exact,  ///< renewal sampler of tau, no discretization
  Path,   ///< time-stepped paths giving (tau, A, M)
};

std::string_view to_string(Engine engine);

struct SimConfig {
  std::size_t n_samples = 10000;
  double dt = 1e-3;  ///< path engine only
  std::uint64_t seed = 1;
  bool bridge_correction = true;
  /// Sample each step's maximum from the Brownian bridge between its end
  /// values instead of using the grid values alone (which bias M downward by
  /// O(sqrt(dt))).
  bool bridge_maximum = true;
  double max_time = 1e6;
  unsigned threads = 1;
  std::uint64_t first_index = 0;
};

/// Throws InvalidArgument for n_samples == 0, threads == 0, max_time <= 0, or
/// (path engine) dt outside (0, 0.1].
void validate(const SimConfig& config, Engine engine);

struct SampleBatch {
  Engine engine = Engine::Exact;
  SimConfig config;
  ResetModel model;
  double x = 0.0;
  std::vector<double> tau;
  std::vector<double> area;       ///< path engine only
  std::vector<double> max_displ;  ///< path engine only
  /// Exact engine: 1 if the first excursion hit 0 before the first reset.
  std::vector<std::uint8_t> absorbed_first_cycle;
  /// Samples discarded because their clock passed max_time.
  std::size_t horizon_exceeded = 0;

  std::size_t size() const { return tau.size(); }
};

/// Renewal scheme: from y draw sigma ~ Exp(r) and the hitting time T of 0 for
/// the drifted motion (Levy for mu = 0, inverse Gaussian for mu < 0, defective
/// inverse Gaussian for mu > 0). T < sigma ends the sample; otherwise the clock
/// advances by sigma and the walk restarts from x_R.
/// Throws PositiveDriftNoReset for r = 0 with mu > 0.
SampleBatch sample_fpt_exact(const ResetModel& model, double x, const SimConfig& config);

/// Gaussian steps of size dt, shortened to land exactly on each reset epoch.
/// A step from y to y' > 0 is absorbed with the bridge crossing probability
/// exp(-2 y y' / step) when bridge_correction is set; absorption is dated at the
/// step midpoint and closes the area with a triangle y step / 4. The maximum
/// covers grid values, reset landings and, with bridge_maximum, the bridge
/// maximum inside each surviving step.
SampleBatch sample_path(const ResetModel& model, double x, const SimConfig& config);

/// Draws the batch with the requested engine.
SampleBatch simulate(Engine engine, const ResetModel& model, double x, const SimConfig& config);

/// Concatenation, in argument order. Throws InvalidArgument when the engines,
/// models or start points differ.
SampleBatch merge(const SampleBatch& a, const SampleBatch& b);

struct Functional {
  enum class Kind {
    MeanTau,
    SecondTau,
    MeanArea,
    SecondArea,
    Joint,               ///< E[tau A]
    LtTau,               ///< E[e^{-lambda tau}]
    LtArea,              ///< E[e^{-lambda A}]
    CdfMax,              ///< P(M <= z)
    AbsorbedFirstCycle,  ///< P(first excursion hits 0 before a reset)
  };

  Kind kind = Kind::MeanTau;
  double parameter = 0.0;  ///< lambda or z

  static Functional mean_tau() { return {Kind::MeanTau}; }
  static Functional second_tau() { return {Kind::SecondTau}; }
  static Functional mean_area() { return {Kind::MeanArea}; }
  static Functional second_area() { return {Kind::SecondArea}; }
  static Functional joint() { return {Kind::Joint}; }
  static Functional lt(double lambda) { return {Kind::LtTau, lambda}; }
  static Functional lt_area(double lambda) { return {Kind::LtArea, lambda}; }
  static Functional cdf_max(double z) { return {Kind::CdfMax, z}; }
  static Functional absorbed_first_cycle() { return {Kind::AbsorbedFirstCycle}; }
};

std::string to_string(const Functional& functional);

/// Sample mean of the functional's per-sample values. Throws EmptySample and
/// FunctionalUnavailable (area or maximum from the exact engine, first-cycle
/// flags from the path engine).
stats::SummaryStats estimate(const SampleBatch& batch, const Functional& functional);

/// Pearson correlation of tau and A, with the normal-theory standard error
/// (1 - rho^2) / sqrt(n). Path engine only.
stats::SummaryStats sample_correlation(const SampleBatch& batch);

}  // namespace resetfp::mc

#include "resetfp/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

#include "resetfp/error.hpp"
#include "resetfp/rng.hpp"

namespace resetfp::mc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Draw {
  double tau = 0.0;
  double area = 0.0;
  double max_displ = 0.0;
  bool absorbed_first_cycle = false;
};

// Inverse Gaussian with the given mean and shape (Michael, Schucany and Haas).
double inverse_gaussian(rng::Stream& rng, double mean, double shape) {
  const double n = rng.normal();
  const double w = mean * n * n;
  // mean + mean w/(2 shape) - mean/(2 shape) sqrt(4 mean shape w + w^2),
  // rearranged to avoid cancellation when w is large
  const double root = mean - 2.0 * mean * w / (w + std::sqrt(4.0 * shape * w + w * w));
  return rng.uniform() <= mean / (mean + root) ? root : mean * mean / root;
}

// First hitting time of 0 from y > 0 for unit-diffusion motion with drift mu.
double hitting_time(rng::Stream& rng, double mu, double y) {
  if (mu == 0.0) {
    const double n = rng.normal();
    return y * y / (n * n);
  }
  if (mu > 0.0 && rng.uniform() >= std::exp(-2.0 * mu * y)) return kInf;
  return inverse_gaussian(rng, y / std::abs(mu), y * y);
}

std::optional<Draw> exact_draw(rng::Stream& rng, const ResetModel& model, double x,
                               double max_time) {
  Draw d;
  double clock = 0.0;
  double y = x;
  for (bool first = true;; first = false) {
    const double sigma = model.r > 0.0 ? rng.exponential() / model.r : kInf;
    const double hit = hitting_time(rng, model.mu, y);
    if (hit < sigma) {
      d.tau = clock + hit;
      d.absorbed_first_cycle = first;
      if (!(d.tau <= max_time)) return std::nullopt;
      return d;
    }
    clock += sigma;
    if (!(clock <= max_time)) return std::nullopt;
    y = model.x_reset;
  }
}

std::optional<Draw> path_draw(rng::Stream& rng, const ResetModel& model, double x,
                              const SimConfig& config) {
  const double dt = config.dt;
  const double mu = model.mu;
  auto next_epoch = [&](double from) {
    return model.r > 0.0 ? from + rng.exponential() / model.r : kInf;
  };
  double t = 0.0;
  double y = x;
  double area = 0.0;
  double peak = x;
  double reset_at = next_epoch(0.0);
  while (t < config.max_time) {
    const bool lands_on_reset = reset_at - t <= dt;
    const double step = lands_on_reset ? reset_at - t : dt;
    const double next = y + mu * step + std::sqrt(step) * rng.normal();
    bool absorbed = next <= 0.0;
    if (!absorbed && config.bridge_correction) {
      const double exponent = 2.0 * y * next / step;
      // exp(-40) is below anything a 53-bit uniform can resolve against
      if (exponent < 40.0) absorbed = rng.uniform() < std::exp(-exponent);
    }
    if (absorbed) {
      Draw d;
      d.tau = t + 0.5 * step;
      d.area = area + 0.25 * y * step;
      d.max_displ = peak;
      return d;
    }
    area += 0.5 * (y + next) * step;
    peak = std::max(peak, next);
    if (config.bridge_maximum) {
      // P(bridge max > peak) = exp(-2 (peak - y)(peak - next) / step); when
      // that is not negligible, draw the bridge maximum by inversion.
      const double exponent = 2.0 * (peak - y) * (peak - next) / step;
      if (exponent < 40.0) {
        const double gap = next - y;
        const double top =
            0.5 * (y + next + std::sqrt(gap * gap - 2.0 * step * std::log(rng.uniform())));
        peak = std::max(peak, top);
      }
    }
    if (lands_on_reset) {
      t = reset_at;
      y = model.x_reset;
      peak = std::max(peak, y);
      reset_at = next_epoch(t);
    } else {
      t += step;
      y = next;
    }
  }
  return std::nullopt;
}

template <class Sampler>
SampleBatch run(Engine engine, const ResetModel& model, double x, const SimConfig& config,
                Sampler sampler) {
  const std::size_t n = config.n_samples;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(config.threads, n));
  std::vector<std::vector<std::optional<Draw>>> parts(workers);
  auto work = [&](unsigned w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    auto& out = parts[w];
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      rng::Stream rng(config.seed, config.first_index + i);
      out.push_back(sampler(rng));
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  SampleBatch batch;
  batch.engine = engine;
  batch.config = config;
  batch.model = model;
  batch.x = x;
  batch.tau.reserve(n);
  if (engine == Engine::Path) {
    batch.area.reserve(n);
    batch.max_displ.reserve(n);
  } else {
    batch.absorbed_first_cycle.reserve(n);
  }
  for (const auto& part : parts) {
    for (const auto& draw : part) {
      if (!draw) {
        ++batch.horizon_exceeded;
        continue;
      }
      batch.tau.push_back(draw->tau);
      if (engine == Engine::Path) {
        batch.area.push_back(draw->area);
        batch.max_displ.push_back(draw->max_displ);
      } else {
        batch.absorbed_first_cycle.push_back(draw->absorbed_first_cycle ? 1 : 0);
      }
    }
  }
  return batch;
}

void check_inputs(const ResetModel& model, double x, const SimConfig& config, Engine engine) {
  validate(model);
  validate_start(x);
  validate(config, engine);
  if (model.r == 0.0 && model.mu > 0.0) {
    throw Error(Errc::PositiveDriftNoReset, "tau is infinite with positive probability");
  }
}

double power(double v, int k) { return k == 1 ? v : v * v; }

}  // namespace

std::string_view to_string(Engine engine) {
  return engine == Engine::Exact ? "exact" : "path";
}

void validate(const SimConfig& config, Engine engine) {
  if (config.n_samples == 0) throw Error(Errc::InvalidArgument, "n_samples must be >= 1");
  if (config.threads == 0) throw Error(Errc::InvalidArgument, "threads must be >= 1");
  if (!(config.max_time > 0.0)) throw Error(Errc::InvalidArgument, "max_time must be > 0");
  if (engine == Engine::Path && !(config.dt > 0.0 && config.dt <= 0.1)) {
    throw Error(Errc::InvalidArgument, "dt must lie in (0, 0.1]");
  }
}

SampleBatch sample_fpt_exact(const ResetModel& model, double x, const SimConfig& config) {
  check_inputs(model, x, config, Engine::Exact);
  return run(Engine::Exact, model, x, config,
             [&](rng::Stream& rng) { return exact_draw(rng, model, x, config.max_time); });
}

SampleBatch sample_path(const ResetModel& model, double x, const SimConfig& config) {
  check_inputs(model, x, config, Engine::Path);
  return run(Engine::Path, model, x, config,
             [&](rng::Stream& rng) { return path_draw(rng, model, x, config); });
}

SampleBatch simulate(Engine engine, const ResetModel& model, double x, const SimConfig& config) {
  return engine == Engine::Exact ? sample_fpt_exact(model, x, config)
                                 : sample_path(model, x, config);
}

SampleBatch merge(const SampleBatch& a, const SampleBatch& b) {
  if (a.engine != b.engine || a.x != b.x || a.model.mu != b.model.mu || a.model.r != b.model.r ||
      a.model.x_reset != b.model.x_reset) {
    throw Error(Errc::InvalidArgument, "batches come from different experiments");
  }
  SampleBatch out = a;
  out.config.n_samples += b.config.n_samples;
  out.horizon_exceeded += b.horizon_exceeded;
  out.tau.insert(out.tau.end(), b.tau.begin(), b.tau.end());
  out.area.insert(out.area.end(), b.area.begin(), b.area.end());
  out.max_displ.insert(out.max_displ.end(), b.max_displ.begin(), b.max_displ.end());
  out.absorbed_first_cycle.insert(out.absorbed_first_cycle.end(), b.absorbed_first_cycle.begin(),
                                  b.absorbed_first_cycle.end());
  return out;
}

std::string to_string(const Functional& f) {
  switch (f.kind) {
    case Functional::Kind::MeanTau: return "mean_tau";
    case Functional::Kind::SecondTau: return "second_tau";
    case Functional::Kind::MeanArea: return "mean_area";
    case Functional::Kind::SecondArea: return "second_area";
    case Functional::Kind::Joint: return "joint";
    case Functional::Kind::LtTau: return "lt(" + std::to_string(f.parameter) + ")";
    case Functional::Kind::LtArea: return "lt_area(" + std::to_string(f.parameter) + ")";
    case Functional::Kind::CdfMax: return "cdf_max(" + std::to_string(f.parameter) + ")";
    case Functional::Kind::AbsorbedFirstCycle: return "absorbed_first_cycle";
  }
  return "unknown";
}

stats::SummaryStats estimate(const SampleBatch& batch, const Functional& f) {
  if (batch.size() == 0) throw Error(Errc::EmptySample, "batch holds no samples");
  using Kind = Functional::Kind;
  const bool needs_path = f.kind == Kind::MeanArea || f.kind == Kind::SecondArea ||
                          f.kind == Kind::Joint || f.kind == Kind::LtArea ||
                          f.kind == Kind::CdfMax;
  if (needs_path && batch.engine != Engine::Path) {
    throw Error(Errc::FunctionalUnavailable,
                to_string(f) + " needs area or maximum samples from the path engine");
  }
  if (f.kind == Kind::AbsorbedFirstCycle && batch.engine != Engine::Exact) {
    throw Error(Errc::FunctionalUnavailable, "first-cycle flags come from the exact engine");
  }
  std::vector<double> values(batch.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double tau = batch.tau[i];
    switch (f.kind) {
      case Kind::MeanTau: values[i] = tau; break;
      case Kind::SecondTau: values[i] = power(tau, 2); break;
      case Kind::MeanArea: values[i] = batch.area[i]; break;
      case Kind::SecondArea: values[i] = power(batch.area[i], 2); break;
      case Kind::Joint: values[i] = tau * batch.area[i]; break;
      case Kind::LtTau: values[i] = std::exp(-f.parameter * tau); break;
      case Kind::LtArea: values[i] = std::exp(-f.parameter * batch.area[i]); break;
      case Kind::CdfMax: values[i] = batch.max_displ[i] <= f.parameter ? 1.0 : 0.0; break;
      case Kind::AbsorbedFirstCycle: values[i] = batch.absorbed_first_cycle[i]; break;
    }
  }
  return stats::summarize(values);
}

stats::SummaryStats sample_correlation(const SampleBatch& batch) {
  if (batch.engine != Engine::Path) {
    throw Error(Errc::FunctionalUnavailable, "correlation needs area samples");
  }
  if (batch.size() < 3) throw Error(Errc::EmptySample, "correlation needs three or more samples");
  const auto n = static_cast<double>(batch.size());
  double mt = 0.0, ma = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    mt += batch.tau[i];
    ma += batch.area[i];
  }
  mt /= n;
  ma /= n;
  double stt = 0.0, saa = 0.0, sta = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double dt = batch.tau[i] - mt;
    const double da = batch.area[i] - ma;
    stt += dt * dt;
    saa += da * da;
    sta += dt * da;
  }
  if (stt == 0.0 || saa == 0.0) throw Error(Errc::DegenerateVariance, "constant sample");
  const double rho = sta / std::sqrt(stt * saa);
  return stats::from_estimate(rho, (1.0 - rho * rho) / std::sqrt(n), batch.size());
}

}  // namespace resetfp::mc

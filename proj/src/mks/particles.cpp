#include "mks/particles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "mks/errors.hpp"
#include "mks/rng.hpp"

namespace mks {

void SimParams::validate() const {
  mollifier.validate();
  cutoff.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be > 0");
  if (!(dt < t_end)) throw std::invalid_argument("dt must be smaller than t_end");
  if (!(mass >= 0.0) || !std::isfinite(mass)) throw std::invalid_argument("mass must be finite and >= 0");
  if (!(diffusion >= 0.0)) throw std::invalid_argument("diffusion must be >= 0");
  if (cut_radius < 0.0) throw std::invalid_argument("cut_radius must be >= 0");
  if (neighbor_mode == NeighborMode::cell_list && cut_radius > 0.0) {
    const double tail = MollifiedKernel(mollifier, kernel_scale).tail_bound(cut_radius);
    if (tail * mass * std::fabs(drift_scale) > kDriftTailTol)
      throw std::invalid_argument("cut_radius too small: kernel tail exceeds the drift tolerance");
  }
}

double SimParams::effective_cut_radius() const {
  if (cut_radius > 0.0) return cut_radius;
  const MollifiedKernel kernel(mollifier, kernel_scale);
  const double weight = std::max(mass * std::fabs(drift_scale), 1e-300);
  double r = mollifier.epsilon();
  while (kernel.tail_bound(r) * weight > kDriftTailTol) r *= 1.05;
  return r;
}

InitialDensity InitialDensity::gaussian(Vec2 mean, double sigma, double mass) {
  InitialDensity d;
  d.kind = Kind::gaussian;
  d.components = {{1.0, mean, sigma}};
  d.total_mass = mass;
  return d;
}

InitialDensity InitialDensity::mixture(std::vector<GaussianComponent> components, double mass) {
  InitialDensity d;
  d.kind = Kind::gaussian_mixture;
  d.components = std::move(components);
  d.total_mass = mass;
  return d;
}

InitialDensity InitialDensity::uniform_disk(Vec2 center, double radius, double mass) {
  InitialDensity d;
  d.kind = Kind::uniform_disk;
  d.center = center;
  d.radius = radius;
  d.total_mass = mass;
  return d;
}

void InitialDensity::validate() const {
  if (!(total_mass > 0.0) || !std::isfinite(total_mass)) throw std::invalid_argument("total_mass must be > 0");
  if (kind == Kind::uniform_disk) {
    if (!(radius > 0.0)) throw std::invalid_argument("disk radius must be > 0");
    return;
  }
  if (components.empty()) throw std::invalid_argument("gaussian density needs at least one component");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0)) throw std::invalid_argument("mixture weights must be positive");
    if (!(c.sigma > 0.0)) throw std::invalid_argument("component sigma must be > 0");
    total += c.weight;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw std::invalid_argument("mixture weights must sum to 1");
}

double InitialDensity::value(Vec2 x) const {
  if (kind == Kind::uniform_disk) {
    return (x - center).norm2() <= radius * radius ? total_mass / (std::numbers::pi * radius * radius) : 0.0;
  }
  double v = 0.0;
  for (const auto& c : components) {
    const double s2 = c.sigma * c.sigma;
    v += c.weight * std::exp(-(x - c.mean).norm2() / (2.0 * s2)) / (2.0 * std::numbers::pi * s2);
  }
  return total_mass * v;
}

double InitialDensity::max_scale() const {
  if (kind == Kind::uniform_disk) return radius;
  double s = 0.0;
  for (const auto& c : components) s = std::max(s, c.sigma);
  return s;
}

Vec2 InitialDensity::mean() const {
  if (kind == Kind::uniform_disk) return center;
  Vec2 m;
  for (const auto& c : components) m += c.weight * c.mean;
  return m;
}

ParticleState sample_initial(const InitialDensity& density, std::int64_t n, std::uint64_t seed) {
  density.validate();
  if (n < 1) throw std::invalid_argument("sample_initial: n must be >= 1");
  const Philox gen(substream_seed(seed, "particles.init"));
  ParticleState state;
  state.positions.resize(static_cast<std::size_t>(n));
  state.rng = {substream_seed(seed, "particles.noise"), 0};

  for (std::int64_t i = 0; i < n; ++i) {
    const auto stream = static_cast<std::uint64_t>(i);
    Vec2& p = state.positions[static_cast<std::size_t>(i)];
    switch (density.kind) {
      case InitialDensity::Kind::gaussian:
      case InitialDensity::Kind::gaussian_mixture: {
        std::size_t pick = 0;
        if (density.components.size() > 1) {
          const double u = uniform_pair(gen, stream, 0)[0];
          double acc = 0.0;
          pick = density.components.size() - 1;
          for (std::size_t c = 0; c < density.components.size(); ++c) {
            acc += density.components[c].weight;
            if (u <= acc) {
              pick = c;
              break;
            }
          }
        }
        const auto& comp = density.components[pick];
        const auto z = normal_pair(gen, stream, 1);
        p = comp.mean + comp.sigma * Vec2{z[0], z[1]};
        break;
      }
      case InitialDensity::Kind::uniform_disk: {
        constexpr std::uint64_t kMaxAttempts = 64;
        bool accepted = false;
        for (std::uint64_t attempt = 0; attempt < kMaxAttempts && !accepted; ++attempt) {
          const auto u = uniform_pair(gen, stream, attempt);
          const Vec2 q{2.0 * u[0] - 1.0, 2.0 * u[1] - 1.0};
          if (q.norm2() <= 1.0) {
            p = density.center + density.radius * q;
            accepted = true;
          }
        }
        if (!accepted) throw RuntimeFailure("uniform_disk rejection sampler exhausted its retries");
        break;
      }
    }
  }
  return state;
}

DriftEvaluator::DriftEvaluator(const SimParams& params) : params_(params), kernel_(params.mollifier, params.kernel_scale) {
  if (params_.neighbor_mode == NeighborMode::cell_list) {
    const double rc = params_.effective_cut_radius();
    cut_radius2_ = rc * rc;
  }
}

void DriftEvaluator::operator()(std::span<const Vec2> positions, std::span<Vec2> out) const {
  if (out.size() != positions.size()) throw std::invalid_argument("drift: output size mismatch");
  const auto n = static_cast<std::int64_t>(positions.size());
  const double weight = params_.drift_scale * params_.mass / static_cast<double>(n);
  if (weight == 0.0) {
    std::fill(out.begin(), out.end(), Vec2{});
    return;
  }
  const bool split = params_.neighbor_mode == NeighborMode::cell_list;
  const double far_coeff = params_.kernel_scale / std::numbers::pi;
  const Vec2* pos = positions.data();
  const MollifiedKernel& kernel = kernel_;
  const double rc2 = cut_radius2_;

#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const Vec2 xi = pos[i];
    double sx = 0.0;
    double sy = 0.0;
    for (std::int64_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const double dx = xi.x - pos[k].x;
      const double dy = xi.y - pos[k].y;
      const double r2 = dx * dx + dy * dy;
      const double f = (split && r2 >= rc2) ? far_coeff / r2 : kernel.radial_factor(r2);
      sx -= f * dx;
      sy -= f * dy;
    }
    out[static_cast<std::size_t>(i)] = cutoff(Vec2{weight * sx, weight * sy}, params_.cutoff);
  }
}

std::vector<Vec2> DriftEvaluator::operator()(std::span<const Vec2> positions) const {
  std::vector<Vec2> out(positions.size());
  (*this)(positions, out);
  return out;
}

std::vector<Vec2> drift(const ParticleState& state, const SimParams& params) {
  return DriftEvaluator(params)(state.positions);
}

void em_advance(ParticleState& state, std::span<const Vec2> drift, double dt, double diffusion) {
  if (drift.size() != state.positions.size()) throw std::invalid_argument("em_advance: drift size mismatch");
  const Philox gen(state.rng.key);
  const double noise = std::sqrt(2.0 * diffusion * dt);
  const std::uint64_t step = state.rng.step;
  const auto n = static_cast<std::int64_t>(state.positions.size());
  Vec2* pos = state.positions.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto z = normal_pair(gen, static_cast<std::uint64_t>(i), step);
    const Vec2 b = drift[static_cast<std::size_t>(i)];
    pos[i].x += b.x * dt + noise * z[0];
    pos[i].y += b.y * dt + noise * z[1];
  }
  state.rng.step = step + 1;
  state.t += dt;
}

ParticleState em_step(const ParticleState& state, const SimParams& params) {
  ParticleState next = state;
  const auto b = drift(state, params);
  em_advance(next, b, params.dt, params.diffusion);
  return next;
}

StepPlan plan_steps(double dt, double t_end, std::span<const double> observers) {
  if (!(dt > 0.0)) throw std::invalid_argument("plan_steps: dt must be > 0");
  for (std::size_t i = 0; i < observers.size(); ++i) {
    if (observers[i] < 0.0 || observers[i] > t_end)
      throw std::invalid_argument("observation times must lie in [0, t_end]");
    if (i > 0 && observers[i] < observers[i - 1]) throw std::invalid_argument("observation times must be sorted");
  }
  StepPlan plan;
  plan.boundaries.push_back(0.0);
  for (double t : observers)
    if (t > plan.boundaries.back()) plan.boundaries.push_back(t);
  if (t_end > plan.boundaries.back()) plan.boundaries.push_back(t_end);
  for (std::size_t g = 1; g < plan.boundaries.size(); ++g) {
    const double gap = plan.boundaries[g] - plan.boundaries[g - 1];
    const auto steps = static_cast<std::int64_t>(std::ceil(gap / dt * (1.0 - 1e-12)));
    plan.steps.push_back(std::max<std::int64_t>(steps, 1));
    plan.dts.push_back(gap / static_cast<double>(plan.steps.back()));
  }
  return plan;
}

Trajectory simulate(const SimParams& params, const InitialDensity& density, std::span<const double> observers,
                    const StepHooks& hooks) {
  params.validate();
  const auto start = std::chrono::steady_clock::now();
  const StepPlan plan = plan_steps(params.dt, params.t_end, observers);

  Trajectory traj;
  traj.n_particles = params.n_particles();
  traj.seed = params.seed;
  ParticleState state = sample_initial(density, params.n_particles(), params.seed);
  const DriftEvaluator evaluator(params);
  std::vector<Vec2> b(state.positions.size());

  std::size_t next_obs = 0;
  auto record = [&](double t) {
    while (next_obs < observers.size() && observers[next_obs] <= t) {
      traj.snapshots.push_back({t, state.positions});
      ++next_obs;
    }
  };
  record(0.0);

  for (std::size_t g = 0; g + 1 < plan.boundaries.size(); ++g) {
    const double t0 = plan.boundaries[g];
    const double gap_dt = plan.dts[g];
    traj.gap_dt.push_back(gap_dt);
    if (gap_dt != params.dt) {
      std::ostringstream note;
      note.precision(17);
      note << "gap [" << t0 << ", " << plan.boundaries[g + 1] << "]: dt " << params.dt << " -> " << gap_dt << " ("
           << plan.steps[g] << " steps)";
      traj.dt_adjustments.push_back(note.str());
    }
    for (std::int64_t s = 0; s < plan.steps[g]; ++s) {
      if (hooks.drift_override)
        hooks.drift_override(state, b);
      else
        evaluator(state.positions, b);
      if (hooks.on_step) hooks.on_step(state, b);
      double max_drift = 0.0;
      for (const Vec2& v : b) max_drift = std::max({max_drift, std::fabs(v.x), std::fabs(v.y)});
      traj.steps.push_back({state.t, gap_dt, max_drift});
      em_advance(state, b, gap_dt, params.diffusion);
      state.t = s + 1 == plan.steps[g] ? plan.boundaries[g + 1] : t0 + gap_dt * static_cast<double>(s + 1);
    }
    record(state.t);
  }
  traj.final_state = std::move(state);
  traj.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

}  // namespace mks

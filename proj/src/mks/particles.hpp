#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mks/kernel.hpp"
#include "mks/vec2.hpp"

namespace mks {

enum class NeighborMode { direct, cell_list };

/// Absolute per-component tolerance of the cell_list drift against direct.
inline constexpr double kDriftTailTol = 1e-12;

struct SimParams {
  MollifierSpec mollifier;  // carries alpha and N
  CutoffParams cutoff;
  double dt = 1e-2;
  double t_end = 1.0;
  std::uint64_t seed = 0;
  NeighborMode neighbor_mode = NeighborMode::direct;
  /// Near-field radius for cell_list; 0 derives it from kDriftTailTol.
  double cut_radius = 0.0;
  /// Total mass M multiplying the normalised interaction sum.
  double mass = 1.0;
  double kernel_scale = 1.0;
  /// Multiplier inside the cutoff; 0 switches the interaction off.
  double drift_scale = 1.0;
  /// Diffusion coefficient D in dX = b dt + sqrt(2 D) dW.
  double diffusion = 1.0;

  std::int64_t n_particles() const { return mollifier.n_particles; }
  void validate() const;
  /// cut_radius if set, otherwise the smallest radius whose kernel tail,
  /// summed with weight mass, stays below kDriftTailTol.
  double effective_cut_radius() const;
};

/// Opaque, reproducible generator state: the noise key and the number of
/// steps already drawn.
struct RngState {
  std::uint64_t key = 0;
  std::uint64_t step = 0;
  bool operator==(const RngState&) const = default;
};

struct ParticleState {
  std::vector<Vec2> positions;
  double t = 0.0;
  RngState rng;
};

struct GaussianComponent {
  double weight = 1.0;
  Vec2 mean;
  double sigma = 1.0;
};

struct InitialDensity {
  enum class Kind { gaussian, gaussian_mixture, uniform_disk };

  Kind kind = Kind::gaussian;
  std::vector<GaussianComponent> components;  // one entry for plain gaussian
  Vec2 center;                                // uniform_disk
  double radius = 1.0;                        // uniform_disk
  double total_mass = 1.0;

  static InitialDensity gaussian(Vec2 mean, double sigma, double mass);
  static InitialDensity mixture(std::vector<GaussianComponent> components, double mass);
  static InitialDensity uniform_disk(Vec2 center, double radius, double mass);

  void validate() const;
  /// rho_0(x) including the mass factor.
  double value(Vec2 x) const;
  /// Largest length scale (sigma or radius) for domain sizing.
  double max_scale() const;
  /// Centre of mass.
  Vec2 mean() const;
};

/// Draws n i.i.d. positions from rho_0 / M. The noise stream of the returned
/// state is keyed from the same seed.
ParticleState sample_initial(const InitialDensity& density, std::int64_t n, std::uint64_t seed);

/// Kernel-aware drift evaluator. Holds the mollified kernel so hot loops do
/// not rebuild it.
class DriftEvaluator {
 public:
  explicit DriftEvaluator(const SimParams& params);

  /// b_i = F_A(drift_scale * (M/N) sum_k K^N(X_i - X_k)), k = i excluded.
  void operator()(std::span<const Vec2> positions, std::span<Vec2> out) const;
  std::vector<Vec2> operator()(std::span<const Vec2> positions) const;

  const SimParams& params() const { return params_; }
  const MollifiedKernel& kernel() const { return kernel_; }

 private:
  SimParams params_;
  MollifiedKernel kernel_;
  double cut_radius2_ = 0.0;
};

std::vector<Vec2> drift(const ParticleState& state, const SimParams& params);

/// Euler-Maruyama update with a supplied drift:
/// X <- X + b dt + sqrt(2 D dt) xi, xi drawn from stream (step, particle).
void em_advance(ParticleState& state, std::span<const Vec2> drift, double dt, double diffusion);

ParticleState em_step(const ParticleState& state, const SimParams& params);

struct Snapshot {
  double t = 0.0;
  std::vector<Vec2> positions;
};

struct StepStats {
  double t = 0.0;
  double dt = 0.0;
  double max_abs_drift = 0.0;
};

/// Optional hooks for analyses that need the full step mesh. `on_step` sees
/// the state before each update together with the drift applied to it.
struct StepHooks {
  std::function<void(const ParticleState&, std::span<const Vec2>)> on_step;
  /// Replaces the interacting drift (used by the McKean oracle mode).
  std::function<void(const ParticleState&, std::span<Vec2>)> drift_override;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<StepStats> steps;
  std::vector<double> gap_dt;  // dt actually used between consecutive observers
  std::vector<std::string> dt_adjustments;
  double wall_seconds = 0.0;
  std::int64_t n_particles = 0;
  std::uint64_t seed = 0;
  ParticleState final_state;
};

/// Step plan: for each gap between sorted observation times (plus the
/// horizon) the largest dt' <= dt dividing the gap exactly.
struct StepPlan {
  std::vector<double> boundaries;  // 0, observers..., t_end (deduplicated)
  std::vector<std::int64_t> steps;
  std::vector<double> dts;
};
StepPlan plan_steps(double dt, double t_end, std::span<const double> observers);

Trajectory simulate(const SimParams& params, const InitialDensity& density, std::span<const double> observers,
                    const StepHooks& hooks = {});

}  // namespace mks

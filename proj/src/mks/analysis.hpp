#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mks/battery.hpp"
#include "mks/density.hpp"
#include "mks/grid.hpp"
#include "mks/particles.hpp"
#include "mks/pde.hpp"

namespace mks {

/// Sample mean, standard error and z-score against 0.
struct SampleStats {
  std::int64_t count = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  /// mean / stderr; 0 when both vanish, +-infinity when only stderr does.
  double z() const;
};
SampleStats sample_stats(std::span<const double> xs);

// ---------------------------------------------------------------------------
// Ito residual

struct ItoFunctionResult {
  std::string name;
  SampleStats stats;
};

struct ItoResidualResult {
  std::vector<ItoFunctionResult> functions;
  std::int64_t replicas = 0;
  /// Largest admissible |z|.
  double z_threshold = 4.0;
  /// residuals[f][r]
  std::vector<std::vector<double>> residuals;
  bool passed() const;
};

/// Residual of the Ito identity for g^N = V^N * S^N along each replica:
/// R(phi) = <g_T, phi> - <g_0, phi> - int <S_s, grad(V^N * phi) . b_s> ds
///          - D int <g_s, lap phi> ds,
/// with trapezoidal time quadrature on the step mesh and b_s the drift the
/// integrator applied. Pairings with g^N are evaluated exactly at particle
/// positions through V^N * phi (gaussian mollifier only). Replica r uses
/// seed child_seed(params.seed, r).
ItoResidualResult ito_residual_test(const SimParams& params, const InitialDensity& density,
                                    std::span<const TestFunction> battery, std::int64_t replicas);

// ---------------------------------------------------------------------------
// Functional inequalities

/// Real field with random gaussian Fourier coefficients on the modes
/// 1 <= max(|m1|, |m2|) <= band; zero mean.
Field random_bandlimited_field(const GridSpec& grid, int band, std::uint64_t seed);

/// ||grad grad G * f||_p / ||f||_p with the pointwise Frobenius norm; the
/// multiplier is -xi xi^T s / |xi|^2, s = 2 kernel_scale.
double cz_ratio(const Field& f, double p, double kernel_scale = 1.0);

struct CzResult {
  double p = 2.0;
  std::int64_t trials = 0;
  int band = 0;
  double max_ratio = 0.0;
  /// Exact L2 constant: sup of the multiplier norm, s.
  double l2_constant = 0.0;
};
CzResult cz_inequality_test(double p, std::int64_t trials, const GridSpec& grid, int band, std::uint64_t seed,
                            double kernel_scale = 1.0);

/// Holder seminorm max |u(x) - u(y)| / |x - y|^eta over all node pairs whose
/// offset is in `lags` and which both lie in the grid (no wrap).
double holder_seminorm(const VectorField& u, double eta, std::span<const std::pair<int, int>> lags);

/// `count` distinct random node offsets with 1 <= |offset| <= max_offset.
std::vector<std::pair<int, int>> random_lags(int count, int max_offset, std::uint64_t seed);

struct MorreyResult {
  double p = 4.0;
  double eta = 0.5;
  std::int64_t trials = 0;
  int lags = 0;
  double max_ratio = 0.0;
};
/// Ratio [grad G * f]_eta / ||f||_p, eta = 1 - 2/p, over localized random
/// fields; grad G * f by free-space convolution.
MorreyResult morrey_holder_test(double p, std::int64_t trials, const GridSpec& grid, int lags, std::uint64_t seed,
                                double kernel_scale = 1.0);

/// ||u||_3^{3/2} / (1.5 ||u||_1^{1/2} ||grad u||_2); the inequality holds
/// when the ratio is <= 1.
double nash_ratio(const Field& u);

struct NashResult {
  std::int64_t trials = 0;
  double max_ratio = 0.0;
  std::int64_t violations = 0;
};
/// Random positive fields: mixtures of one to four anisotropic gaussians.
NashResult nash_inequality_test(std::int64_t trials, const GridSpec& grid, std::uint64_t seed);

/// ||grad G * rho||_inf / (||rho||_1^{1/4} ||rho||_3^{3/4}).
double gradc_bound_ratio(const Field& rho, PoissonMode mode, double kernel_scale = 1.0);

/// Largest gradc_bound_ratio over unit-mass gaussians with aspect ratios
/// 1..max_aspect, resolved on `grid`.
double gradc_bound_constant(const GridSpec& grid, double max_aspect = 4.0, double kernel_scale = 1.0);

// ---------------------------------------------------------------------------
// Moment monitor

struct MomentSeries {
  std::vector<double> times;
  /// h_norm(g_t, beta)
  std::vector<double> norms;
  /// h_norm(g_t, beta)^p
  std::vector<double> powered;
  /// Discrete Sobolev-Slobodeckij seminorm of t -> g_t in H^{-2}:
  /// ( sum_{i != j} ||g_i - g_j||^q / |t_i - t_j|^{1 + eta q} dt^2 )^{1/q}.
  double increment_seminorm = 0.0;
  double eta = 0.25;
  double q = 2.0;
  double max_norm() const;
};

MomentSeries moment_monitor(std::span<const Field> fields, std::span<const double> times, double beta, double p,
                            double eta = 0.25, double q = 2.0);

MomentSeries moment_monitor(std::span<const Snapshot> snapshots, const MollifierSpec& spec, const GridSpec& grid,
                            double mass, double beta, double p, double eta = 0.25, double q = 2.0);

// ---------------------------------------------------------------------------
// Convergence study

struct ConvergenceConfig {
  std::vector<std::int64_t> n_ladder{500, 2000, 8000};
  std::int64_t replicas = 8;
  double alpha = 0.15;
  double beta = 1.5;
  double gamma = 1.1;
  double local_radius = 3.0;
  double mass = 4.0 * 3.141592653589793;
  /// A = (1 + margin) A0_estimate.
  double cutoff_margin = 0.1;
  ProfileKind profile = ProfileKind::gaussian;
  double mollifier_width = 1.0;
  InitialDensity density = InitialDensity::gaussian({0.0, 0.0}, 1.0, 4.0 * 3.141592653589793);
  GridSpec grid{12.0, 256};
  double particle_dt = 0.01;
  double pde_dt = 0.002;
  double t_end = 0.25;
  /// Uniform observer mesh: n_observers + 1 times from 0 to t_end.
  int n_observers = 5;
  NeighborMode neighbor_mode = NeighborMode::direct;
  DepositMethod deposit = DepositMethod::direct;
  double kernel_scale = 1.0;
  double diffusion = 1.0;
  std::uint64_t seed = 0;
  /// Diagnostic mode: particles driven by the PDE drift F_A(grad G * rho_t)
  /// instead of the interaction.
  bool mckean_oracle = false;

  void validate() const;
  std::vector<double> observer_times() const;
};

struct RungStats {
  std::int64_t n = 0;
  std::int64_t replicas = 0;
  /// sup_t h_local_norm(g_t - rho_t, gamma, R)
  SampleStats local_error;
  /// RMS over the battery of |int_0^T <g_t - rho_t, phi>_{H^beta} dt|
  SampleStats weak_error;
  std::vector<SampleStats> weak_per_function;
  /// max_t h_norm(g_t, beta)
  SampleStats moment_max;
  /// max_t h_norm(V^N * rho_t, beta): the deterministic value moment_max
  /// tends to as the fluctuations vanish.
  double moment_reference = 0.0;
  /// h_norm(g_0, beta)
  SampleStats initial_moment;
  /// RMS over the battery of |<g_0 - rho_0, phi>_{H^beta}|
  SampleStats initial_weak_error;
  std::int64_t truncated_snapshots = 0;
};

struct ConvergenceReport {
  std::vector<RungStats> rungs;
  std::vector<std::string> battery;
  std::vector<double> observer_times;
  double a0_estimate = 0.0;
  double cutoff_level = 0.0;
  /// max_t h_norm(rho_t, beta) of the reference solution.
  double limit_moment_max = 0.0;
  bool mckean_oracle = false;
  std::vector<std::string> warnings;
};

/// Mean of rung k+1 <= mean of rung k + sqrt(se_k^2 + se_{k+1}^2) for every k.
bool decreases_within_stderr(std::span<const SampleStats> series, double stderr_units = 1.0);
/// No rung exceeds the first by more than `stderr_units` combined stderr.
bool no_systematic_growth(std::span<const SampleStats> series, double stderr_units = 2.0);

struct MomentGrowthCheck {
  /// moment_max scaled by each rung's moment_reference.
  std::vector<SampleStats> ratios;
  /// no_systematic_growth on the raw moment_max series.
  bool raw_no_growth = false;
  /// no_systematic_growth on the ratios.
  bool ratio_no_growth = false;
  /// Every rung mean within 2 stderr of limit_moment_max or below it.
  bool bounded = false;
  bool passed() const { return ratio_no_growth && bounded; }
};
MomentGrowthCheck moment_growth_check(const ConvergenceReport& report, double stderr_units = 2.0);

/// Periodic convolution V^N * field.
Field mollify(const Field& field, const MollifierSpec& spec);

/// Solves the reference PDE once, then simulates every (rung, replica) pair
/// and compares g^N with rho at the observer times. Replicas run in parallel
/// and are aggregated in fixed order.
ConvergenceReport convergence_study(const ConvergenceConfig& config);

}  // namespace mks

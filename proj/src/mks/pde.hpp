#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mks/grid.hpp"
#include "mks/kernel.hpp"

namespace mks {

enum class PoissonMode { torus_spectral, free_space_padded };

struct PdeConfig {
  GridSpec grid;
  double dt = 1e-3;
  double t_end = 1.0;
  /// Absent: original equation. Present: drift passed through F_A.
  std::optional<CutoffParams> cutoff;
  PoissonMode poisson_mode = PoissonMode::torus_spectral;
  bool dealias = true;
  double blowup_linf_threshold = 1e6;
  std::vector<double> observers;
  double kernel_scale = 1.0;
  /// false zeroes the chemotactic velocity (pure heat flow).
  bool interaction = true;
  double cfl = 0.5;
  /// Relative mass drift that counts as a mass violation.
  double mass_tol = 1e-6;
  /// CFL-limited dt below this fraction of dt counts as collapse.
  double cfl_collapse_fraction = 1e-3;
  /// h^2 ||rho||_inf / M above this fraction means the density has
  /// concentrated below grid resolution.
  double grid_collapse_fraction = 0.05;

  void validate() const;
};

struct PdeState {
  Field rho;
  double t = 0.0;
};

enum class BlowupTrigger { none, linf_threshold, nan, mass_violation, cfl_collapse, grid_collapse };
const char* to_string(BlowupTrigger t);

struct BlowupReport {
  bool blew_up = false;
  std::optional<double> t_detected;
  BlowupTrigger trigger = BlowupTrigger::none;
  std::vector<std::pair<double, double>> peak_linf_history;  // (t, ||rho_t||_inf)
};

struct VectorField {
  Field x;
  Field y;
  /// Largest Euclidean norm over the grid.
  double max_norm() const;
};

/// Fourier multiplier exp(-|xi|^2 tau); the zero mode is untouched.
Field heat_propagate(const Field& field, double tau);

/// grad c = grad G * rho (times kernel_scale).
VectorField chemo_grad(const Field& rho, PoissonMode mode, double kernel_scale = 1.0);

/// 2/3-rule mask in place on a spectrum.
void dealias_two_thirds(SpectralField& s);

/// div(rho u) with u = F_A(chemo_grad(rho)) or the raw chemo_grad.
Field flux_divergence(const Field& rho, const std::optional<CutoffParams>& cutoff, PoissonMode mode,
                      double kernel_scale = 1.0, bool dealias = true);

struct StepOutcome {
  PdeState state;
  double dt = 0.0;
  double max_velocity = 0.0;  // max |grad c| at the start of the step
};

/// One Strang step: half heat, explicit midpoint transport, half heat.
/// dt = min(dt_max, config.dt, cfl h / max|u|).
StepOutcome step(const PdeState& state, const PdeConfig& config, double dt_max);

struct PdeDiagnostics {
  double initial_mass = 0.0;
  double max_relative_mass_drift = 0.0;
  /// min over steps of min(rho) / max(rho).
  double min_positivity_ratio = 0.0;
  double boundary_mass_initial = 0.0;
  double boundary_mass_final = 0.0;
  std::int64_t steps = 0;
  double min_dt = 0.0;
  double max_chemo_grad = 0.0;
  std::vector<std::string> warnings;
};

struct PdeSolution {
  std::vector<PdeState> snapshots;
  BlowupReport blowup;
  /// sup over every visited step of ||grad G * rho_t||_inf.
  double a0_estimate = 0.0;
  PdeDiagnostics diagnostics;
};

/// Integrates to t_end or until a blow-up trigger fires; blow-up is reported,
/// never thrown.
PdeSolution solve(const PdeConfig& config, const Field& rho0);

}  // namespace mks

#include "mks/pde.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "mks/density.hpp"
#include "mks/fft.hpp"

namespace mks {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

/// Half spectrum of a real n x n field: n rows by n/2 + 1 columns.
struct Half {
  GridSpec grid;
  std::vector<cplx> c;

  int cols() const { return grid.n / 2 + 1; }
  cplx& operator()(int j, int k) { return c[static_cast<std::size_t>(j) * cols() + k]; }
  const cplx& operator()(int j, int k) const { return c[static_cast<std::size_t>(j) * cols() + k]; }
};

Half to_half(const Field& f) {
  Half h{f.grid, std::vector<cplx>(static_cast<std::size_t>(f.grid.n) * (f.grid.n / 2 + 1))};
  fft::forward_real_2d(f.grid.n, f.values, h.c);
  return h;
}

Field from_half(const Half& h) {
  Field f(h.grid);
  fft::inverse_real_2d(h.grid.n, h.c, f.values);
  const double scale = 1.0 / static_cast<double>(h.grid.size());
  for (double& v : f.values) v *= scale;
  return f;
}

/// Derivative wavenumber: zero on the Nyquist index so that i xi keeps real
/// fields real.
double deriv_wavenumber(const GridSpec& g, int j) { return j == g.n / 2 ? 0.0 : g.wavenumber(j); }

std::vector<double> heat_factors(const GridSpec& g, double tau, int count) {
  std::vector<double> f(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const double k = g.wavenumber(j);
    f[static_cast<std::size_t>(j)] = std::exp(-k * k * tau);
  }
  return f;
}

void apply_heat(Half& s, double tau) {
  if (tau == 0.0) return;
  const auto rows = heat_factors(s.grid, tau, s.grid.n);
  const auto cols = heat_factors(s.grid, tau, s.cols());
  for (int j = 0; j < s.grid.n; ++j)
    for (int k = 0; k < s.cols(); ++k) s(j, k) *= rows[static_cast<std::size_t>(j)] * cols[static_cast<std::size_t>(k)];
}

void dealias_half(Half& s) {
  const int cut = s.grid.n / 3;
  for (int j = 0; j < s.grid.n; ++j) {
    const bool row_out = std::abs(s.grid.mode(j)) > cut;
    for (int k = 0; k < s.cols(); ++k)
      if (row_out || k > cut) s(j, k) = 0.0;
  }
}

Half padded_kernel_spectrum(const GridSpec& grid, double kernel_scale, int component) {
  const int n = grid.n;
  const int p = 2 * n;
  const double h = grid.h();
  GridSpec padded{2.0 * grid.half_extent, p};
  Field k(padded);
  for (int a = 0; a < p; ++a) {
    const int da = a < n ? a : a - p;
    for (int b = 0; b < p; ++b) {
      const int db = b < n ? b : b - p;
      if (da == 0 && db == 0) continue;  // odd kernel: origin cell contributes 0
      const Vec2 g = grad_green({da * h, db * h}, kernel_scale);
      k(a, b) = h * h * (component == 0 ? g.x : g.y);
    }
  }
  return to_half(k);
}

const Half& cached_kernel(const GridSpec& grid, double kernel_scale, int component) {
  thread_local std::map<std::tuple<int, double, double, int>, Half> cache;
  const auto key = std::make_tuple(grid.n, grid.half_extent, kernel_scale, component);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, padded_kernel_spectrum(grid, kernel_scale, component)).first;
  return it->second;
}

VectorField chemo_grad_padded(const Field& rho, double kernel_scale) {
  const GridSpec& g = rho.grid;
  const int n = g.n;
  const int p = 2 * n;
  Field padded(GridSpec{2.0 * g.half_extent, p});
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) padded(j, k) = rho(j, k);
  const Half rho_hat = to_half(padded);

  VectorField out{Field(g), Field(g)};
  Half prod = rho_hat;
  for (int c = 0; c < 2; ++c) {
    const Half& kh = cached_kernel(g, kernel_scale, c);
    for (std::size_t i = 0; i < prod.c.size(); ++i) prod.c[i] = rho_hat.c[i] * kh.c[i];
    const Field back = from_half(prod);
    Field& dst = c == 0 ? out.x : out.y;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) dst(j, k) = back(j, k);
  }
  return out;
}

VectorField chemo_grad_torus(const Half& rho_hat, double kernel_scale) {
  const GridSpec& g = rho_hat.grid;
  const double s = 2.0 * kernel_scale;
  Half gx = rho_hat;
  Half gy = rho_hat;
  for (int j = 0; j < g.n; ++j) {
    const double kx = g.wavenumber(j);
    const double dx = deriv_wavenumber(g, j);
    for (int k = 0; k < rho_hat.cols(); ++k) {
      const double ky = g.wavenumber(k);
      const double dy = deriv_wavenumber(g, k);
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) {
        gx(j, k) = gy(j, k) = 0.0;
        continue;
      }
      const cplx base = rho_hat(j, k) * (s / k2);
      gx(j, k) = kI * dx * base;
      gy(j, k) = kI * dy * base;
    }
  }
  return {from_half(gx), from_half(gy)};
}

VectorField grad_of(const Field& rho, const Half& rho_hat, PoissonMode mode, double kernel_scale) {
  if (mode == PoissonMode::free_space_padded) return chemo_grad_padded(rho, kernel_scale);
  return chemo_grad_torus(rho_hat, kernel_scale);
}

/// Spectrum of div(rho u), zero mode exactly 0.
Half flux_hat(const Field& rho, const Half& rho_hat, const std::optional<CutoffParams>& cutoff, PoissonMode mode,
              double kernel_scale, bool dealias) {
  VectorField u = grad_of(rho, rho_hat, mode, kernel_scale);
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    double vx = u.x.values[i];
    double vy = u.y.values[i];
    if (cutoff) {
      vx = f_a(vx, *cutoff);
      vy = f_a(vy, *cutoff);
    }
    u.x.values[i] = rho.values[i] * vx;
    u.y.values[i] = rho.values[i] * vy;
  }
  Half ax = to_half(u.x);
  const Half ay = to_half(u.y);
  const GridSpec& g = rho.grid;
  for (int j = 0; j < g.n; ++j) {
    const double dx = deriv_wavenumber(g, j);
    for (int k = 0; k < ax.cols(); ++k) ax(j, k) = kI * (dx * ax(j, k) + deriv_wavenumber(g, k) * ay(j, k));
  }
  ax(0, 0) = 0.0;
  if (dealias) dealias_half(ax);
  return ax;
}

}  // namespace

const char* to_string(BlowupTrigger t) {
  switch (t) {
    case BlowupTrigger::none: return "none";
    case BlowupTrigger::linf_threshold: return "linf_threshold";
    case BlowupTrigger::nan: return "nan";
    case BlowupTrigger::mass_violation: return "mass_violation";
    case BlowupTrigger::cfl_collapse: return "cfl_collapse";
    case BlowupTrigger::grid_collapse: return "grid_collapse";
  }
  return "unknown";
}

void PdeConfig::validate() const {
  grid.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("pde dt must be > 0");
  if (!(t_end > 0.0)) throw std::invalid_argument("pde t_end must be > 0");
  if (cutoff) cutoff->validate();
  if (!(blowup_linf_threshold > 0.0)) throw std::invalid_argument("blowup_linf_threshold must be > 0");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("cfl must lie in (0, 1]");
  for (std::size_t i = 0; i < observers.size(); ++i) {
    if (observers[i] < 0.0 || observers[i] > t_end) throw std::invalid_argument("pde observers must lie in [0, t_end]");
    if (i > 0 && observers[i] < observers[i - 1]) throw std::invalid_argument("pde observers must be sorted");
  }
}

double VectorField::max_norm() const {
  double m = 0.0;
  for (std::size_t i = 0; i < x.values.size(); ++i) m = std::max(m, std::hypot(x.values[i], y.values[i]));
  return m;
}

Field heat_propagate(const Field& field, double tau) {
  if (tau < 0.0) throw std::invalid_argument("heat_propagate: tau must be >= 0");
  if (tau == 0.0) return field;
  Half s = to_half(field);
  apply_heat(s, tau);
  return from_half(s);
}

VectorField chemo_grad(const Field& rho, PoissonMode mode, double kernel_scale) {
  if (mode == PoissonMode::free_space_padded) return chemo_grad_padded(rho, kernel_scale);
  return chemo_grad_torus(to_half(rho), kernel_scale);
}

void dealias_two_thirds(SpectralField& s) {
  const int n = s.grid.n;
  const int cut = n / 3;
  for (int j = 0; j < n; ++j) {
    const bool row_out = std::abs(s.grid.mode(j)) > cut;
    for (int k = 0; k < n; ++k)
      if (row_out || std::abs(s.grid.mode(k)) > cut) s(j, k) = 0.0;
  }
}

Field flux_divergence(const Field& rho, const std::optional<CutoffParams>& cutoff, PoissonMode mode,
                      double kernel_scale, bool dealias) {
  const Half rho_hat = mode == PoissonMode::torus_spectral ? to_half(rho) : Half{rho.grid, {}};
  return from_half(flux_hat(rho, rho_hat, cutoff, mode, kernel_scale, dealias));
}

StepOutcome step(const PdeState& state, const PdeConfig& config, double dt_max) {
  const Field& rho = state.rho;
  const double h = rho.grid.h();
  const Half rho_hat = to_half(rho);
  StepOutcome out;
  double speed = 0.0;
  if (config.interaction) {
    const VectorField u = grad_of(rho, rho_hat, config.poisson_mode, config.kernel_scale);
    out.max_velocity = u.max_norm();
    if (config.cutoff) {
      for (std::size_t i = 0; i < u.x.values.size(); ++i)
        speed = std::max(speed, std::hypot(f_a(u.x.values[i], *config.cutoff), f_a(u.y.values[i], *config.cutoff)));
    } else {
      speed = out.max_velocity;
    }
  }
  double dt = std::min(config.dt, dt_max);
  if (speed > 0.0) dt = std::min(dt, config.cfl * h / speed);
  out.dt = dt;

  Half r1 = rho_hat;
  apply_heat(r1, 0.5 * dt);
  if (config.interaction) {
    const auto transport = [&](const Field& f, const Half& f_hat) {
      return flux_hat(f, f_hat, config.cutoff, config.poisson_mode, config.kernel_scale, config.dealias);
    };
    const Half d1 = transport(from_half(r1), r1);
    Half mid = r1;
    for (std::size_t i = 0; i < mid.c.size(); ++i) mid.c[i] -= 0.5 * dt * d1.c[i];
    const Half d2 = transport(from_half(mid), mid);
    for (std::size_t i = 0; i < r1.c.size(); ++i) r1.c[i] -= dt * d2.c[i];
  }
  apply_heat(r1, 0.5 * dt);
  out.state.rho = from_half(r1);
  out.state.t = state.t + dt;
  return out;
}

PdeSolution solve(const PdeConfig& config, const Field& rho0) {
  config.validate();
  if (!(rho0.grid == config.grid)) throw std::invalid_argument("solve: initial field grid differs from config grid");
  if (!rho0.finite()) throw std::invalid_argument("solve: initial field is not finite");
  if (rho0.min() < 0.0) throw std::invalid_argument("solve: initial density must be non-negative");

  PdeSolution sol;
  PdeDiagnostics& diag = sol.diagnostics;
  PdeState state{rho0, 0.0};
  const double mass0 = rho0.integral();
  if (!(mass0 > 0.0)) throw std::invalid_argument("solve: initial mass must be positive");
  diag.initial_mass = mass0;
  diag.min_positivity_ratio = rho0.min() / rho0.max();
  diag.min_dt = config.dt;
  const double edge = std::min(0.1 * config.grid.half_extent, 10.0 * config.grid.h());
  diag.boundary_mass_initial = boundary_mass(rho0, edge) / mass0;
  sol.blowup.peak_linf_history.emplace_back(0.0, rho0.max_abs());

  std::size_t next_obs = 0;
  auto record = [&] {
    while (next_obs < config.observers.size() && config.observers[next_obs] <= state.t) {
      sol.snapshots.push_back(state);
      ++next_obs;
    }
  };
  record();

  const double cell = config.grid.cell_area();
  const double t_tol = 1e-12 * std::max(1.0, config.t_end);
  auto fire = [&](BlowupTrigger trigger, double t) {
    sol.blowup.blew_up = true;
    sol.blowup.trigger = trigger;
    sol.blowup.t_detected = t;
  };

  while (state.t < config.t_end - t_tol) {
    double boundary = config.t_end;
    if (next_obs < config.observers.size()) boundary = std::min(boundary, config.observers[next_obs]);
    StepOutcome out = step(state, config, boundary - state.t);
    if (boundary - out.state.t <= t_tol) out.state.t = boundary;
    sol.a0_estimate = std::max(sol.a0_estimate, out.max_velocity);
    diag.max_chemo_grad = sol.a0_estimate;
    ++diag.steps;

    const bool cfl_limited = out.dt < std::min(config.dt, boundary - state.t);
    if (cfl_limited) diag.min_dt = std::min(diag.min_dt, out.dt);

    const Field& rho = out.state.rho;
    if (!rho.finite()) {
      fire(BlowupTrigger::nan, out.state.t);
      break;
    }
    const double peak = rho.max_abs();
    sol.blowup.peak_linf_history.emplace_back(out.state.t, peak);
    const double drift = std::fabs(rho.integral() - mass0) / mass0;
    diag.max_relative_mass_drift = std::max(diag.max_relative_mass_drift, drift);
    diag.min_positivity_ratio = std::min(diag.min_positivity_ratio, rho.min() / rho.max());

    if (peak > config.blowup_linf_threshold) {
      fire(BlowupTrigger::linf_threshold, out.state.t);
      break;
    }
    if (drift > config.mass_tol) {
      fire(BlowupTrigger::mass_violation, out.state.t);
      break;
    }
    if (cell * peak > config.grid_collapse_fraction * mass0) {
      fire(BlowupTrigger::grid_collapse, out.state.t);
      break;
    }
    if (cfl_limited && out.dt < config.cfl_collapse_fraction * config.dt) {
      fire(BlowupTrigger::cfl_collapse, out.state.t);
      break;
    }
    state = std::move(out.state);
    record();
  }
  diag.boundary_mass_final = boundary_mass(state.rho, edge) / mass0;
  if (diag.boundary_mass_initial > 1e-8)
    diag.warnings.push_back("initial mass near the domain boundary exceeds 1e-8; torus truncation is visible");
  return sol;
}

}  // namespace mks

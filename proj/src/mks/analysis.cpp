#include "mks/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include "mks/errors.hpp"
#include "mks/rng.hpp"

namespace mks {

namespace {

constexpr double kPi = std::numbers::pi;

/// Battery function with its derivative factors expanded once.
struct PreparedFunction {
  double weight;
  Vec2 center;
  GaussPoly fx, dfx, ddfx, fy, dfy, ddfy;

  explicit PreparedFunction(const TestFunction& f)
      : weight(f.weight),
        center(f.center),
        fx(f.fx),
        dfx(f.fx.derivative()),
        ddfx(dfx.derivative()),
        fy(f.fy),
        dfy(f.fy.derivative()),
        ddfy(dfy.derivative()) {}

  double value(Vec2 x) const { return weight * fx(x.x - center.x) * fy(x.y - center.y); }

  /// grad . b + D lap at x.
  double generator(Vec2 x, Vec2 b, double diffusion) const {
    const double u = x.x - center.x;
    const double v = x.y - center.y;
    const double px = fx(u), py = fy(v);
    const double gx = dfx(u) * py;
    const double gy = px * dfy(v);
    const double lap = ddfx(u) * py + px * ddfy(v);
    return weight * (gx * b.x + gy * b.y + diffusion * lap);
  }
};

Field gradient_magnitude_sq(const Field& u) {
  SpectralField s = forward(u);
  SpectralField sy = s;
  const GridSpec& g = u.grid;
  const std::complex<double> i{0.0, 1.0};
  for (int j = 0; j < g.n; ++j)
    for (int k = 0; k < g.n; ++k) {
      s(j, k) *= i * g.wavenumber(j);
      sy(j, k) *= i * g.wavenumber(k);
    }
  const Field dx = inverse(s);
  const Field dy = inverse(sy);
  Field out(g);
  for (std::size_t m = 0; m < out.values.size(); ++m)
    out.values[m] = dx.values[m] * dx.values[m] + dy.values[m] * dy.values[m];
  return out;
}

/// Bilinear periodic interpolation of a grid field at x.
double interpolate(const Field& f, Vec2 x) {
  const GridSpec& g = f.grid;
  const double h = g.h();
  const double a = (x.x + g.half_extent) / h;
  const double b = (x.y + g.half_extent) / h;
  const double fa = std::floor(a);
  const double fb = std::floor(b);
  const double ta = a - fa;
  const double tb = b - fb;
  const auto wrap = [n = g.n](double v) {
    const auto m = static_cast<long long>(v) % n;
    return static_cast<int>(m < 0 ? m + n : m);
  };
  const int j0 = wrap(fa), j1 = wrap(fa + 1.0);
  const int k0 = wrap(fb), k1 = wrap(fb + 1.0);
  return (1.0 - ta) * ((1.0 - tb) * f(j0, k0) + tb * f(j0, k1)) + ta * ((1.0 - tb) * f(j1, k0) + tb * f(j1, k1));
}

double trapezoid(std::span<const double> t, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) sum += 0.5 * (y[i - 1] + y[i]) * (t[i] - t[i - 1]);
  return sum;
}

double rms(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x * x;
  return xs.empty() ? 0.0 : std::sqrt(s / static_cast<double>(xs.size()));
}

}  // namespace

double SampleStats::z() const {
  if (stderr_ > 0.0) return mean / stderr_;
  if (mean == 0.0) return 0.0;
  return mean > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

SampleStats sample_stats(std::span<const double> xs) {
  SampleStats s;
  s.count = static_cast<std::int64_t>(xs.size());
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    s.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
  }
  return s;
}

// ---------------------------------------------------------------------------

bool ItoResidualResult::passed() const {
  for (const auto& f : functions)
    if (!(std::fabs(f.stats.z()) <= z_threshold)) return false;
  return true;
}

ItoResidualResult ito_residual_test(const SimParams& params, const InitialDensity& density,
                                    std::span<const TestFunction> battery, std::int64_t replicas) {
  params.validate();
  density.validate();
  if (params.mollifier.profile != ProfileKind::gaussian)
    throw std::invalid_argument("ito_residual_test: requires the gaussian mollifier");
  if (replicas < 2) throw std::invalid_argument("ito_residual_test: replicas must be >= 2");
  const double eps = params.mollifier.epsilon();
  std::vector<PreparedFunction> fns;
  for (const TestFunction& f : battery) fns.emplace_back(f.smoothed(eps));
  const std::size_t nf = fns.size();

  ItoResidualResult result;
  result.replicas = replicas;
  result.residuals.assign(nf, std::vector<double>(static_cast<std::size_t>(replicas)));

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t r = 0; r < replicas; ++r) {
    SimParams p = params;
    p.seed = child_seed(params.seed, static_cast<std::uint64_t>(r));
    const double w = p.mass / static_cast<double>(p.n_particles());

    std::vector<double> first(nf, 0.0), integral(nf, 0.0), prev(nf, 0.0), cur(nf, 0.0);
    double prev_t = 0.0;
    bool started = false;
    const auto integrand = [&](std::span<const Vec2> x, std::span<const Vec2> b, std::vector<double>& out) {
      for (std::size_t f = 0; f < nf; ++f) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += fns[f].generator(x[i], b[i], p.diffusion);
        out[f] = w * s;
      }
    };
    const auto accumulate = [&](double t) {
      for (std::size_t f = 0; f < nf; ++f) integral[f] += 0.5 * (prev[f] + cur[f]) * (t - prev_t);
    };

    StepHooks hooks;
    hooks.on_step = [&](const ParticleState& state, std::span<const Vec2> b) {
      integrand(state.positions, b, cur);
      if (!started) {
        for (std::size_t f = 0; f < nf; ++f) {
          double s = 0.0;
          for (const Vec2& x : state.positions) s += fns[f].value(x);
          first[f] = w * s;
        }
        started = true;
      } else {
        accumulate(state.t);
      }
      prev = cur;
      prev_t = state.t;
    };
    const Trajectory traj = simulate(p, density, {}, hooks);
    const auto& xs = traj.final_state.positions;
    const std::vector<Vec2> b = DriftEvaluator(p)(xs);
    integrand(xs, b, cur);
    accumulate(traj.final_state.t);
    for (std::size_t f = 0; f < nf; ++f) {
      double s = 0.0;
      for (const Vec2& x : xs) s += fns[f].value(x);
      result.residuals[f][static_cast<std::size_t>(r)] = w * s - first[f] - integral[f];
    }
  }

  for (std::size_t f = 0; f < nf; ++f)
    result.functions.push_back({battery[f].name, sample_stats(result.residuals[f])});
  return result;
}

// ---------------------------------------------------------------------------

Field random_bandlimited_field(const GridSpec& grid, int band, std::uint64_t seed) {
  grid.validate();
  if (band < 1 || band >= grid.n / 2) throw std::invalid_argument("random_bandlimited_field: band must lie in [1, n/2)");
  const Philox gen(seed);
  SpectralField s{grid, std::vector<std::complex<double>>(grid.size())};
  std::uint64_t index = 0;
  for (int a = -band; a <= band; ++a)
    for (int b = -band; b <= band; ++b) {
      const auto z = normal_pair(gen, 0, index++);
      if (a == 0 && b == 0) continue;
      const int j = a < 0 ? a + grid.n : a;
      const int k = b < 0 ? b + grid.n : b;
      s(j, k) = {z[0], z[1]};
    }
  return inverse(s);
}

double cz_ratio(const Field& f, double p, double kernel_scale) {
  const double denom = lp_norm(f, p);
  if (!(denom > 0.0)) throw std::invalid_argument("cz_ratio: zero field");
  const SpectralField fh = forward(f);
  const GridSpec& g = f.grid;
  const double s = 2.0 * kernel_scale;
  SpectralField xx = fh, xy = fh, yy = fh;
  for (int j = 0; j < g.n; ++j) {
    const double kx = g.wavenumber(j);
    for (int k = 0; k < g.n; ++k) {
      const double ky = g.wavenumber(k);
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) {
        xx(j, k) = xy(j, k) = yy(j, k) = 0.0;
        continue;
      }
      const double c = -s / k2;
      xx(j, k) *= c * kx * kx;
      xy(j, k) *= c * kx * ky;
      yy(j, k) *= c * ky * ky;
    }
  }
  const Field a = inverse(xx), b = inverse(xy), c = inverse(yy);
  Field frob(g);
  for (std::size_t m = 0; m < frob.values.size(); ++m)
    frob.values[m] = std::sqrt(a.values[m] * a.values[m] + 2.0 * b.values[m] * b.values[m] + c.values[m] * c.values[m]);
  return lp_norm(frob, p) / denom;
}

CzResult cz_inequality_test(double p, std::int64_t trials, const GridSpec& grid, int band, std::uint64_t seed,
                            double kernel_scale) {
  if (!(p > 1.0)) throw std::invalid_argument("cz_inequality_test: p must be > 1");
  if (trials < 1) throw std::invalid_argument("cz_inequality_test: trials must be >= 1");
  CzResult out{p, trials, band, 0.0, 2.0 * kernel_scale};
  std::vector<double> ratios(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < trials; ++t) {
    const Field f = random_bandlimited_field(grid, band, child_seed(seed, static_cast<std::uint64_t>(t)));
    ratios[static_cast<std::size_t>(t)] = cz_ratio(f, p, kernel_scale);
  }
  out.max_ratio = *std::max_element(ratios.begin(), ratios.end());
  return out;
}

double holder_seminorm(const VectorField& u, double eta, std::span<const std::pair<int, int>> lags) {
  const GridSpec& g = u.x.grid;
  const double h = g.h();
  double best = 0.0;
  for (const auto& [a, b] : lags) {
    const double dist = h * std::hypot(static_cast<double>(a), static_cast<double>(b));
    if (dist == 0.0) continue;
    double m = 0.0;
    for (int j = std::max(0, -a); j < std::min(g.n, g.n - a); ++j)
      for (int k = std::max(0, -b); k < std::min(g.n, g.n - b); ++k)
        m = std::max(m, std::hypot(u.x(j + a, k + b) - u.x(j, k), u.y(j + a, k + b) - u.y(j, k)));
    best = std::max(best, m / std::pow(dist, eta));
  }
  return best;
}

std::vector<std::pair<int, int>> random_lags(int count, int max_offset, std::uint64_t seed) {
  if (max_offset < 1) throw std::invalid_argument("random_lags: max_offset must be >= 1");
  const long long available = [&] {
    long long c = 0;
    for (int a = -max_offset; a <= max_offset; ++a)
      for (int b = 0; b <= max_offset; ++b)
        if ((b > 0 || a > 0) && a * a + b * b <= max_offset * max_offset) ++c;
    return c;
  }();
  if (count < 1 || count > available) throw std::invalid_argument("random_lags: count out of range");
  const Philox gen(seed);
  std::set<std::pair<int, int>> chosen;
  std::uint64_t index = 0;
  while (static_cast<int>(chosen.size()) < count) {
    const auto u = uniform_pair(gen, 0, index++);
    // Half plane only: |u(x) - u(y)| is symmetric in the pair.
    const int a = std::min(max_offset, static_cast<int>(std::floor(u[0] * (2 * max_offset + 1))) - max_offset);
    const int b = std::min(max_offset, static_cast<int>(std::floor(u[1] * (max_offset + 1))));
    if ((b == 0 && a <= 0) || a * a + b * b > max_offset * max_offset) continue;
    chosen.insert({a, b});
  }
  return {chosen.begin(), chosen.end()};
}

MorreyResult morrey_holder_test(double p, std::int64_t trials, const GridSpec& grid, int lags, std::uint64_t seed,
                                double kernel_scale) {
  if (!(p > 2.0)) throw std::invalid_argument("morrey_holder_test: p must be > 2");
  if (trials < 1) throw std::invalid_argument("morrey_holder_test: trials must be >= 1");
  grid.validate();
  const double eta = 1.0 - 2.0 / p;
  const auto lag_set = random_lags(lags, grid.n / 4, substream_seed(seed, "lags"));
  const int band = std::max(2, grid.n / 16);
  const double window = grid.half_extent / 5.0;
  std::vector<double> ratios(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < trials; ++t) {
    Field f = random_bandlimited_field(grid, band, child_seed(seed, static_cast<std::uint64_t>(t)));
    for (int j = 0; j < grid.n; ++j)
      for (int k = 0; k < grid.n; ++k) f(j, k) *= std::exp(-grid.node(j, k).norm2() / (2.0 * window * window));
    const VectorField u = chemo_grad(f, PoissonMode::free_space_padded, kernel_scale);
    ratios[static_cast<std::size_t>(t)] = holder_seminorm(u, eta, lag_set) / lp_norm(f, p);
  }
  return {p, eta, trials, lags, *std::max_element(ratios.begin(), ratios.end())};
}

double nash_ratio(const Field& u) {
  const double l1 = lp_norm(u, 1.0);
  const double l3 = lp_norm(u, 3.0);
  const Field g2 = gradient_magnitude_sq(u);
  double sum = 0.0;
  for (double v : g2.values) sum += v;
  const double grad_l2 = std::sqrt(sum * u.grid.cell_area());
  const double rhs = 1.5 * std::sqrt(l1) * grad_l2;
  if (!(rhs > 0.0)) throw std::invalid_argument("nash_ratio: degenerate field");
  return std::pow(l3, 1.5) / rhs;
}

NashResult nash_inequality_test(std::int64_t trials, const GridSpec& grid, std::uint64_t seed) {
  grid.validate();
  if (trials < 1) throw std::invalid_argument("nash_inequality_test: trials must be >= 1");
  const double L = grid.half_extent;
  std::vector<double> ratios(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < trials; ++t) {
    const Philox gen(child_seed(seed, static_cast<std::uint64_t>(t)));
    std::uint64_t index = 0;
    const auto uni = [&] { return uniform_pair(gen, 0, index++); };
    const int comps = 1 + std::min(3, static_cast<int>(uni()[0] * 4.0));
    struct Comp {
      Vec2 c;
      double sx, sy, cos_t, sin_t, w;
    };
    std::vector<Comp> cs;
    for (int m = 0; m < comps; ++m) {
      const auto a = uni(), b = uni(), c = uni();
      const double lo = std::log(0.05 * L), hi = std::log(0.15 * L);
      const double theta = kPi * c[0];
      cs.push_back({{(2.0 * a[0] - 1.0) * L / 3.0, (2.0 * a[1] - 1.0) * L / 3.0},
                    std::exp(lo + (hi - lo) * b[0]),
                    std::exp(lo + (hi - lo) * b[1]),
                    std::cos(theta),
                    std::sin(theta),
                    0.2 + 0.8 * c[1]});
    }
    const Field u = sample(grid, [&](Vec2 x) {
      double v = 0.0;
      for (const Comp& c : cs) {
        const double dx = x.x - c.c.x, dy = x.y - c.c.y;
        const double r1 = (c.cos_t * dx + c.sin_t * dy) / c.sx;
        const double r2 = (-c.sin_t * dx + c.cos_t * dy) / c.sy;
        v += c.w * std::exp(-0.5 * (r1 * r1 + r2 * r2));
      }
      return v;
    });
    ratios[static_cast<std::size_t>(t)] = nash_ratio(u);
  }
  NashResult out;
  out.trials = trials;
  for (double r : ratios) {
    out.max_ratio = std::max(out.max_ratio, r);
    if (r > 1.0) ++out.violations;
  }
  return out;
}

double gradc_bound_ratio(const Field& rho, PoissonMode mode, double kernel_scale) {
  const double denom = std::pow(lp_norm(rho, 1.0), 0.25) * std::pow(lp_norm(rho, 3.0), 0.75);
  if (!(denom > 0.0)) throw std::invalid_argument("gradc_bound_ratio: zero field");
  return chemo_grad(rho, mode, kernel_scale).max_norm() / denom;
}

double gradc_bound_constant(const GridSpec& grid, double max_aspect, double kernel_scale) {
  grid.validate();
  if (!(max_aspect >= 1.0)) throw std::invalid_argument("gradc_bound_constant: max_aspect must be >= 1");
  const double major = grid.half_extent / 6.0;
  double best = 0.0;
  for (double aspect = 1.0; aspect <= max_aspect * (1.0 + 1e-12); aspect *= std::sqrt(2.0)) {
    const double minor = major / aspect;
    if (minor < 3.0 * grid.h()) break;
    const Field rho = sample(grid, [&](Vec2 x) {
      return std::exp(-0.5 * (x.x * x.x / (major * major) + x.y * x.y / (minor * minor))) / (2.0 * kPi * major * minor);
    });
    best = std::max(best, gradc_bound_ratio(rho, PoissonMode::free_space_padded, kernel_scale));
  }
  return best;
}

// ---------------------------------------------------------------------------

double MomentSeries::max_norm() const { return norms.empty() ? 0.0 : *std::max_element(norms.begin(), norms.end()); }

MomentSeries moment_monitor(std::span<const Field> fields, std::span<const double> times, double beta, double p,
                            double eta, double q) {
  if (fields.size() != times.size()) throw std::invalid_argument("moment_monitor: fields and times differ in length");
  if (!(p >= 1.0) || !(q >= 1.0) || !(eta > 0.0 && eta < 1.0))
    throw std::invalid_argument("moment_monitor: need p >= 1, q >= 1, 0 < eta < 1");
  MomentSeries out;
  out.eta = eta;
  out.q = q;
  out.times.assign(times.begin(), times.end());
  const std::size_t m = times.size();
  double dt = 0.0;
  if (m > 1) {
    dt = times[1] - times[0];
    for (std::size_t i = 1; i < m; ++i)
      if (std::fabs((times[i] - times[i - 1]) - dt) > 1e-9 * std::max(1.0, std::fabs(times.back())))
        throw std::invalid_argument("moment_monitor: times must form a uniform mesh");
  }
  for (const Field& f : fields) {
    out.norms.push_back(h_norm(f, beta));
    out.powered.push_back(std::pow(out.norms.back(), p));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = h_norm(fields[j] - fields[i], -2.0);
      sum += 2.0 * std::pow(d, q) / std::pow(times[j] - times[i], 1.0 + eta * q) * dt * dt;
    }
  out.increment_seminorm = std::pow(sum, 1.0 / q);
  return out;
}

MomentSeries moment_monitor(std::span<const Snapshot> snapshots, const MollifierSpec& spec, const GridSpec& grid,
                            double mass, double beta, double p, double eta, double q) {
  std::vector<Field> fields;
  std::vector<double> times;
  for (const Snapshot& s : snapshots) {
    fields.push_back(mollified_empirical(s.positions, spec, grid, mass).field);
    times.push_back(s.t);
  }
  return moment_monitor(fields, times, beta, p, eta, q);
}

// ---------------------------------------------------------------------------

void ConvergenceConfig::validate() const {
  if (n_ladder.empty()) throw ConfigError("n_ladder", "must not be empty");
  for (std::int64_t n : n_ladder)
    if (n < 2) throw ConfigError("n_ladder", "every rung must have at least 2 particles");
  if (replicas < 2) throw ConfigError("replicas", "must be >= 2 to estimate a standard error");
  if (!(beta > 1.0)) throw ConfigError("beta", "must be > 1");
  if (!(gamma > 1.0 && gamma < beta)) throw ConfigError("gamma", "must satisfy 1 < gamma < beta");
  const double alpha_max = 1.0 / (2.0 + 2.0 * beta);
  if (!(alpha > 0.0 && alpha < alpha_max))
    throw ConfigError("alpha", "must satisfy 0 < alpha < 1/(2 + 2 beta) = " + std::to_string(alpha_max) +
                                   " (mollifier scaling condition)");
  if (!(mass > 0.0 && mass < 8.0 * kPi)) throw ConfigError("mass", "convergence runs require 0 < mass < 8 pi");
  if (!(cutoff_margin >= 0.0)) throw ConfigError("cutoff_margin", "must be >= 0");
  if (!(mollifier_width > 0.0)) throw ConfigError("mollifier_width", "must be > 0");
  try {
    density.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("density", e.what());
  }
  if (std::fabs(density.total_mass - mass) > 1e-12 * mass) throw ConfigError("density.mass", "must equal mass");
  try {
    grid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("grid", e.what());
  }
  if (!(local_radius > 0.0 && 1.2 * local_radius < grid.half_extent))
    throw ConfigError("local_radius", "must satisfy 0 < 1.2 local_radius < grid.half_extent");
  if (!(particle_dt > 0.0)) throw ConfigError("particle_dt", "must be > 0");
  if (!(pde_dt > 0.0)) throw ConfigError("pde_dt", "must be > 0");
  if (!(t_end > 0.0)) throw ConfigError("t_end", "must be > 0");
  if (n_observers < 1) throw ConfigError("n_observers", "must be >= 1");
  if (!(diffusion > 0.0)) throw ConfigError("diffusion", "must be > 0");
}

std::vector<double> ConvergenceConfig::observer_times() const {
  std::vector<double> t;
  for (int i = 0; i <= n_observers; ++i)
    t.push_back(i == n_observers ? t_end : t_end * static_cast<double>(i) / static_cast<double>(n_observers));
  return t;
}

bool decreases_within_stderr(std::span<const SampleStats> series, double stderr_units) {
  for (std::size_t k = 0; k + 1 < series.size(); ++k) {
    const double se = std::hypot(series[k].stderr_, series[k + 1].stderr_);
    if (series[k + 1].mean > series[k].mean + stderr_units * se) return false;
  }
  return true;
}

bool no_systematic_growth(std::span<const SampleStats> series, double stderr_units) {
  for (std::size_t k = 1; k < series.size(); ++k) {
    const double se = std::hypot(series[0].stderr_, series[k].stderr_);
    if (series[k].mean > series[0].mean + stderr_units * se) return false;
  }
  return true;
}

MomentGrowthCheck moment_growth_check(const ConvergenceReport& report, double stderr_units) {
  MomentGrowthCheck out;
  std::vector<SampleStats> raw;
  out.bounded = true;
  for (const auto& rung : report.rungs) {
    raw.push_back(rung.moment_max);
    const double ref = rung.moment_reference > 0.0 ? rung.moment_reference : 1.0;
    out.ratios.push_back({rung.moment_max.count, rung.moment_max.mean / ref, rung.moment_max.stderr_ / ref});
    if (rung.moment_max.mean > report.limit_moment_max + stderr_units * rung.moment_max.stderr_) out.bounded = false;
  }
  out.raw_no_growth = no_systematic_growth(raw, stderr_units);
  out.ratio_no_growth = no_systematic_growth(out.ratios, stderr_units);
  return out;
}

Field mollify(const Field& field, const MollifierSpec& spec) {
  const GridSpec& g = field.grid;
  const double h = g.h();
  Field v(g);
  for (int j = 0; j < g.n; ++j)
    for (int k = 0; k < g.n; ++k) v(j, k) = mollifier_value({g.mode(j) * h, g.mode(k) * h}, spec) * h * h;
  const SpectralField vh = forward(v);
  SpectralField fh = forward(field);
  for (std::size_t i = 0; i < fh.coeffs.size(); ++i) fh.coeffs[i] *= vh.coeffs[i];
  return inverse(fh);
}

ConvergenceReport convergence_study(const ConvergenceConfig& config) {
  config.validate();
  ConvergenceReport report;
  report.mckean_oracle = config.mckean_oracle;
  report.observer_times = config.observer_times();
  const auto& obs = report.observer_times;
  const auto& battery = standard_battery();
  for (const auto& f : battery) report.battery.push_back(f.name);

  // Reference solution at the observers, plus every particle step time in
  // oracle mode.
  std::vector<double> ref_times = obs;
  if (config.mckean_oracle) {
    const StepPlan plan = plan_steps(config.particle_dt, config.t_end, obs);
    for (std::size_t g = 0; g + 1 < plan.boundaries.size(); ++g)
      for (std::int64_t s = 0; s < plan.steps[g]; ++s)
        ref_times.push_back(s == 0 ? plan.boundaries[g] : plan.boundaries[g] + plan.dts[g] * static_cast<double>(s));
    std::sort(ref_times.begin(), ref_times.end());
    ref_times.erase(std::unique(ref_times.begin(), ref_times.end(),
                                [](double a, double b) { return std::fabs(a - b) <= 1e-12; }),
                    ref_times.end());
  }
  PdeConfig pde;
  pde.grid = config.grid;
  pde.dt = config.pde_dt;
  pde.t_end = config.t_end;
  pde.observers = ref_times;
  pde.kernel_scale = config.kernel_scale;
  const Field rho0 = sample(config.grid, [&](Vec2 x) { return config.density.value(x); });
  const PdeSolution ref = solve(pde, rho0);
  if (ref.blowup.blew_up)
    throw ConfigError("mass", std::string("reference PDE solution blew up (trigger ") + to_string(ref.blowup.trigger) +
                                  ")");
  if (ref.snapshots.size() != ref_times.size()) throw RuntimeFailure("convergence_study: missing reference snapshots");
  for (const auto& w : ref.diagnostics.warnings) report.warnings.push_back("reference: " + w);
  report.a0_estimate = ref.a0_estimate;
  report.cutoff_level = (1.0 + config.cutoff_margin) * ref.a0_estimate;
  const CutoffParams cutoff{report.cutoff_level};

  const auto time_index = [&](double t) {
    const auto it = std::lower_bound(ref_times.begin(), ref_times.end(), t - 1e-12);
    if (it == ref_times.end() || std::fabs(*it - t) > 1e-9) throw RuntimeFailure("convergence_study: time off mesh");
    return static_cast<std::size_t>(it - ref_times.begin());
  };
  std::vector<const Field*> rho_obs;
  for (double t : obs) rho_obs.push_back(&ref.snapshots[time_index(t)].rho);
  std::vector<VectorField> oracle_drift;
  if (config.mckean_oracle)
    for (const PdeState& s : ref.snapshots) oracle_drift.push_back(chemo_grad(s.rho, pde.poisson_mode, pde.kernel_scale));

  std::vector<SpectralField> phi_hat;
  for (const auto& f : battery) phi_hat.push_back(forward(f.sample(config.grid)));
  const std::size_t nf = battery.size();

  struct ReplicaResult {
    double local = 0.0, weak = 0.0, moment = 0.0, initial_moment = 0.0, initial_weak = 0.0;
    std::vector<double> weak_per;
    std::int64_t truncated = 0;
  };
  const std::size_t rungs = config.n_ladder.size();
  const auto reps = static_cast<std::size_t>(config.replicas);
  std::vector<ReplicaResult> results(rungs * reps);
  const std::uint64_t base = substream_seed(config.seed, "converge.replicas");

#pragma omp parallel for schedule(dynamic)
  for (std::size_t job = 0; job < results.size(); ++job) {
    const std::size_t rung = job / reps;
    const std::size_t rep = job % reps;
    const std::int64_t n = config.n_ladder[rung];
    SimParams sp;
    sp.mollifier = {config.alpha, n, config.profile, config.mollifier_width};
    sp.cutoff = cutoff;
    sp.dt = config.particle_dt;
    sp.t_end = config.t_end;
    sp.seed = child_seed(child_seed(base, static_cast<std::uint64_t>(n)), rep);
    sp.neighbor_mode = config.neighbor_mode;
    sp.mass = config.mass;
    sp.kernel_scale = config.kernel_scale;
    sp.diffusion = config.diffusion;
    StepHooks hooks;
    if (config.mckean_oracle) {
      hooks.drift_override = [&](const ParticleState& state, std::span<Vec2> out) {
        const VectorField& u = oracle_drift[time_index(state.t)];
        for (std::size_t i = 0; i < out.size(); ++i)
          out[i] = mks::cutoff({interpolate(u.x, state.positions[i]), interpolate(u.y, state.positions[i])}, cutoff);
      };
    }
    const Trajectory traj = simulate(sp, config.density, obs, hooks);

    ReplicaResult& res = results[job];
    std::vector<std::vector<double>> pair(nf, std::vector<double>(obs.size()));
    for (std::size_t k = 0; k < obs.size(); ++k) {
      const EmpiricalField g = mollified_empirical(traj.snapshots[k].positions, sp.mollifier, config.grid,
                                                   config.mass, config.deposit);
      if (g.truncated) ++res.truncated;
      const Field diff = g.field - *rho_obs[k];
      res.local = std::max(res.local, h_local_norm(diff, config.gamma, config.local_radius));
      const double m = h_norm(g.field, config.beta);
      res.moment = std::max(res.moment, m);
      if (k == 0) res.initial_moment = m;
      const SpectralField dh = forward(diff);
      for (std::size_t f = 0; f < nf; ++f) pair[f][k] = h_pairing(dh, phi_hat[f], config.beta);
    }
    std::vector<double> initial(nf);
    for (std::size_t f = 0; f < nf; ++f) {
      res.weak_per.push_back(std::fabs(trapezoid(obs, pair[f])));
      initial[f] = pair[f][0];
    }
    res.weak = rms(res.weak_per);
    res.initial_weak = rms(initial);
  }

  for (const Field* rho : rho_obs) report.limit_moment_max = std::max(report.limit_moment_max, h_norm(*rho, config.beta));

  for (std::size_t rung = 0; rung < rungs; ++rung) {
    RungStats st;
    st.n = config.n_ladder[rung];
    const MollifierSpec spec{config.alpha, st.n, config.profile, config.mollifier_width};
    for (const Field* rho : rho_obs)
      st.moment_reference = std::max(st.moment_reference, h_norm(mollify(*rho, spec), config.beta));
    st.replicas = config.replicas;
    std::vector<double> local, weak, moment, initial_moment, initial_weak;
    std::vector<std::vector<double>> per(nf);
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const ReplicaResult& r = results[rung * reps + rep];
      local.push_back(r.local);
      weak.push_back(r.weak);
      moment.push_back(r.moment);
      initial_moment.push_back(r.initial_moment);
      initial_weak.push_back(r.initial_weak);
      for (std::size_t f = 0; f < nf; ++f) per[f].push_back(r.weak_per[f]);
      st.truncated_snapshots += r.truncated;
    }
    st.local_error = sample_stats(local);
    st.weak_error = sample_stats(weak);
    st.moment_max = sample_stats(moment);
    st.initial_moment = sample_stats(initial_moment);
    st.initial_weak_error = sample_stats(initial_weak);
    for (std::size_t f = 0; f < nf; ++f) st.weak_per_function.push_back(sample_stats(per[f]));
    if (st.truncated_snapshots > 0)
      report.warnings.push_back("rung N=" + std::to_string(st.n) + ": " + std::to_string(st.truncated_snapshots) +
                                " snapshots had particles within one kernel radius of the boundary");
    report.rungs.push_back(std::move(st));
  }
  return report;
}

}  // namespace mks

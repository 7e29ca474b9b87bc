#include "mks/verify.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "mks/analysis.hpp"
#include "mks/battery.hpp"
#include "mks/density.hpp"
#include "mks/fixtures.hpp"
#include "mks/io.hpp"
#include "mks/kernel.hpp"
#include "mks/pde.hpp"
#include "mks/rng.hpp"
#include "mks/run.hpp"

namespace mks::verify {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) { return io::format_double(v); }

std::string fmt(Vec2 v) { return "(" + fmt(v.x) + ", " + fmt(v.y) + ")"; }

double rel_err(Vec2 got, Vec2 want) {
  const double scale = std::max(want.norm(), 1e-300);
  return (got - want).norm() / scale;
}

class Uniforms {
 public:
  explicit Uniforms(std::uint64_t seed) : gen_(seed) {}
  double next(double lo, double hi) {
    if (have_ == 0) {
      buf_ = uniform_pair(gen_, 0, index_++);
      have_ = 2;
    }
    return lo + (hi - lo) * buf_[--have_];
  }

 private:
  Philox gen_;
  std::uint64_t index_ = 0;
  std::array<double, 2> buf_{};
  int have_ = 0;
};

/// Shared expensive results reused across criteria.
struct Context {
  const Options& options;
  std::optional<PdeSolution> subcritical;
  double subcritical_seconds = 0.0;
  std::optional<ConvergenceReport> convergence;
  double convergence_seconds = 0.0;

  std::uint64_t seed(std::string_view name) const { return substream_seed(options.seed, name); }
};

GridSpec pde_grid() { return {12.0, 256}; }

PdeConfig pde_reference_config(double t_end) {
  PdeConfig c;
  c.grid = pde_grid();
  c.dt = 0.002;
  c.t_end = t_end;
  return c;
}

Field gaussian_field(const GridSpec& g, double mass, double sigma) {
  const InitialDensity d = InitialDensity::gaussian({0.0, 0.0}, sigma, mass);
  return sample(g, [&](Vec2 x) { return d.value(x); });
}

const PdeSolution& subcritical(Context& ctx) {
  if (!ctx.subcritical) {
    PdeConfig c = pde_reference_config(2.0);
    c.observers = {0.4, 0.8, 1.2, 1.6, 2.0};
    const auto t0 = std::chrono::steady_clock::now();
    ctx.subcritical = solve(c, gaussian_field(c.grid, 4.0 * kPi, 1.0));
    ctx.subcritical_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return *ctx.subcritical;
}

ConvergenceConfig study_config(const Context& ctx) {
  ConvergenceConfig c;
  c.seed = ctx.seed("verify.converge");
  c.kernel_scale = ctx.options.kernel_scale;
  return c;
}

const ConvergenceReport& convergence(Context& ctx) {
  if (!ctx.convergence) {
    const auto t0 = std::chrono::steady_clock::now();
    ctx.convergence = convergence_study(study_config(ctx));
    ctx.convergence_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return *ctx.convergence;
}

// ---------------------------------------------------------------------------
// 1. Kernel closed forms and fixtures

void kernel_fixtures(Context& ctx, Criterion& c) {
  const double ks = ctx.options.kernel_scale;
  std::vector<std::string> failures;

  double grad_fixture = 0.0;
  const auto gg = fixtures::parse(fixtures::csv("grad_green"));
  for (std::size_t i = 0; i < gg.size(); ++i) {
    const Vec2 x{gg[i].input_x, gg[i].input_y};
    const Vec2 want{gg[i].out_x, gg[i].out_y};
    const Vec2 got = grad_green(x, ks);
    const double e = rel_err(got, want);
    grad_fixture = std::max(grad_fixture, e);
    if (e > 1e-10 && failures.size() < 3)
      failures.push_back("grad_green fixture row " + std::to_string(i + 1) + ": got " + fmt(got) + ", expected " +
                         fmt(want));
  }

  // Finite differences on log-uniform radii.
  Uniforms u(ctx.seed("verify.kernel.fd"));
  double grad_fd = 0.0, hess_fd = 0.0, hess_sym = 0.0, trace = 0.0;
  for (int i = 0; i < 400; ++i) {
    const double r = std::pow(10.0, u.next(-2.0, 2.0));
    const double th = u.next(0.0, 2.0 * kPi);
    const Vec2 x{r * std::cos(th), r * std::sin(th)};
    const double h = 1e-4 * r;
    const Vec2 ex{h, 0.0}, ey{0.0, h};
    const Vec2 fd{(green(x + ex) - green(x - ex)) / (2 * h), (green(x + ey) - green(x - ey)) / (2 * h)};
    grad_fd = std::max(grad_fd, rel_err(grad_green(x, ks), fd));

    const Mat2 hs = hess_green(x, ks);
    const Vec2 dx = (grad_green(x + ex, ks) - grad_green(x - ex, ks)) * (1.0 / (2 * h));
    const Vec2 dy = (grad_green(x + ey, ks) - grad_green(x - ey, ks)) * (1.0 / (2 * h));
    const double fro = std::hypot(std::hypot(dx.x, dx.y), std::hypot(dy.x, dy.y));
    const double diff = std::hypot(std::hypot(hs.xx - dx.x, hs.xy - dx.y), std::hypot(hs.yx - dy.x, hs.yy - dy.y));
    hess_fd = std::max(hess_fd, diff / fro);

    const Mat2 un = hess_green_unnormalized(x);
    const Mat2 h1 = hess_green(x, 1.0) * (2.0 * kPi);
    const double un_fro = std::hypot(std::hypot(un.xx, un.xy), std::hypot(un.yx, un.yy));
    hess_sym = std::max(hess_sym, std::hypot(std::hypot(un.xx - h1.xx, un.xy - h1.xy),
                                             std::hypot(un.yx - h1.yx, un.yy - h1.yy)) /
                                      un_fro);
    trace = std::max(trace, std::fabs(hs.trace()) / fro);
  }
  if (grad_fd > 1e-6) failures.push_back("grad_green vs finite differences of green: rel err " + fmt(grad_fd));
  if (hess_fd > 1e-6) failures.push_back("hess_green vs finite differences of grad_green: rel err " + fmt(hess_fd));
  if (hess_sym > 1e-12) failures.push_back("hess_green_unnormalized != 2 pi hess_green: rel err " + fmt(hess_sym));
  if (trace > 1e-12) failures.push_back("hess_green trace (harmonicity): " + fmt(trace));

  double fa_err = 0.0;
  const auto fa = fixtures::parse(fixtures::csv("f_a"));
  for (std::size_t i = 0; i < fa.size(); ++i) {
    const Vec2 want{fa[i].out_x, fa[i].out_y};
    const Vec2 got = cutoff({fa[i].input_x, fa[i].input_y}, {fa[i].a_or_eps});
    const double e = std::max(std::fabs(got.x - want.x) / std::max(1.0, std::fabs(want.x)),
                              std::fabs(got.y - want.y) / std::max(1.0, std::fabs(want.y)));
    fa_err = std::max(fa_err, e);
    if (e > 1e-12 && failures.size() < 6)
      failures.push_back("f_a fixture row " + std::to_string(i + 1) + ": got " + fmt(got) + ", expected " + fmt(want));
  }

  Uniforms s(ctx.seed("verify.kernel.fa"));
  double max_slope = 0.0, slope_fd = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const CutoffParams p{s.next(0.1, 5.0)};
    const double v = s.next(-p.A - 2.0, p.A + 2.0);
    const double d = f_a_derivative(v, p);
    max_slope = std::max(max_slope, std::fabs(d));
    const double h = 1e-5;
    slope_fd = std::max(slope_fd, std::fabs((f_a(v + h, p) - f_a(v - h, p)) / (2 * h) - d));
  }
  if (max_slope > 1.0 + 1e-6) failures.push_back("|f_a'| exceeds 1: " + fmt(max_slope));
  if (slope_fd > 1e-6) failures.push_back("f_a' vs finite differences: " + fmt(slope_fd));

  c.metrics = {{"grad_green_fixture_rel_err", grad_fixture}, {"grad_green_fd_rel_err", grad_fd},
               {"hess_green_fd_rel_err", hess_fd},       {"hess_unnormalized_rel_err", hess_sym},
               {"f_a_fixture_err", fa_err},              {"f_a_max_abs_slope", max_slope},
               {"f_a_slope_fd_err", slope_fd},           {"kernel_scale", ks}};
  c.passed = failures.empty();
  if (c.passed) {
    c.detail = "grad_green fixture " + fmt(grad_fixture) + ", f_a fixture " + fmt(fa_err) + ", max |f_a'| " +
               fmt(max_slope);
  } else {
    std::string all;
    for (const auto& f : failures) all += (all.empty() ? "" : "; ") + f;
    c.detail = all;
  }
}

// ---------------------------------------------------------------------------
// 2. Mollified kernel vs quadrature

/// -(1/pi) int_0^inf int_0^{2pi} e_theta V^N(x - r e_theta) dtheta dr, the
/// convolution grad G * V^N in polar coordinates around x.
Vec2 convolution_oracle(Vec2 x, double eps, double ks) {
  constexpr int kTheta = 512;
  const double inv2e2 = 1.0 / (2.0 * eps * eps);
  const double amp = 1.0 / (2.0 * kPi * eps * eps);
  auto inner = [&](double r) {
    Vec2 sum;
    for (int i = 0; i < kTheta; ++i) {
      const double th = 2.0 * kPi * i / kTheta;
      const double c = std::cos(th), s = std::sin(th);
      const Vec2 y{x.x - r * c, x.y - r * s};
      sum += Vec2{c, s} * (amp * std::exp(-y.norm2() * inv2e2));
    }
    return sum * (2.0 * kPi / kTheta);
  };
  // Gauss-Legendre panels of width eps / 2 out to 12 eps beyond |x|.
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const double outer = x.norm() + 12.0 * eps;
  const int panels = static_cast<int>(std::ceil(outer / (0.5 * eps)));
  const double w = outer / panels;
  Vec2 total;
  for (int p = 0; p < panels; ++p) {
    const double a = p * w;
    const auto& nodes = Rule::abscissa();
    const auto& weights = Rule::weights();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (double sign : {1.0, -1.0}) {
        if (i == 0 && sign < 0.0 && nodes[0] == 0.0) continue;
        const double r = a + 0.5 * w * (1.0 + sign * nodes[i]);
        total += inner(r) * (0.5 * w * weights[i]);
      }
    }
  }
  return total * (-ks / kPi);
}

void mollified_kernel(Context& ctx, Criterion& c) {
  const double ks = ctx.options.kernel_scale;
  std::vector<std::string> failures;
  Uniforms u(ctx.seed("verify.mollified"));
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    MollifierSpec spec;
    spec.alpha = u.next(0.05, 0.24);
    spec.n_particles = static_cast<std::int64_t>(std::pow(10.0, u.next(1.0, 5.0)));
    spec.width = u.next(0.5, 1.5);
    const MollifiedKernel k(spec, ks);
    const double eps = spec.epsilon();
    const double r = eps * std::pow(10.0, u.next(-2.0, std::log10(6.0)));
    const double th = u.next(0.0, 2.0 * kPi);
    const Vec2 x{r * std::cos(th), r * std::sin(th)};
    const Vec2 got = k(x);
    const Vec2 want = convolution_oracle(x, eps, ks);
    const double e = rel_err(got, want);
    worst = std::max(worst, e);
    if (e > 1e-6 && failures.size() < 3)
      failures.push_back("K^N vs quadrature at " + fmt(x) + " (eps " + fmt(eps) + "): got " + fmt(got) +
                         ", expected " + fmt(want));
  }

  double fixture = 0.0;
  const auto rows = fixtures::parse(fixtures::csv("mollified_gaussian"));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    MollifierSpec spec;
    spec.alpha = 1.0;
    spec.n_particles = 1;
    spec.width = rows[i].a_or_eps;
    const MollifiedKernel k(spec, ks);
    const Vec2 want{rows[i].out_x, rows[i].out_y};
    const Vec2 got = k({rows[i].input_x, rows[i].input_y});
    const double e = rel_err(got, want);
    fixture = std::max(fixture, e);
    if (e > 1e-10 && failures.size() < 6)
      failures.push_back("mollified kernel fixture row " + std::to_string(i + 1) + ": got " + fmt(got) +
                         ", expected " + fmt(want));
  }

  bool origin_zero = true;
  for (ProfileKind p : {ProfileKind::gaussian, ProfileKind::bump}) {
    MollifierSpec spec;
    spec.profile = p;
    spec.n_particles = 1000;
    const Vec2 z = MollifiedKernel(spec, ks)({0.0, 0.0});
    origin_zero = origin_zero && z.x == 0.0 && z.y == 0.0;
  }
  if (!origin_zero) failures.push_back("K^N(0) is not exactly (0, 0)");

  c.metrics = {{"quadrature_max_rel_err", worst}, {"fixture_max_rel_err", fixture}, {"origin_exact_zero", origin_zero}};
  c.passed = failures.empty();
  if (c.passed) {
    c.detail = "quadrature " + fmt(worst) + " at 100 points, fixture " + fmt(fixture) + ", K^N(0) = 0";
  } else {
    std::string all;
    for (const auto& f : failures) all += (all.empty() ? "" : "; ") + f;
    c.detail = all;
  }
}

// ---------------------------------------------------------------------------
// 3. Spectral plumbing

void spectral_plumbing(Context& ctx, Criterion& c) {
  const GridSpec g{8.0, 64};
  const std::uint64_t base = ctx.seed("verify.spectral");
  double parseval = 0.0;
  std::int64_t violations = 0;
  double worst_ratio = 0.0;
  const std::vector<double> orders{-2.0, -1.0, 0.0, 0.5, 1.0, 1.1, 1.5, 2.0};
  for (int i = 0; i < 100; ++i) {
    const Field f = random_bandlimited_field(g, 2 + i % 30, child_seed(base, i));
    const double l2 = std::sqrt(l2_inner(f, f));
    parseval = std::max(parseval, std::fabs(h_norm(f, 0.0) - l2) / l2);
    double prev = 0.0;
    for (std::size_t k = 0; k < orders.size(); ++k) {
      const double n = h_norm(f, orders[k]);
      if (k > 0) {
        worst_ratio = std::max(worst_ratio, prev / n);
        if (prev > n * (1.0 + 1e-14)) ++violations;
      }
      prev = n;
    }
  }
  c.passed = parseval <= 1e-10 && violations == 0;
  c.metrics = {{"parseval_max_rel_err", parseval}, {"monotonicity_violations", violations},
               {"max_adjacent_ratio", worst_ratio}};
  c.detail = (parseval <= 1e-10 ? "" : "Parseval failed; ") + std::string(violations ? "norm monotonicity failed; " : "") +
             "Parseval rel err " + fmt(parseval) + ", " + std::to_string(violations) +
             " monotonicity violations over 100 fields";
}

// ---------------------------------------------------------------------------
// 4. Heat oracle

double spectral_gradient_l2(const Field& f) {
  const SpectralField s = forward(f);
  const GridSpec& g = f.grid;
  double sum = 0.0;
  for (int j = 0; j < g.n; ++j)
    for (int k = 0; k < g.n; ++k) {
      const double kx = g.wavenumber(j), ky = g.wavenumber(k);
      sum += (kx * kx + ky * ky) * std::norm(s(j, k));
    }
  return std::sqrt(sum * g.cell_area() / static_cast<double>(g.size()));
}

void heat_oracle(Context& ctx, Criterion& c) {
  const GridSpec g = pde_grid();
  double gauss = 0.0;
  for (double tau : {0.1, 0.5, 1.0}) {
    const Field f = gaussian_field(g, 1.0, 1.0);
    const Field got = heat_propagate(f, tau);
    const Field want = gaussian_field(g, 1.0, std::sqrt(1.0 + 2.0 * tau));
    gauss = std::max(gauss, (got - want).max_abs() / want.max_abs());
  }

  // Multiplier |xi| exp(-tau |xi|^2) peaks at |xi| = 1/sqrt(2 tau); pick tau
  // so that the peak lies on a grid wavenumber.
  const double k0 = g.wavenumber(6);
  const double tau = 1.0 / (2.0 * k0 * k0);
  const double bound = 1.0 / std::sqrt(2.0 * std::numbers::e * tau);
  const Field wave = sample(g, [k0](Vec2 x) { return std::cos(k0 * x.x + 0.0 * x.y); });
  const double attained = spectral_gradient_l2(heat_propagate(wave, tau)) / std::sqrt(l2_inner(wave, wave));
  double random_max = 0.0;
  const std::uint64_t base = ctx.seed("verify.heat");
  for (int i = 0; i < 20; ++i) {
    const Field f = random_bandlimited_field(g, 4 + i, child_seed(base, i));
    random_max = std::max(random_max, spectral_gradient_l2(heat_propagate(f, tau)) / std::sqrt(l2_inner(f, f)));
  }
  const double norm_err = std::fabs(attained - bound) / bound;
  const bool sup_ok = random_max <= bound * (1.0 + 1e-12);
  c.passed = gauss <= 1e-8 && norm_err <= 1e-6 && sup_ok;
  c.metrics = {{"gaussian_max_rel_err", gauss}, {"tau", tau},         {"analytic_norm", bound},
               {"attained_norm", attained},    {"norm_rel_err", norm_err}, {"random_field_max_ratio", random_max}};
  c.detail = std::string(gauss <= 1e-8 ? "" : "gaussian propagation failed; ") +
             (norm_err <= 1e-6 ? "" : "operator norm mismatch; ") + (sup_ok ? "" : "random field exceeds norm; ") +
             "gaussian " + fmt(gauss) + ", ||grad e^{tau lap}|| = " + fmt(attained) + " vs 1/sqrt(2 e tau) = " +
             fmt(bound);
}

// ---------------------------------------------------------------------------
// 5-7. PDE

void pde_conservation(Context& ctx, Criterion& c) {
  const PdeSolution& sol = subcritical(ctx);
  const auto& d = sol.diagnostics;
  const bool mass_ok = d.max_relative_mass_drift <= 1e-8;
  const bool pos_ok = d.min_positivity_ratio >= -1e-6;
  const bool time_ok = ctx.subcritical_seconds <= 120.0;
  const bool finished = !sol.blowup.blew_up;
  c.passed = mass_ok && pos_ok && time_ok && finished;
  c.metrics = {{"max_relative_mass_drift", d.max_relative_mass_drift},
               {"min_positivity_ratio", d.min_positivity_ratio},
               {"solve_seconds", ctx.subcritical_seconds},
               {"steps", d.steps},
               {"boundary_mass_final", d.boundary_mass_final}};
  c.detail = std::string(mass_ok ? "" : "mass drift too large; ") + (pos_ok ? "" : "positivity undershoot; ") +
             (time_ok ? "" : "runtime over 2 min; ") + (finished ? "" : "unexpected blow-up; ") + "mass drift " +
             fmt(d.max_relative_mass_drift) + ", min rho / max rho " + fmt(d.min_positivity_ratio) + ", " +
             fmt(std::round(ctx.subcritical_seconds * 10) / 10) + " s";
}

void pde_dichotomy(Context& ctx, Criterion& c) {
  const PdeSolution& sub = subcritical(ctx);
  const PdeConfig cfg = pde_reference_config(2.0);
  const PdeSolution sup = solve(cfg, gaussian_field(cfg.grid, 10.0 * kPi, 0.5));
  const bool blew = sup.blowup.blew_up && sup.blowup.t_detected && *sup.blowup.t_detected < 2.0;
  c.passed = !sub.blowup.blew_up && blew;
  c.metrics = {{"subcritical_blew_up", sub.blowup.blew_up},
               {"supercritical_blew_up", sup.blowup.blew_up},
               {"supercritical_trigger", to_string(sup.blowup.trigger)},
               {"supercritical_t_detected", sup.blowup.t_detected ? json(*sup.blowup.t_detected) : json(nullptr)}};
  c.detail = std::string("M = 4 pi ") + (sub.blowup.blew_up ? "blew up" : "global to T = 2") + "; M = 10 pi " +
             (blew ? "blew up at t = " + fmt(*sup.blowup.t_detected) + " (" + to_string(sup.blowup.trigger) + ")"
                   : "did not blow up");
}

void cutoff_identification(Context& ctx, Criterion& c) {
  const PdeSolution& uncut = subcritical(ctx);
  PdeConfig cfg = pde_reference_config(2.0);
  cfg.observers = {0.4, 0.8, 1.2, 1.6, 2.0};
  const double a = 1.1 * uncut.a0_estimate;
  cfg.cutoff = CutoffParams{a};
  const PdeSolution cut = solve(cfg, gaussian_field(cfg.grid, 4.0 * kPi, 1.0));
  double worst = 0.0;
  int matched = 0;
  json per_time = json::array();
  for (double t : cfg.observers) {
    const PdeState* u = nullptr;
    const PdeState* v = nullptr;
    for (const auto& s : uncut.snapshots)
      if (std::fabs(s.t - t) < 1e-9) u = &s;
    for (const auto& s : cut.snapshots)
      if (std::fabs(s.t - t) < 1e-9) v = &s;
    if (!u || !v) continue;
    ++matched;
    const double e = (u->rho - v->rho).max_abs() / u->rho.max_abs();
    worst = std::max(worst, e);
    per_time.push_back({{"t", t}, {"max_diff_over_peak", e}});
  }
  c.passed = matched == 5 && worst <= 1e-6;
  c.metrics = {{"a0_estimate", uncut.a0_estimate}, {"cutoff_level", a}, {"times", per_time}, {"max_diff_over_peak", worst}};
  c.detail = (matched == 5 ? "" : "missing observer snapshots; ") + std::string(worst <= 1e-6 ? "" : "cut and uncut differ; ") +
             "A = " + fmt(a) + ", max |rho_cut - rho| / peak = " + fmt(worst) + " at " + std::to_string(matched) +
             " times";
}

// ---------------------------------------------------------------------------
// 8. Ito residual

void ito_residual(Context& ctx, Criterion& c) {
  PdeConfig ref = pde_reference_config(0.25);
  const double a0 = solve(ref, gaussian_field(ref.grid, 4.0 * kPi, 1.0)).a0_estimate;
  SimParams p;
  p.mollifier.alpha = 0.15;
  p.mollifier.n_particles = 500;
  p.cutoff.A = 1.1 * a0;
  p.dt = 0.0025;
  p.t_end = 0.25;
  p.seed = ctx.seed("verify.ito");
  p.mass = 4.0 * kPi;
  p.kernel_scale = ctx.options.kernel_scale;
  const InitialDensity d = InitialDensity::gaussian({0.0, 0.0}, 1.0, p.mass);
  const ItoResidualResult r = ito_residual_test(p, d, standard_battery(), 200);
  double worst = 0.0;
  std::string worst_name;
  json funcs = json::array();
  for (const auto& f : r.functions) {
    const double z = f.stats.z();
    if (std::fabs(z) >= worst) {
      worst = std::fabs(z);
      worst_name = f.name;
    }
    funcs.push_back({{"name", f.name}, {"mean", f.stats.mean}, {"stderr", f.stats.stderr_}, {"z", z}});
  }
  c.passed = r.passed();
  c.metrics = {{"replicas", r.replicas}, {"cutoff_level", p.cutoff.A}, {"functions", funcs}, {"max_abs_z", worst}};
  c.detail = std::string(c.passed ? "" : "residual z-score above 4 for " + worst_name + "; ") + "max |z| = " +
             fmt(worst) + " (" + worst_name + ") over " + std::to_string(r.replicas) + " replicas";
}

// ---------------------------------------------------------------------------
// 9, 11. Convergence ladder and moments

std::string series_text(std::span<const SampleStats> s) {
  std::string out;
  for (const auto& x : s) out += (out.empty() ? "" : ", ") + fmt(x.mean) + " +- " + fmt(x.stderr_);
  return out;
}

void convergence_ladder(Context& ctx, Criterion& c) {
  const ConvergenceReport& r = convergence(ctx);
  std::vector<SampleStats> local, weak;
  json rungs = json::array();
  for (const auto& rung : r.rungs) {
    local.push_back(rung.local_error);
    weak.push_back(rung.weak_error);
    rungs.push_back({{"n", rung.n},
                     {"replicas", rung.replicas},
                     {"local_error", {rung.local_error.mean, rung.local_error.stderr_}},
                     {"weak_error", {rung.weak_error.mean, rung.weak_error.stderr_}}});
  }
  const bool local_ok = decreases_within_stderr(local, 1.0);
  const bool weak_ok = decreases_within_stderr(weak, 1.0);
  c.passed = local_ok && weak_ok;
  c.metrics = {{"rungs", rungs},
               {"a0_estimate", r.a0_estimate},
               {"cutoff_level", r.cutoff_level},
               {"study_seconds", ctx.convergence_seconds}};
  c.detail = std::string(local_ok ? "" : "local H^gamma error not monotone; ") +
             (weak_ok ? "" : "weak error not monotone; ") + "local [" + series_text(local) + "], weak [" +
             series_text(weak) + "]";
}

void moment_growth(Context& ctx, Criterion& c) {
  const ConvergenceReport& r = convergence(ctx);
  const MomentGrowthCheck check = moment_growth_check(r, 2.0);
  std::vector<SampleStats> moments;
  json m = json::array();
  for (std::size_t i = 0; i < r.rungs.size(); ++i) {
    const RungStats& g = r.rungs[i];
    moments.push_back(g.moment_max);
    m.push_back({{"n", g.n},
                 {"mean", g.moment_max.mean},
                 {"stderr", g.moment_max.stderr_},
                 {"reference", g.moment_reference},
                 {"ratio", check.ratios[i].mean},
                 {"ratio_stderr", check.ratios[i].stderr_}});
  }
  c.passed = check.passed();
  c.metrics = {{"moment_max", m},
               {"limit", r.limit_moment_max},
               {"raw_no_growth", check.raw_no_growth},
               {"ratio_no_growth", check.ratio_no_growth},
               {"bounded", check.bounded}};
  std::string verdict;
  if (!check.ratio_no_growth) verdict += "moment ratio grows with N; ";
  if (!check.bounded) verdict += "moment exceeds the limit norm; ";
  c.detail = verdict + "max_t ||g_t||_{beta,2} [" + series_text(moments) + "], / max_t ||V^N * rho_t|| [" +
             series_text(check.ratios) + "], limit " + fmt(r.limit_moment_max) +
             (check.raw_no_growth ? "" : " (raw series rises toward the limit)");
}

// ---------------------------------------------------------------------------
// 10. Inequality suites

void inequality_suites(Context& ctx, Criterion& c) {
  const GridSpec g{8.0, 64};
  const double ks = 1.0;
  std::vector<std::string> failures;
  const CzResult l2 = cz_inequality_test(2.0, 100, g, 8, ctx.seed("verify.cz.2"), ks);
  const double l2_err = std::fabs(l2.max_ratio - l2.l2_constant) / l2.l2_constant;
  if (l2_err > 1e-6) failures.push_back("CZ p = 2 ratio " + fmt(l2.max_ratio) + " != " + fmt(l2.l2_constant));
  json cz = json::array();
  for (double p : {1.5, 3.0, 4.0}) {
    const std::string tag = "verify.cz." + fmt(p);
    const CzResult a = cz_inequality_test(p, 250, g, 8, substream_seed(ctx.seed(tag), "a"), ks);
    const CzResult b = cz_inequality_test(p, 250, g, 8, substream_seed(ctx.seed(tag), "b"), ks);
    const double drift = std::fabs(a.max_ratio - b.max_ratio) / std::max(a.max_ratio, b.max_ratio);
    cz.push_back({{"p", p}, {"batch_a", a.max_ratio}, {"batch_b", b.max_ratio}, {"drift", drift}});
    if (drift >= 0.05) failures.push_back("CZ p = " + fmt(p) + " unstable (drift " + fmt(drift) + ")");
  }
  const MorreyResult ma = morrey_holder_test(4.0, 200, g, 128, substream_seed(ctx.seed("verify.morrey"), "a"), ks);
  const MorreyResult mb = morrey_holder_test(4.0, 200, g, 128, substream_seed(ctx.seed("verify.morrey"), "b"), ks);
  const double mdrift = std::fabs(ma.max_ratio - mb.max_ratio) / std::max(ma.max_ratio, mb.max_ratio);
  if (mdrift >= 0.10) failures.push_back("Morrey ratio unstable (drift " + fmt(mdrift) + ")");
  const NashResult nash = nash_inequality_test(500, {8.0, 128}, ctx.seed("verify.nash"));
  if (nash.violations > 0)
    failures.push_back("Nash inequality violated on " + std::to_string(nash.violations) + " fields");

  c.metrics = {{"cz_p2_ratio", l2.max_ratio},
               {"cz_p2_constant", l2.l2_constant},
               {"cz_p2_rel_err", l2_err},
               {"cz", cz},
               {"morrey", {{"p", 4.0}, {"batch_a", ma.max_ratio}, {"batch_b", mb.max_ratio}, {"drift", mdrift}}},
               {"nash", {{"trials", nash.trials}, {"max_ratio", nash.max_ratio}, {"violations", nash.violations}}}};
  c.passed = failures.empty();
  if (c.passed) {
    double worst = 0.0;
    for (const auto& e : cz) worst = std::max(worst, e["drift"].get<double>());
    c.detail = "CZ p = 2 " + fmt(l2.max_ratio) + ", max CZ drift " + fmt(worst) + ", Morrey drift " + fmt(mdrift) +
               ", Nash max ratio " + fmt(nash.max_ratio);
  } else {
    std::string all;
    for (const auto& f : failures) all += (all.empty() ? "" : "; ") + f;
    c.detail = all;
  }
}

// ---------------------------------------------------------------------------
// 12. Determinism across thread counts

void determinism(Context& ctx, Criterion& c) {
  const json simulate = {{"seed", ctx.options.seed},
                         {"kernel", {{"kernel_scale", ctx.options.kernel_scale}}},
                         {"cutoff", {{"A", 3.0}}},
                         {"grid", {{"half_extent", 8.0}, {"n", 64}}},
                         {"particles", {{"n", 400}, {"dt", 0.01}, {"t_end", 0.1}, {"observers", {0.0, 0.05, 0.1}}}}};
  const json pde = {{"seed", ctx.options.seed},
                    {"kernel", {{"kernel_scale", ctx.options.kernel_scale}}},
                    {"grid", {{"half_extent", 8.0}, {"n", 64}}},
                    {"pde", {{"t_end", 0.2}, {"use_cutoff", true}}}};
  const std::filesystem::path root = ctx.options.scratch.empty()
                                         ? std::filesystem::temp_directory_path() / "mks-determinism"
                                         : ctx.options.scratch;
  json runs = json::array();
  bool all_equal = true;
  std::string mismatch;
  for (const auto& [command, cfg] : {std::pair{"simulate", simulate}, std::pair{"solve-pde", pde}}) {
    std::vector<std::string> digests;
    for (int threads : {1, 3}) {
      run::Options o;
      o.out_root = root / ("threads-" + std::to_string(threads));
      o.threads = threads;
      digests.push_back(run::run_command(command, cfg, o).summary_digest);
    }
    const bool eq = digests[0] == digests[1];
    if (!eq) mismatch += std::string(mismatch.empty() ? "" : ", ") + command;
    all_equal = all_equal && eq;
    runs.push_back({{"command", command}, {"threads_1", digests[0]}, {"threads_3", digests[1]}, {"equal", eq}});
  }
  c.passed = all_equal;
  c.metrics = {{"runs", runs}};
  c.detail = all_equal ? "simulate and solve-pde summary digests identical for --threads 1 and 3"
                       : "summary digest differs across thread counts for " + mismatch;
}

using Runner = void (*)(Context&, Criterion&);

struct Entry {
  const char* name;
  Runner run;
};

const Entry kEntries[kCriteria] = {
    {"kernel_fixtures", kernel_fixtures},
    {"mollified_kernel_quadrature", mollified_kernel},
    {"spectral_parseval_monotonicity", spectral_plumbing},
    {"heat_oracle", heat_oracle},
    {"pde_conservation", pde_conservation},
    {"pde_blowup_dichotomy", pde_dichotomy},
    {"cutoff_identification", cutoff_identification},
    {"ito_residual", ito_residual},
    {"convergence_ladder", convergence_ladder},
    {"inequality_suites", inequality_suites},
    {"moment_growth", moment_growth},
    {"thread_determinism", determinism},
};

}  // namespace

bool Report::passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.passed; });
}

const char* criterion_name(int id) {
  if (id < 1 || id > kCriteria) return "unknown";
  return kEntries[id - 1].name;
}

Report run_suite(const Options& options) {
  Context ctx{options, std::nullopt, 0.0, std::nullopt, 0.0};
  Report report;
  for (int id = 1; id <= kCriteria; ++id) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end())
      continue;
    Criterion c;
    c.id = id;
    c.name = kEntries[id - 1].name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      kEntries[id - 1].run(ctx, c);
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("error: ") + e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (options.on_result) options.on_result(c);
    report.criteria.push_back(std::move(c));
  }
  return report;
}

}  // namespace mks::verify

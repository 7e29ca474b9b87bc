#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mks/particles.hpp"
#include "mks/pde.hpp"

using namespace mks;

namespace {

constexpr double kPi = std::numbers::pi;

Field gaussian(const GridSpec& g, double mass, double sigma) {
  const InitialDensity d = InitialDensity::gaussian({0.0, 0.0}, sigma, mass);
  return sample(g, [&](Vec2 x) { return d.value(x); });
}

}  // namespace

TEST_CASE("heat propagation of a gaussian") {
  const GridSpec g{10.0, 128};
  const Field out = heat_propagate(gaussian(g, 1.0, 0.8), 0.3);
  const Field want = gaussian(g, 1.0, std::sqrt(0.64 + 0.6));
  CHECK((out - want).max_abs() / want.max_abs() < 1e-10);
}

static double newton_error(int n, PoissonMode mode) {
  // Newton: grad G * rho(x) = -x m(|x|) / (pi |x|^2), m the enclosed mass.
  const GridSpec g{12.0, n};
  const double mass = 3.0, sigma = 0.7;
  const VectorField u = chemo_grad(gaussian(g, mass, sigma), mode);
  double worst = 0.0, peak = 0.0;
  for (int j = n / 4; j < 3 * n / 4; ++j)
    for (int k = n / 4; k < 3 * n / 4; ++k) {
      const Vec2 x = g.node(j, k);
      const double r2 = x.norm2();
      if (r2 == 0.0) continue;
      const double m = -mass * std::expm1(-r2 / (2 * sigma * sigma));
      const Vec2 want{-x.x * m / (kPi * r2), -x.y * m / (kPi * r2)};
      peak = std::max(peak, want.norm());
      worst = std::max(worst, std::hypot(u.x(j, k) - want.x, u.y(j, k) - want.y));
    }
  return worst / peak;
}

TEST_CASE("chemotactic gradient of a gaussian") {
  const double coarse = newton_error(128, PoissonMode::free_space_padded);
  const double fine = newton_error(256, PoissonMode::free_space_padded);
  CHECK(fine < 5e-3);
  // Point-sampled singular kernel: second order in h.
  CHECK(coarse / fine > 3.0);
  // The torus solve differs from free space by the periodic images.
  CHECK(newton_error(256, PoissonMode::torus_spectral) < 0.1);
  const GridSpec g{12.0, 64};
  const Field rho = gaussian(g, 1.0, 1.0);
  const VectorField a = chemo_grad(rho, PoissonMode::free_space_padded);
  const VectorField b = chemo_grad(rho, PoissonMode::free_space_padded, 2.0);
  CHECK(b.x(40, 30) == doctest::Approx(2.0 * a.x(40, 30)));
}

TEST_CASE("short subcritical run conserves mass and stays positive") {
  PdeConfig c;
  c.grid = {12.0, 128};
  c.dt = 0.004;
  c.t_end = 0.2;
  c.observers = {0.1, 0.2};
  const PdeSolution sol = solve(c, gaussian(c.grid, 4.0 * kPi, 1.0));
  CHECK_FALSE(sol.blowup.blew_up);
  CHECK(sol.diagnostics.max_relative_mass_drift < 1e-10);
  CHECK(sol.diagnostics.min_positivity_ratio > -1e-6);
  CHECK(sol.a0_estimate > 0.0);
  REQUIRE(sol.snapshots.size() >= 2);
  CHECK(sol.snapshots.back().t == doctest::Approx(0.2));
}

TEST_CASE("no interaction reduces to the heat flow") {
  PdeConfig c;
  c.grid = {10.0, 64};
  c.dt = 0.01;
  c.t_end = 0.1;
  c.interaction = false;
  c.observers = {0.1};
  const Field rho0 = gaussian(c.grid, 2.0, 1.0);
  const PdeSolution sol = solve(c, rho0);
  const Field want = heat_propagate(rho0, 0.1);
  CHECK((sol.snapshots.back().rho - want).max_abs() / want.max_abs() < 1e-10);
}

TEST_CASE("supercritical concentrated mass blows up") {
  PdeConfig c;
  c.grid = {12.0, 128};
  c.dt = 0.002;
  c.t_end = 2.0;
  const PdeSolution sol = solve(c, gaussian(c.grid, 10.0 * kPi, 0.5));
  CHECK(sol.blowup.blew_up);
  REQUIRE(sol.blowup.t_detected.has_value());
  CHECK(*sol.blowup.t_detected < 2.0);
  CHECK(sol.blowup.trigger != BlowupTrigger::none);
}

TEST_CASE("a large cutoff leaves the solution unchanged") {
  PdeConfig c;
  c.grid = {12.0, 128};
  c.dt = 0.004;
  c.t_end = 0.2;
  c.observers = {0.2};
  const Field rho0 = gaussian(c.grid, 4.0 * kPi, 1.0);
  const PdeSolution uncut = solve(c, rho0);
  c.cutoff = CutoffParams{1.1 * uncut.a0_estimate};
  const PdeSolution cut = solve(c, rho0);
  CHECK((cut.snapshots.back().rho - uncut.snapshots.back().rho).max_abs() == 0.0);
  c.cutoff = CutoffParams{0.2 * uncut.a0_estimate};
  const PdeSolution tight = solve(c, rho0);
  CHECK((tight.snapshots.back().rho - uncut.snapshots.back().rho).max_abs() > 1e-4);
}

TEST_CASE("invalid PDE inputs") {
  PdeConfig c;
  c.grid = {12.0, 64};
  Field neg = gaussian(c.grid, 1.0, 1.0);
  neg(3, 3) = -1.0;
  CHECK_THROWS_AS(solve(c, neg), std::invalid_argument);
  c.dt = -1.0;
  CHECK_THROWS(solve(c, gaussian(c.grid, 1.0, 1.0)));
}

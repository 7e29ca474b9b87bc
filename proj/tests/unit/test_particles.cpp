#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <numbers>

#include "mks/particles.hpp"

using namespace mks;

namespace {

SimParams small_params(std::int64_t n) {
  SimParams p;
  p.mollifier.n_particles = n;
  p.cutoff.A = 3.0;
  p.dt = 0.01;
  p.t_end = 0.1;
  p.seed = 17;
  p.mass = 4.0 * std::numbers::pi;
  return p;
}

}  // namespace

TEST_CASE("step plan divides every observer gap") {
  const std::vector<double> obs{0.0, 0.03, 0.1};
  const StepPlan plan = plan_steps(0.02, 0.25, obs);
  REQUIRE(plan.boundaries.size() == plan.steps.size() + 1);
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const double gap = plan.boundaries[i + 1] - plan.boundaries[i];
    CHECK(plan.dts[i] <= 0.02 + 1e-15);
    CHECK(plan.steps[i] * plan.dts[i] == doctest::Approx(gap).epsilon(1e-13));
  }
  CHECK(plan.boundaries.back() == 0.25);
}

TEST_CASE("initial sampling matches the density") {
  const InitialDensity d = InitialDensity::gaussian({1.0, -2.0}, 0.5, 3.0);
  const ParticleState s = sample_initial(d, 40000, 3);
  double mx = 0.0, my = 0.0, vx = 0.0;
  for (const Vec2& x : s.positions) {
    mx += x.x;
    my += x.y;
  }
  mx /= s.positions.size();
  my /= s.positions.size();
  for (const Vec2& x : s.positions) vx += (x.x - mx) * (x.x - mx);
  vx /= s.positions.size();
  CHECK(mx == doctest::Approx(1.0).epsilon(0.01));
  CHECK(my == doctest::Approx(-2.0).epsilon(0.01));
  CHECK(vx == doctest::Approx(0.25).epsilon(0.03));

  const InitialDensity disk = InitialDensity::uniform_disk({0.0, 0.0}, 2.0, 1.0);
  for (const Vec2& x : sample_initial(disk, 2000, 5).positions) CHECK(x.norm() <= 2.0);
}

TEST_CASE("pure diffusion spreads at rate 2 D t") {
  SimParams p = small_params(20000);
  p.drift_scale = 0.0;
  p.diffusion = 0.5;
  p.t_end = 0.5;
  const InitialDensity d = InitialDensity::gaussian({0.0, 0.0}, 1.0, 1.0);
  const std::vector<double> obs{0.0, 0.5};
  const Trajectory t = simulate(p, d, obs);
  REQUIRE(t.snapshots.size() == 2);
  double var = 0.0;
  for (const Vec2& x : t.snapshots[1].positions) var += x.x * x.x;
  var /= t.snapshots[1].positions.size();
  CHECK(var == doctest::Approx(1.0 + 2 * 0.5 * 0.5).epsilon(0.03));
}

TEST_CASE("no noise and no interaction keeps particles fixed") {
  SimParams p = small_params(50);
  p.drift_scale = 0.0;
  p.diffusion = 0.0;
  const InitialDensity d = InitialDensity::gaussian({0.0, 0.0}, 1.0, 1.0);
  const std::vector<double> obs{0.0, 0.1};
  const Trajectory t = simulate(p, d, obs);
  CHECK(t.snapshots[0].positions == t.snapshots[1].positions);
}

TEST_CASE("drift is bounded by the cutoff and attractive") {
  SimParams p = small_params(200);
  p.cutoff.A = 0.5;
  const InitialDensity d = InitialDensity::gaussian({0.0, 0.0}, 1.0, p.mass);
  const ParticleState s = sample_initial(d, 200, 9);
  const std::vector<Vec2> b = drift(s, p);
  // The blend overshoots the cap on (A, A + 1).
  double overshoot = 0.0;
  for (int k = 0; k <= 1000; ++k) overshoot = std::max(overshoot, cutoff_blend(k / 1000.0));
  const double bound = 0.5 + overshoot + 1e-6;
  double inward = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(std::fabs(b[i].x) <= bound);
    CHECK(std::fabs(b[i].y) <= bound);
    inward += -(b[i].x * s.positions[i].x + b[i].y * s.positions[i].y);
  }
  CHECK(inward > 0.0);
}

TEST_CASE("cell list agrees with the direct sum") {
  SimParams p = small_params(3000);
  p.cutoff.A = 100.0;
  const InitialDensity d = InitialDensity::gaussian({0.0, 0.0}, 1.0, p.mass);
  const ParticleState s = sample_initial(d, 3000, 11);
  const std::vector<Vec2> direct = drift(s, p);
  p.neighbor_mode = NeighborMode::cell_list;
  p.cut_radius = 0.0;
  const std::vector<Vec2> cells = drift(s, p);
  double worst = 0.0;
  for (std::size_t i = 0; i < direct.size(); ++i) worst = std::max(worst, (direct[i] - cells[i]).norm());
  CHECK(worst < 1e-9);
}

TEST_CASE("simulation is reproducible across thread counts") {
  const SimParams p = small_params(300);
  const InitialDensity d = InitialDensity::gaussian({0.0, 0.0}, 1.0, p.mass);
  const std::vector<double> obs{0.0, 0.05, 0.1};
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const Trajectory a = simulate(p, d, obs);
  omp_set_num_threads(3);
  const Trajectory b = simulate(p, d, obs);
  omp_set_num_threads(saved);
  REQUIRE(a.snapshots.size() == 3);
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) CHECK(a.snapshots[i].positions == b.snapshots[i].positions);
  SimParams q = p;
  q.seed = 18;
  CHECK(simulate(q, d, obs).snapshots[2].positions != a.snapshots[2].positions);
}

TEST_CASE("invalid parameters are rejected") {
  SimParams p = small_params(10);
  p.dt = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = small_params(10);
  p.cutoff.A = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = small_params(10);
  p.mollifier.alpha = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

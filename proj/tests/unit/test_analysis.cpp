#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mks/analysis.hpp"
#include "mks/battery.hpp"
#include "mks/errors.hpp"

using namespace mks;

TEST_CASE("sample statistics") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  const SampleStats s = sample_stats(xs);
  CHECK(s.count == 4);
  CHECK(s.mean == 2.5);
  CHECK(s.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(s.z() == doctest::Approx(2.5 / s.stderr_));
  const std::vector<double> zeros{0.0, 0.0};
  CHECK(sample_stats(zeros).z() == 0.0);
}

TEST_CASE("ladder trend checks") {
  const std::vector<SampleStats> down{{8, 1.0, 0.1}, {8, 0.8, 0.1}, {8, 0.85, 0.05}};
  CHECK(decreases_within_stderr(down, 1.0));
  const std::vector<SampleStats> up{{8, 1.0, 0.01}, {8, 1.5, 0.01}};
  CHECK_FALSE(decreases_within_stderr(up, 1.0));
  CHECK_FALSE(no_systematic_growth(up, 2.0));
  const std::vector<SampleStats> flat{{8, 1.0, 0.1}, {8, 1.1, 0.1}};
  CHECK(no_systematic_growth(flat, 2.0));
}

TEST_CASE("battery smoothing matches numerical convolution") {
  const double eps = 0.3;
  for (const TestFunction& f : standard_battery()) {
    const TestFunction s = f.smoothed(eps);
    const Vec2 x{0.4, -0.7};
    // Gauss-Hermite-free check: midpoint rule over +-7 eps.
    const int n = 141;
    const double h = 14.0 * eps / (n - 1);
    double sum = 0.0, w = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Vec2 y{-7 * eps + i * h, -7 * eps + j * h};
        const double k = std::exp(-y.norm2() / (2 * eps * eps));
        sum += k * f.value(x - y);
        w += k;
      }
    CHECK(s.value(x) == doctest::Approx(sum / w).epsilon(1e-8));
  }
}

TEST_CASE("battery derivatives match finite differences") {
  const double h = 1e-4;
  for (const TestFunction& f : standard_battery()) {
    const Vec2 x{0.3, 0.9};
    const Vec2 g = f.gradient(x);
    CHECK(g.x == doctest::Approx((f.value({x.x + h, x.y}) - f.value({x.x - h, x.y})) / (2 * h)).epsilon(1e-6));
    CHECK(g.y == doctest::Approx((f.value({x.x, x.y + h}) - f.value({x.x, x.y - h})) / (2 * h)).epsilon(1e-6));
    const double lap = (f.value({x.x + h, x.y}) + f.value({x.x - h, x.y}) + f.value({x.x, x.y + h}) +
                        f.value({x.x, x.y - h}) - 4 * f.value(x)) /
                       (h * h);
    CHECK(f.laplacian(x) == doctest::Approx(lap).epsilon(1e-4));
  }
}

TEST_CASE("Calderon-Zygmund ratio at p = 2 is the multiplier norm") {
  const GridSpec g{8.0, 32};
  const CzResult r = cz_inequality_test(2.0, 10, g, 6, 1);
  CHECK(r.max_ratio == doctest::Approx(r.l2_constant).epsilon(1e-10));
  CHECK(cz_ratio(random_bandlimited_field(g, 4, 3), 2.0, 0.5) <= 1.0 + 1e-10);
}

TEST_CASE("Nash ratio of positive fields stays below one") {
  const NashResult r = nash_inequality_test(20, {8.0, 64}, 5);
  CHECK(r.violations == 0);
  CHECK(r.max_ratio < 1.0);
}

TEST_CASE("Holder seminorm of a linear field") {
  const GridSpec g{4.0, 32};
  VectorField u{sample(g, [](Vec2 x) { return 2.0 * x.x; }), sample(g, [](Vec2) { return 0.0; })};
  const std::vector<std::pair<int, int>> lags{{1, 0}, {4, 0}};
  // |u(x) - u(y)| / |x - y|^0.5 = 2 |x - y|^0.5, largest at the longer lag.
  CHECK(holder_seminorm(u, 0.5, lags) == doctest::Approx(2.0 * std::sqrt(4 * g.h())));
  const auto random = random_lags(10, 5, 8);
  CHECK(random.size() == 10);
}

TEST_CASE("moment monitor of a frozen field has no increments") {
  const GridSpec g{4.0, 32};
  const Field f = random_bandlimited_field(g, 3, 1);
  const std::vector<Field> fields{f, f, f};
  const std::vector<double> times{0.0, 0.1, 0.2};
  const MomentSeries m = moment_monitor(fields, times, 1.5, 2.0);
  CHECK(m.increment_seminorm == 0.0);
  CHECK(m.max_norm() == doctest::Approx(m.norms[0]));
}

TEST_CASE("convergence config validation names the field") {
  ConvergenceConfig c;
  c.alpha = 0.25;
  try {
    c.validate();
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "alpha");
  }
  c = ConvergenceConfig{};
  c.gamma = 1.6;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ConvergenceConfig{};
  c.mass = 9.0 * std::numbers::pi;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("small convergence study runs end to end") {
  ConvergenceConfig c;
  c.n_ladder = {100, 400};
  c.replicas = 2;
  c.grid = {10.0, 64};
  c.t_end = 0.05;
  c.particle_dt = 0.01;
  c.pde_dt = 0.005;
  c.n_observers = 2;
  const ConvergenceReport r = convergence_study(c);
  REQUIRE(r.rungs.size() == 2);
  CHECK(r.cutoff_level == doctest::Approx(1.1 * r.a0_estimate));
  CHECK(r.observer_times.size() == 3);
  for (const auto& rung : r.rungs) {
    CHECK(rung.replicas == 2);
    CHECK(rung.local_error.mean > 0.0);
    CHECK(rung.weak_per_function.size() == r.battery.size());
  }
}

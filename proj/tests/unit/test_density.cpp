#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mks/analysis.hpp"
#include "mks/density.hpp"
#include "mks/particles.hpp"

using namespace mks;

TEST_CASE("mollified empirical measure carries the mass") {
  const GridSpec g{8.0, 256};
  const InitialDensity d = InitialDensity::gaussian({0.0, 0.0}, 1.0, 5.0);
  const ParticleState s = sample_initial(d, 500, 2);
  for (ProfileKind kind : {ProfileKind::gaussian, ProfileKind::bump}) {
    MollifierSpec spec;
    spec.profile = kind;
    spec.n_particles = 500;
    spec.alpha = 0.15;
    const EmpiricalField f = mollified_empirical(s.positions, spec, g, 5.0, DepositMethod::direct);
    // The compact bump has a slower-decaying spectrum than the gaussian.
    const double tol = kind == ProfileKind::gaussian ? 1e-10 : 1e-4;
    CHECK(f.field.integral() == doctest::Approx(5.0).epsilon(tol));
    CHECK_FALSE(f.truncated);
    CHECK(f.field.min() >= 0.0);
  }
}

TEST_CASE("fast deposit matches the direct deposit") {
  const GridSpec g{8.0, 128};
  const InitialDensity d = InitialDensity::gaussian({0.0, 0.0}, 1.0, 1.0);
  const ParticleState s = sample_initial(d, 400, 4);
  MollifierSpec spec;
  spec.n_particles = 400;
  spec.alpha = 0.15;
  const Field a = mollified_empirical(s.positions, spec, g, 1.0, DepositMethod::direct).field;
  const Field b = mollified_empirical(s.positions, spec, g, 1.0, DepositMethod::fast).field;
  CHECK((a - b).max_abs() / a.max_abs() < 1e-10);
}

TEST_CASE("truncation is flagged near the boundary") {
  const GridSpec g{4.0, 64};
  MollifierSpec spec;
  spec.n_particles = 2;
  const std::vector<Vec2> pts{{0.0, 0.0}, {3.9, 0.0}};
  CHECK(mollified_empirical(pts, spec, g, 1.0).truncated);
}

TEST_CASE("Bessel potential norms") {
  const GridSpec g{8.0, 64};
  const Field f = random_bandlimited_field(g, 6, 99);
  CHECK(h_norm(f, 0.0) == doctest::Approx(std::sqrt(l2_inner(f, f))).epsilon(1e-12));
  CHECK(h_norm(f, 1.0) >= h_norm(f, 0.5));
  CHECK(h_norm(f, -1.0) <= h_norm(f, 0.0));
  CHECK(h_pairing(f, f, 0.75) == doctest::Approx(std::pow(h_norm(f, 0.75), 2)).epsilon(1e-12));
  // A constant has only the zero mode: every order gives its L2 norm.
  const Field one = sample(g, [](Vec2) { return 1.0; });
  CHECK(h_norm(one, 2.0) == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("local window and norms") {
  CHECK(local_window(0.5, 1.0) == 1.0);
  CHECK(local_window(1.0, 1.0) == 1.0);
  CHECK(local_window(1.2, 1.0) == 0.0);
  CHECK(local_window(1.1, 1.0) == doctest::Approx(0.5));
  const GridSpec g{4.0, 64};
  const Field one = sample(g, [](Vec2) { return 2.0; });
  CHECK(lp_norm(one, 1.0) == doctest::Approx(2.0 * 64.0));
  CHECK(lp_norm(one, 3.0) == doctest::Approx(std::cbrt(8.0 * 64.0)));
  CHECK(lp_norm(one, INFINITY) == 2.0);
  CHECK_THROWS(lp_norm(one, 0.5));
  CHECK_THROWS(h_local_norm(one, 1.0, 5.0));
  CHECK(boundary_mass(one, 0.5) > 0.0);
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mks/kernel.hpp"
#include "mks/rng.hpp"

using namespace mks;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("green and its derivatives") {
  CHECK(green({1.0, 0.0}) == 0.0);
  CHECK(green({2.0, 0.0}) == doctest::Approx(-std::log(4.0) / (2 * kPi)));
  CHECK_THROWS_AS(green({0.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(grad_green({0.0, 0.0}), std::domain_error);

  const Vec2 x{0.3, -1.7};
  const double h = 1e-5;
  const Vec2 g = grad_green(x);
  CHECK(g.x == doctest::Approx((green({x.x + h, x.y}) - green({x.x - h, x.y})) / (2 * h)).epsilon(1e-8));
  CHECK(g.y == doctest::Approx((green({x.x, x.y + h}) - green({x.x, x.y - h})) / (2 * h)).epsilon(1e-8));
  CHECK(grad_green(x, 2.0).x == doctest::Approx(2.0 * g.x));

  const Mat2 hs = hess_green(x);
  CHECK(std::fabs(hs.trace()) < 1e-15);
  CHECK(hs.xy == hs.yx);
  const Mat2 un = hess_green_unnormalized(x);
  CHECK(un.xx == doctest::Approx(2 * kPi * hs.xx));
  CHECK(un.xy == doctest::Approx(2 * kPi * hs.xy));
}

TEST_CASE("cutoff blend is C2 and saturates") {
  CHECK(cutoff_blend(0.0) == 0.0);
  CHECK(cutoff_blend(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  const CutoffParams p{2.0};
  CHECK(f_a(1.5, p) == 1.5);
  CHECK(f_a(-2.0, p) == -2.0);
  CHECK(f_a(3.0, p) == 2.0);
  CHECK(f_a(-10.0, p) == -2.0);
  CHECK(f_a_derivative(2.0 + 1e-12, p) == doctest::Approx(1.0));
  CHECK(f_a_derivative(3.0 - 1e-9, p) == doctest::Approx(0.0).epsilon(1e-6));
  for (double v = -4.0; v <= 4.0; v += 0.01) {
    CHECK(std::fabs(f_a_derivative(v, p)) <= 1.0 + 1e-12);
    CHECK(f_a(-v, p) == -f_a(v, p));
  }
  // Second derivative vanishes at both ends of the blend.
  const double h = 1e-4;
  auto second = [&](double v) { return (f_a(v + h, p) - 2 * f_a(v, p) + f_a(v - h, p)) / (h * h); };
  CHECK(std::fabs(second(2.0 + 2 * h)) < 1e-2);
  CHECK(std::fabs(second(3.0 - 2 * h)) < 1e-2);
  const Vec2 c = cutoff({5.0, -0.5}, p);
  CHECK(c.x == 2.0);
  CHECK(c.y == -0.5);
}

TEST_CASE("mollifier profiles are normalised") {
  for (ProfileKind kind : {ProfileKind::gaussian, ProfileKind::bump}) {
    MollifierSpec spec;
    spec.profile = kind;
    spec.n_particles = 100;
    const double r = spec.support_radius() * (kind == ProfileKind::gaussian ? 0.8 : 1.0);
    const int n = 800;
    const double h = 2 * r / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sum += mollifier_value({-r + (i + 0.5) * h, -r + (j + 0.5) * h}, spec);
    CHECK(sum * h * h == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("mollified kernel limits") {
  for (ProfileKind kind : {ProfileKind::gaussian, ProfileKind::bump}) {
    MollifierSpec spec;
    spec.profile = kind;
    spec.n_particles = 1000;
    const MollifiedKernel k(spec);
    const Vec2 zero = k({0.0, 0.0});
    CHECK(zero.x == 0.0);
    CHECK(zero.y == 0.0);
    const Vec2 far{3.0 * spec.support_radius(), 0.4};
    CHECK(k(far).x == doctest::Approx(grad_green(far).x).epsilon(1e-12));
    CHECK(k.tail_bound(spec.support_radius()) < 1e-10);
    // Linear near the origin: K(x) ~ -x k(0).
    const Vec2 tiny{1e-9, -2e-9};
    CHECK(k(tiny).x / tiny.x == doctest::Approx(k.radial_factor(0.0) * -1.0).epsilon(1e-8));
  }
}

TEST_CASE("mollified gaussian kernel closed form") {
  MollifierSpec spec;
  spec.alpha = 1.0;
  spec.n_particles = 1;
  spec.width = 0.5;
  const MollifiedKernel k(spec);
  for (double r : {1e-6, 1e-3, 0.1, 0.7, 2.0, 5.0}) {
    const double expect = std::expm1(-r * r / (2 * 0.25)) / (kPi * r);
    CHECK(k({r, 0.0}).x == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("philox known answers") {
  const Philox zero(0);
  const auto a = zero({0, 0, 0, 0});
  CHECK(a[0] == 0x6627e8d5u);
  CHECK(a[1] == 0xe169c58du);
  CHECK(a[2] == 0xbc57ac4cu);
  CHECK(a[3] == 0x9b00dbd8u);
  const Philox ones(~std::uint64_t{0});
  const auto b = ones({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
  CHECK(b[0] == 0x408f276du);
  CHECK(b[1] == 0x41c83b0eu);
  CHECK(b[2] == 0xa20bc7c6u);
  CHECK(b[3] == 0x6d5451fdu);
}

TEST_CASE("normal draws and substreams") {
  const Philox gen(substream_seed(42, "test"));
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n / 2; ++i) {
    const auto z = normal_pair(gen, 0, i);
    sum += z[0] + z[1];
    sq += z[0] * z[0] + z[1] * z[1];
  }
  CHECK(std::fabs(sum / n) < 0.01);
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(substream_seed(1, "a") != substream_seed(1, "b"));
  CHECK(substream_seed(1, "a") != substream_seed(2, "a"));
  CHECK(child_seed(7, 0) != child_seed(7, 1));
}

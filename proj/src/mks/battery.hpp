#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "mks/grid.hpp"
#include "mks/vec2.hpp"

namespace mks {

/// p(u) exp(-u^2 / (2 tau^2)) with p of degree <= 4; tau = infinity drops
/// the envelope.
struct GaussPoly {
  std::array<double, 5> coeffs{};
  double tau = std::numeric_limits<double>::infinity();

  double operator()(double u) const;
  GaussPoly derivative() const;
  /// Convolution with the centred normal density of standard deviation eps
  /// (degree <= 2 only).
  GaussPoly smoothed(double eps) const;
};

/// Separable test function w fx(x - cx) fy(y - cy).
struct TestFunction {
  std::string name;
  double weight = 1.0;
  Vec2 center;
  GaussPoly fx;
  GaussPoly fy;

  double value(Vec2 x) const;
  Vec2 gradient(Vec2 x) const;
  double laplacian(Vec2 x) const;
  /// V * phi for the gaussian mollifier of width eps.
  TestFunction smoothed(double eps) const;
  Field sample(const GridSpec& grid) const;
};

/// Fixed eight-function battery: constant, two centred tensor gaussians, a
/// shifted bump, and Hermite-windowed x, y, x^2 and x y.
const std::vector<TestFunction>& standard_battery();

}  // namespace mks

#include "mks/battery.hpp"

#include <cmath>
#include <stdexcept>

namespace mks {

double GaussPoly::operator()(double u) const {
  double p = 0.0;
  for (int i = 4; i >= 0; --i) p = p * u + coeffs[static_cast<std::size_t>(i)];
  if (std::isinf(tau)) return p;
  return p * std::exp(-u * u / (2.0 * tau * tau));
}

GaussPoly GaussPoly::derivative() const {
  // (p E)' = (p' - u p / tau^2) E
  GaussPoly d;
  d.tau = tau;
  for (std::size_t i = 1; i < 5; ++i) d.coeffs[i - 1] = static_cast<double>(i) * coeffs[i];
  if (!std::isinf(tau)) {
    const double inv = 1.0 / (tau * tau);
    if (coeffs[4] != 0.0) throw std::domain_error("GaussPoly::derivative: degree overflow");
    for (std::size_t i = 0; i < 4; ++i) d.coeffs[i + 1] -= inv * coeffs[i];
  }
  return d;
}

GaussPoly GaussPoly::smoothed(double eps) const {
  if (coeffs[3] != 0.0 || coeffs[4] != 0.0) throw std::domain_error("GaussPoly::smoothed: degree > 2");
  const double e2 = eps * eps;
  GaussPoly out;
  if (std::isinf(tau)) {
    out.coeffs = {coeffs[0] + coeffs[2] * e2, coeffs[1], coeffs[2], 0.0, 0.0};
    return out;
  }
  const double s2 = tau * tau;
  const double t2 = s2 + e2;
  const double r = std::sqrt(s2 / t2);
  const double shrink = s2 / t2;
  out.tau = std::sqrt(t2);
  out.coeffs[0] = r * (coeffs[0] + coeffs[2] * s2 * e2 / t2);
  out.coeffs[1] = r * coeffs[1] * shrink;
  out.coeffs[2] = r * coeffs[2] * shrink * shrink;
  return out;
}

double TestFunction::value(Vec2 x) const { return weight * fx(x.x - center.x) * fy(x.y - center.y); }

Vec2 TestFunction::gradient(Vec2 x) const {
  const double u = x.x - center.x;
  const double v = x.y - center.y;
  return {weight * fx.derivative()(u) * fy(v), weight * fx(u) * fy.derivative()(v)};
}

double TestFunction::laplacian(Vec2 x) const {
  const double u = x.x - center.x;
  const double v = x.y - center.y;
  return weight * (fx.derivative().derivative()(u) * fy(v) + fx(u) * fy.derivative().derivative()(v));
}

TestFunction TestFunction::smoothed(double eps) const {
  TestFunction out = *this;
  out.fx = fx.smoothed(eps);
  out.fy = fy.smoothed(eps);
  return out;
}

Field TestFunction::sample(const GridSpec& grid) const {
  Field f(grid);
  std::vector<double> ax(static_cast<std::size_t>(grid.n));
  std::vector<double> ay(static_cast<std::size_t>(grid.n));
  for (int j = 0; j < grid.n; ++j) {
    const Vec2 node = grid.node(j, j);
    ax[static_cast<std::size_t>(j)] = fx(node.x - center.x);
    ay[static_cast<std::size_t>(j)] = fy(node.y - center.y);
  }
  for (int j = 0; j < grid.n; ++j)
    for (int k = 0; k < grid.n; ++k) f(j, k) = weight * ax[static_cast<std::size_t>(j)] * ay[static_cast<std::size_t>(k)];
  return f;
}

const std::vector<TestFunction>& standard_battery() {
  static const std::vector<TestFunction> battery = [] {
    const auto poly = [](std::array<double, 5> c, double tau) { return GaussPoly{c, tau}; };
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<TestFunction> b;
    b.push_back({"constant", 1.0, {0.0, 0.0}, poly({1, 0, 0, 0, 0}, inf), poly({1, 0, 0, 0, 0}, inf)});
    b.push_back({"gauss_1", 1.0, {0.0, 0.0}, poly({1, 0, 0, 0, 0}, 1.0), poly({1, 0, 0, 0, 0}, 1.0)});
    b.push_back({"gauss_0.5", 1.0, {0.0, 0.0}, poly({1, 0, 0, 0, 0}, 0.5), poly({1, 0, 0, 0, 0}, 0.5)});
    b.push_back({"bump_shifted", 1.0, {0.8, -0.5}, poly({1, 0, 0, 0, 0}, 0.7), poly({1, 0, 0, 0, 0}, 0.7)});
    b.push_back({"hermite_x", 1.0, {0.0, 0.0}, poly({0, 1, 0, 0, 0}, 1.0), poly({1, 0, 0, 0, 0}, 1.0)});
    b.push_back({"hermite_y", 1.0, {0.0, 0.0}, poly({1, 0, 0, 0, 0}, 1.0), poly({0, 1, 0, 0, 0}, 1.0)});
    b.push_back({"hermite_xx", 1.0, {0.0, 0.0}, poly({0, 0, 1, 0, 0}, 1.0), poly({1, 0, 0, 0, 0}, 1.0)});
    b.push_back({"hermite_xy", 1.0, {0.0, 0.0}, poly({0, 1, 0, 0, 0}, 1.0), poly({0, 1, 0, 0, 0}, 1.0)});
    return b;
  }();
  return battery;
}

}  // namespace mks

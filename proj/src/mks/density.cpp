#include "mks/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mks {

namespace {

constexpr double kPi = std::numbers::pi;

int wrap(int j, int n) {
  const int r = j % n;
  return r < 0 ? r + n : r;
}

// Separable periodic deposit of gaussians with standard deviation eps and
// total weight `weight` per particle. Rows are processed independently so the
// accumulation order per node is the particle order for any thread count.
void deposit_gaussian(std::span<const Vec2> positions, double eps, double weight, Field& out) {
  const GridSpec& g = out.grid;
  const int n = g.n;
  const double h = g.h();
  const double radius = eps * std::sqrt(2.0 * 17.0 * std::log(10.0));
  const int w = std::min(static_cast<int>(std::ceil(radius / h)), n / 2 - 1);
  const double inv2e2 = 1.0 / (2.0 * eps * eps);
  const double amp = weight / (2.0 * kPi * eps * eps);
  const auto np = static_cast<std::int64_t>(positions.size());

  // Column factors per particle: gy[p][m] for k = k0[p] + m.
  const int width = 2 * w + 1;
  std::vector<int> j0(positions.size()), k0(positions.size());
  std::vector<double> gy(positions.size() * width);
  for (std::int64_t p = 0; p < np; ++p) {
    const Vec2 x = positions[p];
    const int jc = static_cast<int>(std::lround((x.x + g.half_extent) / h));
    const int kc = static_cast<int>(std::lround((x.y + g.half_extent) / h));
    j0[p] = jc - w;
    k0[p] = kc - w;
    for (int m = 0; m < width; ++m) {
      const double dy = -g.half_extent + (k0[p] + m) * h - x.y;
      gy[p * width + m] = std::exp(-dy * dy * inv2e2);
    }
  }

#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    double* row = &out.values[static_cast<std::size_t>(j) * n];
    for (std::int64_t p = 0; p < np; ++p) {
      // Unwrapped row index of node j relative to this particle's window.
      int offset = wrap(j - j0[p], n);
      if (offset >= width) continue;
      const double dx = -g.half_extent + (j0[p] + offset) * h - positions[p].x;
      const double gx = amp * std::exp(-dx * dx * inv2e2);
      const double* col = &gy[p * width];
      for (int m = 0; m < width; ++m) row[wrap(k0[p] + m, n)] += gx * col[m];
    }
  }
}

void deposit_bump(std::span<const Vec2> positions, const MollifierSpec& spec, double weight, Field& out) {
  const GridSpec& g = out.grid;
  const int n = g.n;
  const double h = g.h();
  const double radius = spec.epsilon();
  const int w = std::min(static_cast<int>(std::ceil(radius / h)), n / 2 - 1);
  const int width = 2 * w + 1;
  const auto np = static_cast<std::int64_t>(positions.size());
  std::vector<int> j0(positions.size()), k0(positions.size());
  for (std::int64_t p = 0; p < np; ++p) {
    j0[p] = static_cast<int>(std::lround((positions[p].x + g.half_extent) / h)) - w;
    k0[p] = static_cast<int>(std::lround((positions[p].y + g.half_extent) / h)) - w;
  }
  const double s = spec.scale();

#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    double* row = &out.values[static_cast<std::size_t>(j) * n];
    for (std::int64_t p = 0; p < np; ++p) {
      const int offset = wrap(j - j0[p], n);
      if (offset >= width) continue;
      const double dx = -g.half_extent + (j0[p] + offset) * h - positions[p].x;
      for (int m = 0; m < width; ++m) {
        const double dy = -g.half_extent + (k0[p] + m) * h - positions[p].y;
        const double r2 = (dx * dx + dy * dy) * s * s;
        row[wrap(k0[p] + m, n)] += weight * s * s * base_profile(r2, ProfileKind::bump, spec.width);
      }
    }
  }
}

template <class F>
double spectral_sum(const SpectralField& a, const SpectralField& b, F weight) {
  const GridSpec& g = a.grid;
  double sum = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const double kx = g.wavenumber(j);
    for (int k = 0; k < g.n; ++k) {
      const double ky = g.wavenumber(k);
      sum += weight(kx * kx + ky * ky) * (a(j, k) * std::conj(b(j, k))).real();
    }
  }
  return sum * g.cell_area() / static_cast<double>(g.size());
}

}  // namespace

EmpiricalField mollified_empirical(std::span<const Vec2> positions, const MollifierSpec& spec, const GridSpec& grid,
                                   double mass, DepositMethod method) {
  grid.validate();
  spec.validate();
  EmpiricalField result{Field(grid), false};
  if (positions.empty()) return result;
  const double weight = mass / static_cast<double>(positions.size());
  const double margin = grid.half_extent - spec.support_radius();
  for (const Vec2& p : positions) {
    if (!p.finite()) throw std::invalid_argument("mollified_empirical: non-finite particle position");
    if (std::fabs(p.x) > margin || std::fabs(p.y) > margin) result.truncated = true;
  }

  if (spec.profile == ProfileKind::bump) {
    deposit_bump(positions, spec, weight, result.field);
    return result;
  }
  const double eps = spec.epsilon();
  const double tau = 2.5 * grid.h();
  if (method == DepositMethod::direct || eps < 1.2 * tau) {
    deposit_gaussian(positions, eps, weight, result.field);
    return result;
  }
  Field narrow(grid);
  deposit_gaussian(positions, tau, weight, narrow);
  SpectralField s = forward(narrow);
  const double var = 0.5 * (eps * eps - tau * tau);
  apply_multiplier(s, [var](double kx, double ky) { return std::exp(-var * (kx * kx + ky * ky)); });
  result.field = inverse(s);
  return result;
}

double h_norm(const Field& field, double s) {
  const SpectralField f = forward(field);
  const double sum = spectral_sum(f, f, [s](double xi2) { return std::pow(1.0 + xi2, s); });
  return std::sqrt(std::max(sum, 0.0));
}

double local_window(double r, double radius) {
  if (r <= radius) return 1.0;
  const double outer = 1.2 * radius;
  if (r >= outer) return 0.0;
  const double t = (r - radius) / (outer - radius);
  const double a = std::exp(-1.0 / (1.0 - t));
  const double b = std::exp(-1.0 / t);
  return a / (a + b);
}

double h_local_norm(const Field& field, double s, double radius) {
  if (!(radius > 0.0) || radius >= field.grid.half_extent)
    throw std::invalid_argument("h_local_norm: radius must lie in (0, half_extent)");
  Field windowed = field;
  for (int j = 0; j < field.grid.n; ++j)
    for (int k = 0; k < field.grid.n; ++k) windowed(j, k) *= local_window(field.grid.node(j, k).norm(), radius);
  return h_norm(windowed, s);
}

double lp_norm(const Field& field, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) return field.max_abs();
  double sum = 0.0;
  if (p == 1.0)
    for (double v : field.values) sum += std::fabs(v);
  else if (p == 2.0)
    for (double v : field.values) sum += v * v;
  else
    for (double v : field.values) sum += std::pow(std::fabs(v), p);
  return std::pow(sum * field.grid.cell_area(), 1.0 / p);
}

double h_pairing(const Field& f, const Field& g, double beta) {
  if (!(f.grid == g.grid)) throw std::invalid_argument("h_pairing: grid mismatch");
  return h_pairing(forward(f), forward(g), beta);
}

double h_pairing(const SpectralField& f, const SpectralField& g, double beta) {
  if (!(f.grid == g.grid)) throw std::invalid_argument("h_pairing: grid mismatch");
  return spectral_sum(f, g, [beta](double xi2) { return std::pow(1.0 + xi2, beta); });
}

double l2_inner(const Field& f, const Field& g) {
  if (!(f.grid == g.grid)) throw std::invalid_argument("l2_inner: grid mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) sum += f.values[i] * g.values[i];
  return sum * f.grid.cell_area();
}

double boundary_mass(const Field& field, double width) {
  const GridSpec& g = field.grid;
  const double inner = g.half_extent - width;
  double sum = 0.0;
  for (int j = 0; j < g.n; ++j)
    for (int k = 0; k < g.n; ++k) {
      const Vec2 x = g.node(j, k);
      if (std::fabs(x.x) > inner || std::fabs(x.y) > inner) sum += std::fabs(field(j, k));
    }
  return sum * g.cell_area();
}

}  // namespace mks

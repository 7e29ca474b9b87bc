#include "mks/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mks/fft.hpp"

namespace mks {

void GridSpec::validate() const {
  if (!(half_extent > 0.0) || !std::isfinite(half_extent)) throw std::invalid_argument("grid half_extent must be > 0");
  if (n < 16 || (n & (n - 1)) != 0) throw std::invalid_argument("grid n must be a power of two >= 16");
}

double GridSpec::wavenumber(int j) const { return std::numbers::pi * mode(j) / half_extent; }

Field::Field(const GridSpec& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw std::invalid_argument("Field: value count does not match grid");
}

Field& Field::operator+=(const Field& o) {
  if (!(grid == o.grid)) throw std::invalid_argument("Field: grid mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  if (!(grid == o.grid)) throw std::invalid_argument("Field: grid mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values) v *= s;
  return *this;
}

double Field::integral() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * grid.cell_area();
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::fabs(v));
  return m;
}

double Field::min() const { return *std::min_element(values.begin(), values.end()); }
double Field::max() const { return *std::max_element(values.begin(), values.end()); }

bool Field::finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

Field operator-(Field a, const Field& b) { return a -= b; }
Field operator+(Field a, const Field& b) { return a += b; }
Field operator*(double s, Field a) { return a *= s; }

Field sample(const GridSpec& grid, const std::function<double(Vec2)>& f) {
  Field out(grid);
  for (int j = 0; j < grid.n; ++j)
    for (int k = 0; k < grid.n; ++k) out(j, k) = f(grid.node(j, k));
  return out;
}

SpectralField forward(const Field& f) {
  std::vector<std::complex<double>> in(f.values.begin(), f.values.end());
  SpectralField s{f.grid, std::vector<std::complex<double>>(f.values.size())};
  fft::transform_2d(f.grid.n, in, s.coeffs, false);
  return s;
}

Field inverse(const SpectralField& s) {
  std::vector<std::complex<double>> out(s.coeffs.size());
  fft::transform_2d(s.grid.n, s.coeffs, out, true);
  Field f(s.grid);
  const double scale = 1.0 / static_cast<double>(s.coeffs.size());
  for (std::size_t i = 0; i < out.size(); ++i) f.values[i] = out[i].real() * scale;
  return f;
}

void apply_multiplier(SpectralField& s, const std::function<double(double, double)>& m) {
  const int n = s.grid.n;
  for (int j = 0; j < n; ++j) {
    const double kx = s.grid.wavenumber(j);
    for (int k = 0; k < n; ++k) s(j, k) *= m(kx, s.grid.wavenumber(k));
  }
}

}  // namespace mks

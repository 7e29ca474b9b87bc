#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "mks/vec2.hpp"

namespace mks {

/// Uniform periodic grid on [-L, L)^2 with n nodes per axis (n a power of
/// two, n >= 16). Node (j, k) sits at (-L + j h, -L + k h), h = 2L/n.
struct GridSpec {
  double half_extent = 10.0;
  int n = 256;

  void validate() const;
  double h() const { return 2.0 * half_extent / n; }
  double cell_area() const { return h() * h(); }
  std::size_t size() const { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }
  Vec2 node(int j, int k) const { return {-half_extent + j * h(), -half_extent + k * h()}; }
  /// Angular wavenumber of DFT index j in standard ordering: pi * j' / L with
  /// j' = j for j < n/2 and j - n otherwise.
  double wavenumber(int j) const;
  /// Signed integer mode of index j.
  int mode(int j) const { return j < n / 2 ? j : j - n; }
  bool operator==(const GridSpec&) const = default;
};

/// Real samples on a grid, row-major in (j, k).
struct Field {
  GridSpec grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const GridSpec& g) : grid(g), values(g.size(), 0.0) {}
  Field(const GridSpec& g, std::vector<double> v);

  double& operator()(int j, int k) { return values[static_cast<std::size_t>(j) * grid.n + k]; }
  double operator()(int j, int k) const { return values[static_cast<std::size_t>(j) * grid.n + k]; }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
  /// Sum of values times the cell area.
  double integral() const;
  double max_abs() const;
  double min() const;
  double max() const;
  bool finite() const;
};

Field operator-(Field a, const Field& b);
Field operator+(Field a, const Field& b);
Field operator*(double s, Field a);

/// Samples f at every node.
Field sample(const GridSpec& grid, const std::function<double(Vec2)>& f);

/// Discrete Fourier coefficients (forward transform unnormalised, standard
/// ordering). Real fields give Hermitian-symmetric coefficients.
struct SpectralField {
  GridSpec grid;
  std::vector<std::complex<double>> coeffs;

  std::complex<double>& operator()(int j, int k) { return coeffs[static_cast<std::size_t>(j) * grid.n + k]; }
  const std::complex<double>& operator()(int j, int k) const {
    return coeffs[static_cast<std::size_t>(j) * grid.n + k];
  }
};

SpectralField forward(const Field& f);
/// Inverse transform with the 1/n^2 factor; keeps the real part.
Field inverse(const SpectralField& s);

/// Applies m(xi_x, xi_y) to the spectrum in place.
void apply_multiplier(SpectralField& s, const std::function<double(double, double)>& m);

}  // namespace mks

#pragma once

#include <span>

#include "mks/grid.hpp"
#include "mks/kernel.hpp"
#include "mks/vec2.hpp"

namespace mks {

enum class DepositMethod {
  /// Exact sum of V^N over every node inside the kernel support.
  direct,
  /// Gaussian profile only: spread each particle with a narrow gaussian of
  /// width 2.5 h, then convolve with the remaining gaussian spectrally.
  /// Falls back to direct when V^N is too narrow or not gaussian.
  fast,
};

struct EmpiricalField {
  Field field;
  /// Set when a particle lies within one kernel support radius of the
  /// boundary (its mass wraps around the torus).
  bool truncated = false;
};

/// x -> (mass/N) sum_k V^N(x - X_k) on the periodic grid.
EmpiricalField mollified_empirical(std::span<const Vec2> positions, const MollifierSpec& spec, const GridSpec& grid,
                                   double mass, DepositMethod method = DepositMethod::direct);

/// Bessel-potential norm ( sum (1 + |xi|^2)^s |u_hat|^2 h^2/n^2 )^{1/2};
/// s = 0 gives the grid L2 norm.
double h_norm(const Field& field, double s);

/// Smooth window equal to 1 on B(0, radius), 0 outside B(0, 1.2 radius).
double local_window(double r, double radius);

/// h_norm of the windowed field: an upper-bound proxy for the restriction
/// norm on the ball.
double h_local_norm(const Field& field, double s, double radius);

/// Grid quadrature (h^2 sum |u|^p)^{1/p}; max |u| for p = infinity.
double lp_norm(const Field& field, double p);

/// Real part of sum (1 + |xi|^2)^beta f_hat conj(g_hat) h^2/n^2.
double h_pairing(const Field& f, const Field& g, double beta);
/// Same pairing on precomputed spectra.
double h_pairing(const SpectralField& f, const SpectralField& g, double beta);

/// Grid L2 inner product h^2 sum f g.
double l2_inner(const Field& f, const Field& g);

/// Mass within `width` of the boundary of the domain.
double boundary_mass(const Field& field, double width);

}  // namespace mks

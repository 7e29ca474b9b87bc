#pragma once

#include <cstdint>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "mks/vec2.hpp"

namespace mks {

/// Level A > 0 of the smooth drift cutoff.
struct CutoffParams {
  double A = 1.0;

  void validate() const;
};

enum class ProfileKind { gaussian, bump };

/// Scaled mollifier V^N(x) = N^{2 alpha} V(N^alpha x) built from an even base
/// profile V. For the gaussian profile `width` is the per-component standard
/// deviation; for the bump profile it is the support radius.
struct MollifierSpec {
  double alpha = 0.15;
  std::int64_t n_particles = 1;
  ProfileKind profile = ProfileKind::gaussian;
  double width = 1.0;

  void validate() const;
  /// N^alpha.
  double scale() const;
  /// Base width divided by N^alpha: the standard deviation (gaussian) or the
  /// support radius (bump) of V^N.
  double epsilon() const;
  /// Radius beyond which V^N is below 1e-17 of its peak (gaussian) or
  /// exactly zero (bump).
  double support_radius() const;
};

/// G(x) = -(1/2pi) log|x|^2. Throws std::domain_error at the origin.
double green(Vec2 x);

/// Exact gradient of green, -x/(pi |x|^2), times kernel_scale.
Vec2 grad_green(Vec2 x, double kernel_scale = 1.0);

/// Analytic Hessian of green times kernel_scale. Symmetric and trace free.
Mat2 hess_green(Vec2 x, double kernel_scale = 1.0);

/// Hessian matrix in the unnormalised form ((-2|x|^2 + 4 x_i^2)/|x|^4, 4 x_1 x_2/|x|^4)
/// that corresponds to the potential -log|x|^2. It equals 2 pi * hess_green(x).
Mat2 hess_green_unnormalized(Vec2 x);

/// Quintic blend q(t) = t - 6t^3 + 8t^4 - 3t^5 joining the identity to the
/// constant cap on [0, 1].
double cutoff_blend(double t);

/// Scalar C^2 cutoff: identity on [-A, A], sign(v) A beyond A + 1.
double f_a(double v, const CutoffParams& params);

/// Derivative of f_a.
double f_a_derivative(double v, const CutoffParams& params);

/// Componentwise f_a.
Vec2 cutoff(Vec2 v, const CutoffParams& params);

/// Base profile V evaluated at |x|^2 = r2 (unscaled).
double base_profile(double r2, ProfileKind profile, double width);

/// N^{2 alpha} V(N^alpha x).
double mollifier_value(Vec2 x, const MollifierSpec& spec);

/// Mollified interaction kernel K^N = grad G * V^N.
///
/// Both profiles are radial, so K^N(x) = -x m(N^alpha |x|) / (pi |x|^2) where
/// m(r) is the base-profile mass inside radius r. The gaussian mass has a
/// closed form; the bump mass is tabulated once at construction and
/// interpolated with a cubic spline in m(r)/r^2, which is smooth and even.
class MollifiedKernel {
 public:
  explicit MollifiedKernel(const MollifierSpec& spec, double kernel_scale = 1.0);
  ~MollifiedKernel();
  MollifiedKernel(const MollifiedKernel&);
  MollifiedKernel& operator=(const MollifiedKernel&);
  MollifiedKernel(MollifiedKernel&&) noexcept;
  MollifiedKernel& operator=(MollifiedKernel&&) noexcept;

  Vec2 operator()(Vec2 x) const;

  /// Radial factor k(r2) with K^N(x) = -x k(|x|^2).
  double radial_factor(double r2) const {
    if (bump_) return bump_radial_factor(r2);
    const double z = r2 * inv_two_eps2_;
    // Removable singularity: (1 - exp(-z)) / z ~ 1 - z/2.
    if (z < 1e-8) return kernel_scale_ * inv_two_eps2_ * (1.0 - 0.5 * z) / std::numbers::pi;
    // Beyond z = 38, 1 - exp(-z) rounds to 1.
    if (z > 38.0) return kernel_scale_ / (std::numbers::pi * r2);
    const double mass = z < 0.5 ? -std::expm1(-z) : 1.0 - std::exp(-z);
    return kernel_scale_ * mass / (std::numbers::pi * r2);
  }

  /// Bound on |K^N(x) - grad_green(x)| for |x| >= r.
  double tail_bound(double r) const;

  const MollifierSpec& spec() const { return spec_; }
  double kernel_scale() const { return kernel_scale_; }

 private:
  struct BumpTable;

  double bump_radial_factor(double r2) const;

  MollifierSpec spec_;
  double kernel_scale_;
  double inv_two_eps2_ = 0.0;
  double eps_ = 0.0;
  std::unique_ptr<BumpTable> bump_;
};

/// Convenience wrapper building a MollifiedKernel per call.
Vec2 mollified_grad_green(Vec2 x, const MollifierSpec& spec, double kernel_scale = 1.0);

}  // namespace mks

#include "mks/kernel.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mks {

namespace {

constexpr double kPi = std::numbers::pi;

// Number of uniform radial nodes in the bump mass table.
constexpr std::size_t kBumpTableNodes = 4097;

double bump_shape(double r2, double radius) {
  const double u = r2 / (radius * radius);
  if (u >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u));
}

}  // namespace

void CutoffParams::validate() const {
  if (!(A > 0.0) || !std::isfinite(A)) throw std::invalid_argument("cutoff level A must be finite and > 0");
}

void MollifierSpec::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("mollifier alpha must lie in (0, 1]");
  if (n_particles < 1) throw std::invalid_argument("mollifier n_particles must be >= 1");
  if (!(width > 0.0) || !std::isfinite(width)) throw std::invalid_argument("mollifier width must be finite and > 0");
}

double MollifierSpec::scale() const { return std::pow(static_cast<double>(n_particles), alpha); }

double MollifierSpec::epsilon() const { return width / scale(); }

double MollifierSpec::support_radius() const {
  if (profile == ProfileKind::bump) return epsilon();
  // exp(-r^2 / (2 eps^2)) < 1e-17
  return epsilon() * std::sqrt(2.0 * 17.0 * std::log(10.0));
}

double green(Vec2 x) {
  const double r2 = x.norm2();
  if (r2 == 0.0) throw std::domain_error("green: logarithmic singularity at the origin");
  return -std::log(r2) / (2.0 * kPi);
}

Vec2 grad_green(Vec2 x, double kernel_scale) {
  const double r2 = x.norm2();
  if (r2 == 0.0) throw std::domain_error("grad_green: singular at the origin");
  const double c = -kernel_scale / (kPi * r2);
  return {c * x.x, c * x.y};
}

Mat2 hess_green(Vec2 x, double kernel_scale) {
  const double r2 = x.norm2();
  if (r2 == 0.0) throw std::domain_error("hess_green: singular at the origin");
  const double c = kernel_scale / (kPi * r2 * r2);
  const double off = 2.0 * x.x * x.y * c;
  return {(x.x * x.x - x.y * x.y) * c, off, off, (x.y * x.y - x.x * x.x) * c};
}

Mat2 hess_green_unnormalized(Vec2 x) {
  const double r2 = x.norm2();
  if (r2 == 0.0) throw std::domain_error("hess_green_unnormalized: singular at the origin");
  const double r4 = r2 * r2;
  const double off = 4.0 * x.x * x.y / r4;
  return {(-2.0 * r2 + 4.0 * x.x * x.x) / r4, off, off, (-2.0 * r2 + 4.0 * x.y * x.y) / r4};
}

double cutoff_blend(double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return t + t3 * (-6.0 + t * (8.0 - 3.0 * t));
}

double f_a(double v, const CutoffParams& params) {
  const double a = params.A;
  const double m = std::fabs(v);
  if (m <= a) return v;
  const double capped = m >= a + 1.0 ? a : a + cutoff_blend(m - a);
  return std::copysign(capped, v);
}

double f_a_derivative(double v, const CutoffParams& params) {
  const double m = std::fabs(v);
  if (m <= params.A) return 1.0;
  if (m >= params.A + 1.0) return 0.0;
  const double t = m - params.A;
  const double t2 = t * t;
  return 1.0 + t2 * (-18.0 + t * (32.0 - 15.0 * t));
}

Vec2 cutoff(Vec2 v, const CutoffParams& params) { return {f_a(v.x, params), f_a(v.y, params)}; }

double base_profile(double r2, ProfileKind profile, double width) {
  if (profile == ProfileKind::gaussian) {
    const double s2 = width * width;
    return std::exp(-r2 / (2.0 * s2)) / (2.0 * kPi * s2);
  }
  // Normalisation of the bump: 2 pi int_0^R exp(-1/(1 - r^2/R^2)) r dr = pi R^2 I
  // with I = int_0^1 exp(-1/(1-u)) du.
  static const double unit_integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [](double u) { return u >= 1.0 ? 0.0 : std::exp(-1.0 / (1.0 - u)); }, 0.0, 1.0, 15, 1e-15);
  return bump_shape(r2, width) / (kPi * width * width * unit_integral);
}

double mollifier_value(Vec2 x, const MollifierSpec& spec) {
  const double s = spec.scale();
  return s * s * base_profile(x.norm2() * s * s, spec.profile, spec.width);
}

struct MollifiedKernel::BumpTable {
  double radius;
  double step;
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline;
};

MollifiedKernel::MollifiedKernel(const MollifierSpec& spec, double kernel_scale)
    : spec_(spec), kernel_scale_(kernel_scale) {
  spec_.validate();
  eps_ = spec_.epsilon();
  inv_two_eps2_ = 1.0 / (2.0 * eps_ * eps_);
  if (spec_.profile != ProfileKind::bump) return;

  // Tabulate f(r) = m(r)/r^2 in base units, m(r) = 2 pi int_0^r V(s) s ds.
  const double radius = spec_.width;
  const double step = radius / static_cast<double>(kBumpTableNodes - 1);
  std::vector<double> values(kBumpTableNodes);
  const double v0 = base_profile(0.0, ProfileKind::bump, radius);
  values[0] = kPi * v0;
  double mass = 0.0;
  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (std::size_t i = 1; i < kBumpTableNodes; ++i) {
    const double a = step * static_cast<double>(i - 1);
    const double b = step * static_cast<double>(i);
    mass += Quad::integrate(
        [&](double s) { return 2.0 * kPi * s * base_profile(s * s, ProfileKind::bump, radius); }, a, b, 0);
    values[i] = mass / (b * b);
  }
  // f is even, so f'(0) = 0; V vanishes at the rim, so f'(R) = -2 m(R)/R^3.
  const double right_slope = -2.0 * mass / (radius * radius * radius);
  bump_ = std::make_unique<BumpTable>(BumpTable{
      radius, step,
      boost::math::interpolators::cardinal_cubic_b_spline<double>(values.begin(), values.end(), 0.0, step, 0.0,
                                                                  right_slope)});
}

MollifiedKernel::~MollifiedKernel() = default;
MollifiedKernel::MollifiedKernel(const MollifiedKernel& o)
    : spec_(o.spec_),
      kernel_scale_(o.kernel_scale_),
      inv_two_eps2_(o.inv_two_eps2_),
      eps_(o.eps_),
      bump_(o.bump_ ? std::make_unique<BumpTable>(*o.bump_) : nullptr) {}
MollifiedKernel& MollifiedKernel::operator=(const MollifiedKernel& o) {
  if (this != &o) *this = MollifiedKernel(o);
  return *this;
}
MollifiedKernel::MollifiedKernel(MollifiedKernel&&) noexcept = default;
MollifiedKernel& MollifiedKernel::operator=(MollifiedKernel&&) noexcept = default;

double MollifiedKernel::bump_radial_factor(double r2) const {
  const double s = spec_.scale();
  const double r_base = std::sqrt(r2) * s;
  if (r_base >= bump_->radius) return kernel_scale_ / (kPi * r2);
  return kernel_scale_ * bump_->spline(r_base) * s * s / kPi;
}

Vec2 MollifiedKernel::operator()(Vec2 x) const {
  const double k = radial_factor(x.norm2());
  return {-k * x.x, -k * x.y};
}

double MollifiedKernel::tail_bound(double r) const {
  if (r <= 0.0) return std::numeric_limits<double>::infinity();
  if (bump_) return r >= eps_ ? 0.0 : kernel_scale_ / (kPi * r);
  return kernel_scale_ * std::exp(-r * r * inv_two_eps2_) / (kPi * r);
}

Vec2 mollified_grad_green(Vec2 x, const MollifierSpec& spec, double kernel_scale) {
  return MollifiedKernel(spec, kernel_scale)(x);
}

}  // namespace mks

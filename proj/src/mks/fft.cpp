#include "mks/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace mks::fft {

namespace {

enum class Kind { c2c_forward, c2c_inverse, r2c, c2r };

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Plan {
  void* in = nullptr;
  void* out = nullptr;
  fftw_plan plan = nullptr;

  Plan(int n, Kind kind) {
    const std::lock_guard lock(planner_mutex());
    const auto full = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    const auto half = static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1);
    switch (kind) {
      case Kind::c2c_forward:
      case Kind::c2c_inverse: {
        auto* a = fftw_alloc_complex(full);
        auto* b = fftw_alloc_complex(full);
        in = a;
        out = b;
        plan = fftw_plan_dft_2d(n, n, a, b, kind == Kind::c2c_inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
        break;
      }
      case Kind::r2c: {
        auto* a = fftw_alloc_real(full);
        auto* b = fftw_alloc_complex(half);
        in = a;
        out = b;
        plan = fftw_plan_dft_r2c_2d(n, n, a, b, FFTW_ESTIMATE);
        break;
      }
      case Kind::c2r: {
        auto* a = fftw_alloc_complex(half);
        auto* b = fftw_alloc_real(full);
        in = a;
        out = b;
        plan = fftw_plan_dft_c2r_2d(n, n, a, b, FFTW_ESTIMATE);
        break;
      }
    }
    if (!plan) throw std::runtime_error("fftw: planning failed");
  }
  ~Plan() {
    const std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
};

Plan& plan_for(int n, Kind kind) {
  thread_local std::map<std::pair<int, Kind>, std::unique_ptr<Plan>> cache;
  auto& slot = cache[{n, kind}];
  if (!slot) slot = std::make_unique<Plan>(n, kind);
  return *slot;
}

std::size_t full_size(int n) { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }
std::size_t half_size(int n) { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1); }

}  // namespace

void transform_2d(int n, std::span<const std::complex<double>> in, std::span<std::complex<double>> out,
                  bool inverse) {
  const auto count = full_size(n);
  if (in.size() != count || out.size() != count) throw std::invalid_argument("fft: buffer size mismatch");
  Plan& p = plan_for(n, inverse ? Kind::c2c_inverse : Kind::c2c_forward);
  std::memcpy(p.in, in.data(), count * sizeof(fftw_complex));
  fftw_execute(p.plan);
  std::memcpy(static_cast<void*>(out.data()), p.out, count * sizeof(fftw_complex));
}

void forward_real_2d(int n, std::span<const double> in, std::span<std::complex<double>> out) {
  if (in.size() != full_size(n) || out.size() != half_size(n)) throw std::invalid_argument("fft: buffer size mismatch");
  Plan& p = plan_for(n, Kind::r2c);
  std::memcpy(p.in, in.data(), in.size() * sizeof(double));
  fftw_execute(p.plan);
  std::memcpy(static_cast<void*>(out.data()), p.out, out.size() * sizeof(fftw_complex));
}

void inverse_real_2d(int n, std::span<const std::complex<double>> in, std::span<double> out) {
  if (in.size() != half_size(n) || out.size() != full_size(n)) throw std::invalid_argument("fft: buffer size mismatch");
  Plan& p = plan_for(n, Kind::c2r);
  std::memcpy(p.in, in.data(), in.size() * sizeof(fftw_complex));  // c2r overwrites its input
  fftw_execute(p.plan);
  std::memcpy(out.data(), p.out, out.size() * sizeof(double));
}

}  // namespace mks::fft

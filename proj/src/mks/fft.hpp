#pragma once

#include <complex>
#include <span>

namespace mks::fft {

/// 2-d complex DFT of an n x n array through FFTW. Plans are created once per
/// (kind, n) and thread; creation is serialised because the FFTW planner is
/// not thread safe. FFTW_ESTIMATE planning keeps results reproducible from
/// run to run.
void transform_2d(int n, std::span<const std::complex<double>> in, std::span<std::complex<double>> out,
                  bool inverse);

/// Real-to-half-complex forward DFT: n x n reals to n x (n/2 + 1) coefficients.
void forward_real_2d(int n, std::span<const double> in, std::span<std::complex<double>> out);

/// Half-complex-to-real inverse DFT without the 1/n^2 factor.
void inverse_real_2d(int n, std::span<const std::complex<double>> in, std::span<double> out);

}  // namespace mks::fft

#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace fnls::fft {

using cplx = std::complex<double>;

constexpr int kForward = -1;
constexpr int kBackward = +1;

// Unnormalized in-place DFT, sum_j x_j exp(sign * 2 pi i j k / n).
void transform(std::span<cplx> data, int sign);

// Row-major n0 x n1 array, unnormalized, in place.
void transform_2d(std::span<cplx> data, std::size_t n0, std::size_t n1, int sign);

}  // namespace fnls::fft

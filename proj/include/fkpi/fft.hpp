#pragma once

#include <complex>
#include <span>
#include <vector>

namespace fkpi::fft {

/// Direction of a discrete Fourier transform. Forward uses e^{-i k x}.
enum class Direction { forward, backward };

/// Unnormalized in-place multi-dimensional complex DFT (row-major dims).
/// Plans are cached per (dims, direction); planning is serialized, execution is reentrant.
void transform(std::span<const int> dims, std::span<std::complex<double>> data, Direction dir);

inline void transform_2d(int n0, int n1, std::span<std::complex<double>> data, Direction dir) {
  const int dims[2] = {n0, n1};
  transform(dims, data, dir);
}

inline void transform_3d(int n0, int n1, int n2, std::span<std::complex<double>> data,
                         Direction dir) {
  const int dims[3] = {n0, n1, n2};
  transform(dims, data, dir);
}

}  // namespace fkpi::fft

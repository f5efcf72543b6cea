#pragma once

#include <complex>
#include <span>
#include <vector>

namespace kp5 {

using cplx = std::complex<double>;

/// In-place complex FFTs over contiguous row-major arrays, backed by FFTW.
///
/// Plans are created once per shape and cached process-wide; creation is
/// serialized, execution is reentrant. Transforms are unnormalized and use
/// FFTW's sign conventions: forward is e^{-i k x}, backward is e^{+i k x}.
namespace fft {

enum class Direction { Forward, Backward };

/// Multidimensional transform of an array with the given extents.
void transform(std::span<cplx> data, std::span<const int> dims, Direction dir);

inline void transform_1d(std::span<cplx> data, Direction dir) {
  const int n = static_cast<int>(data.size());
  transform(data, std::span<const int>(&n, 1), dir);
}

inline void transform_2d(std::span<cplx> data, int n0, int n1, Direction dir) {
  const int dims[2] = {n0, n1};
  transform(data, dims, dir);
}

/// Batched 1D transform along the slowest axis of an [n x batch] array,
/// i.e. `batch` interleaved series of length n with stride `batch`.
void transform_strided(std::span<cplx> data, int n, int batch, Direction dir);

}  // namespace fft
}  // namespace kp5

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "kp5/fft.hpp"

namespace kp5 {

/// Periodic box [-Lx/2, Lx/2) x [-Ly/2, Ly/2) with nx x ny nodes.
///
/// Arrays over the grid are row-major with x slowest: index(m, n) = m * ny + n.
/// Spectral arrays use FFT order with the same layout; the signed mode number
/// of index j is j for j < nx/2 and j - nx otherwise, so the symmetric range is
/// -nx/2 .. nx/2 - 1 and -nx/2 is the Nyquist mode.
class Grid2D {
 public:
  Grid2D(int nx, int ny, double lx, double ly);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double dx() const { return lx_ / nx_; }
  double dy() const { return ly_ / ny_; }
  double dxi() const;
  double deta() const;
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t index(int m, int n) const { return static_cast<std::size_t>(m) * ny_ + n; }

  double x(int m) const { return -0.5 * lx_ + m * dx(); }
  double y(int n) const { return -0.5 * ly_ + n * dy(); }
  /// Row index of y = 0.
  int y0_index() const { return ny_ / 2; }
  int x0_index() const { return nx_ / 2; }

  int mode_x(int j) const { return j < nx_ / 2 ? j : j - nx_; }
  int mode_y(int k) const { return k < ny_ / 2 ? k : k - ny_; }
  /// FFT-order index of a signed mode number.
  int index_x(int mode) const { return mode >= 0 ? mode : mode + nx_; }
  int index_y(int mode) const { return mode >= 0 ? mode : mode + ny_; }
  double xi(int j) const { return mode_x(j) * dxi(); }
  double eta(int k) const { return mode_y(k) * deta(); }
  bool nyquist_x(int j) const { return j == nx_ / 2; }
  bool nyquist_y(int k) const { return k == ny_ / 2; }

  bool operator==(const Grid2D& o) const {
    return nx_ == o.nx_ && ny_ == o.ny_ && lx_ == o.lx_ && ly_ == o.ly_;
  }

 private:
  int nx_;
  int ny_;
  double lx_;
  double ly_;
};

/// Samples of the continuous Fourier transform
///   u^(xi, eta) = \int u(x, y) e^{-i(x xi + y eta)} dx dy
/// at the grid frequencies. The inverse is u = (Lx Ly)^{-1} sum u^ e^{i(...)}.
struct SpectralField2D {
  Grid2D grid;
  std::vector<cplx> coeffs;

  explicit SpectralField2D(const Grid2D& g) : grid(g), coeffs(g.size()) {}
  SpectralField2D(const Grid2D& g, std::vector<cplx> c);

  cplx& at(int j, int k) { return coeffs[grid.index(j, k)]; }
  const cplx& at(int j, int k) const { return coeffs[grid.index(j, k)]; }
  /// Access by signed mode numbers.
  cplx& mode(int mx, int my) { return at(grid.index_x(mx), grid.index_y(my)); }
  const cplx& mode(int mx, int my) const { return at(grid.index_x(mx), grid.index_y(my)); }

  SpectralField2D& operator+=(const SpectralField2D& o);
  SpectralField2D& operator-=(const SpectralField2D& o);
  SpectralField2D& operator*=(cplx c);
};

SpectralField2D operator+(SpectralField2D a, const SpectralField2D& b);
SpectralField2D operator-(SpectralField2D a, const SpectralField2D& b);
SpectralField2D operator*(cplx c, SpectralField2D a);

/// Exact discrete transform of grid samples; throws on a size mismatch.
SpectralField2D forward_transform(const Grid2D& grid, std::span<const double> values);
SpectralField2D forward_transform(const Grid2D& grid, std::span<const cplx> values);
/// Real part of the inverse transform.
std::vector<double> inverse_transform(const SpectralField2D& field);
std::vector<cplx> inverse_transform_complex(const SpectralField2D& field);

/// In-place versions on a raw coefficient buffer laid out as in SpectralField2D.
void forward_in_place(const Grid2D& grid, std::span<cplx> buf);
void inverse_in_place(const Grid2D& grid, std::span<cplx> buf);

/// omega(xi, eta) = xi^5 - eta^2 / xi, phase speed of the free group.
/// Throws a domain error at xi = 0.
double dispersion_symbol(double xi, double eta);

/// Zeroes the xi = 0 column; every other mode is untouched.
SpectralField2D project_zero_mode(SpectralField2D field);
/// Zeroes the Nyquist row and column.
SpectralField2D drop_nyquist(SpectralField2D field);

/// True for modes that carry the dynamics: xi != 0 and neither index at Nyquist.
inline bool active_mode(const Grid2D& g, int j, int k) {
  return g.mode_x(j) != 0 && !g.nyquist_x(j) && !g.nyquist_y(k);
}

/// Multiplies by (i xi)^order, Nyquist zeroed.
SpectralField2D x_derivative(SpectralField2D field, int order = 1);
/// Multiplies by (i eta)^order, Nyquist zeroed.
SpectralField2D y_derivative(SpectralField2D field, int order = 1);

/// Keeps |mode| <= fraction * n/2 in each direction (2/3 rule for fraction = 2/3).
bool inside_dealias(const Grid2D& g, int j, int k, double fraction);

/// Discrete L2 norm (\int |u|^2 dx dy)^{1/2} of grid samples.
double grid_l2(const Grid2D& grid, std::span<const double> values);

}  // namespace kp5

#include "kp5/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kp5/errors.hpp"
#include "kp5/quadrature.hpp"

namespace kp5 {

Grid2D::Grid2D(int nx, int ny, double lx, double ly) : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
  if (nx < 8 || ny < 8 || nx % 2 != 0 || ny % 2 != 0)
    throw Error(ErrorKind::Dimension, "grid sizes must be even and >= 8, got " +
                                          std::to_string(nx) + "x" + std::to_string(ny));
  if (!(lx > 0.0) || !(ly > 0.0))
    throw Error(ErrorKind::Domain, "grid side lengths must be positive");
}

double Grid2D::dxi() const { return 2.0 * std::numbers::pi / lx_; }
double Grid2D::deta() const { return 2.0 * std::numbers::pi / ly_; }

SpectralField2D::SpectralField2D(const Grid2D& g, std::vector<cplx> c) : grid(g), coeffs(std::move(c)) {
  if (coeffs.size() != grid.size())
    throw Error(ErrorKind::Dimension, "coefficient array does not match grid");
}

namespace {
void check_same(const Grid2D& a, const Grid2D& b) {
  if (!(a == b)) throw Error(ErrorKind::Dimension, "fields live on different grids");
}
}  // namespace

SpectralField2D& SpectralField2D::operator+=(const SpectralField2D& o) {
  check_same(grid, o.grid);
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
  return *this;
}

SpectralField2D& SpectralField2D::operator-=(const SpectralField2D& o) {
  check_same(grid, o.grid);
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= o.coeffs[i];
  return *this;
}

SpectralField2D& SpectralField2D::operator*=(cplx c) {
  for (auto& v : coeffs) v *= c;
  return *this;
}

SpectralField2D operator+(SpectralField2D a, const SpectralField2D& b) { return a += b; }
SpectralField2D operator-(SpectralField2D a, const SpectralField2D& b) { return a -= b; }
SpectralField2D operator*(cplx c, SpectralField2D a) { return a *= c; }

// The grid starts at -L/2, so e^{-i xi x_m} = (-1)^j e^{-2 pi i j m / n}.
void forward_in_place(const Grid2D& g, std::span<cplx> buf) {
  if (buf.size() != g.size()) throw Error(ErrorKind::Dimension, "forward_transform: size mismatch");
  fft::transform_2d(buf, g.nx(), g.ny(), fft::Direction::Forward);
  const double cell = g.dx() * g.dy();
  for (int j = 0; j < g.nx(); ++j)
    for (int k = 0; k < g.ny(); ++k) {
      const double sgn = ((j + k) % 2 == 0) ? 1.0 : -1.0;
      buf[g.index(j, k)] *= sgn * cell;
    }
}

void inverse_in_place(const Grid2D& g, std::span<cplx> buf) {
  if (buf.size() != g.size()) throw Error(ErrorKind::Dimension, "inverse_transform: size mismatch");
  const double scale = 1.0 / (g.lx() * g.ly());
  for (int j = 0; j < g.nx(); ++j)
    for (int k = 0; k < g.ny(); ++k) {
      const double sgn = ((j + k) % 2 == 0) ? 1.0 : -1.0;
      buf[g.index(j, k)] *= sgn * scale;
    }
  fft::transform_2d(buf, g.nx(), g.ny(), fft::Direction::Backward);
}

SpectralField2D forward_transform(const Grid2D& grid, std::span<const double> values) {
  if (values.size() != grid.size())
    throw Error(ErrorKind::Dimension, "forward_transform: expected " + std::to_string(grid.size()) +
                                          " samples, got " + std::to_string(values.size()));
  std::vector<cplx> buf(values.begin(), values.end());
  forward_in_place(grid, buf);
  return SpectralField2D(grid, std::move(buf));
}

SpectralField2D forward_transform(const Grid2D& grid, std::span<const cplx> values) {
  if (values.size() != grid.size())
    throw Error(ErrorKind::Dimension, "forward_transform: expected " + std::to_string(grid.size()) +
                                          " samples, got " + std::to_string(values.size()));
  std::vector<cplx> buf(values.begin(), values.end());
  forward_in_place(grid, buf);
  return SpectralField2D(grid, std::move(buf));
}

std::vector<cplx> inverse_transform_complex(const SpectralField2D& field) {
  std::vector<cplx> buf = field.coeffs;
  inverse_in_place(field.grid, buf);
  return buf;
}

std::vector<double> inverse_transform(const SpectralField2D& field) {
  const auto c = inverse_transform_complex(field);
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

double dispersion_symbol(double xi, double eta) {
  if (xi == 0.0) throw Error(ErrorKind::Domain, "dispersion_symbol: xi = 0 (project the zero mode first)");
  const double xi2 = xi * xi;
  return xi2 * xi2 * xi - eta * eta / xi;
}

SpectralField2D project_zero_mode(SpectralField2D field) {
  for (int k = 0; k < field.grid.ny(); ++k) field.at(0, k) = 0.0;
  return field;
}

SpectralField2D drop_nyquist(SpectralField2D field) {
  const Grid2D& g = field.grid;
  for (int k = 0; k < g.ny(); ++k) field.at(g.nx() / 2, k) = 0.0;
  for (int j = 0; j < g.nx(); ++j) field.at(j, g.ny() / 2) = 0.0;
  return field;
}

namespace {
cplx ipow(double w, int order) {
  cplx r = 1.0;
  for (int i = 0; i < order; ++i) r *= cplx(0.0, w);
  return r;
}
}  // namespace

SpectralField2D x_derivative(SpectralField2D field, int order) {
  const Grid2D& g = field.grid;
  for (int j = 0; j < g.nx(); ++j) {
    const cplx m = g.nyquist_x(j) ? cplx(0.0) : ipow(g.xi(j), order);
    for (int k = 0; k < g.ny(); ++k) field.at(j, k) *= g.nyquist_y(k) ? cplx(0.0) : m;
  }
  return field;
}

SpectralField2D y_derivative(SpectralField2D field, int order) {
  const Grid2D& g = field.grid;
  for (int k = 0; k < g.ny(); ++k) {
    const cplx m = g.nyquist_y(k) ? cplx(0.0) : ipow(g.eta(k), order);
    for (int j = 0; j < g.nx(); ++j) field.at(j, k) *= g.nyquist_x(j) ? cplx(0.0) : m;
  }
  return field;
}

bool inside_dealias(const Grid2D& g, int j, int k, double fraction) {
  const double cx = fraction * 0.5 * g.nx();
  const double cy = fraction * 0.5 * g.ny();
  return std::abs(g.mode_x(j)) < cx && std::abs(g.mode_y(k)) < cy;
}

double grid_l2(const Grid2D& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw Error(ErrorKind::Dimension, "grid_l2: size mismatch");
  KahanSum acc;
  for (double v : values) acc.add(v * v);
  return std::sqrt(acc.value() * grid.dx() * grid.dy());
}

}  // namespace kp5

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kp5/grid.hpp"
#include "kp5/io.hpp"
#include "kp5/norms.hpp"
#include "kp5/spacetime.hpp"

namespace kp5 {

/// Initial data g on the upper half-grid: rows y_n = n dy, n = 0 .. ny/2 - 1.
struct InitialData {
  Grid2D grid;
  std::vector<double> upper;  // [m][n]
  double s = 1.0;

  InitialData(const Grid2D& g, double s_index = 1.0);
  int rows() const { return grid.ny() / 2; }
  double& at(int m, int n) { return upper[static_cast<std::size_t>(m) * rows() + n]; }
  double at(int m, int n) const { return upper[static_cast<std::size_t>(m) * rows() + n]; }

  static InitialData from_function(const Grid2D& g, const std::function<double(double, double)>& fn,
                                   double s_index = 1.0);
  /// Keeps the y >= 0 rows of a full-grid array.
  static InitialData from_full(const Grid2D& g, std::span<const double> values, double s_index = 1.0);
};

/// Maps half-plane data to full-grid samples.
using Extension = std::function<std::vector<double>(const InitialData&)>;

/// a_j with sum_j a_j (-lambda_j)^k = 1 for k = 0 .. n-1, so that
/// u(-y) = sum_j a_j u(lambda_j y) matches n - 1 derivatives at y = 0.
std::vector<double> reflection_coefficients(std::span<const double> lambdas);

/// g_e(x, -y) = 6 g(x, y) - 8 g(x, 2y) + 3 g(x, 3y); points past the box count as 0.
std::vector<double> hestenes_extension(const InitialData& g);

/// Full-grid extension, before zero-mode projection.
std::vector<double> extend_initial_values(const InitialData& g, const Extension& ext = hestenes_extension);

/// Extension transformed and zero-mode projected. Warns when g does not decay
/// toward y = Ly/2.
SpectralField2D extend_initial(const InitialData& g, std::vector<std::string>* warnings = nullptr,
                               const Extension& ext = hestenes_extension);

/// Boundary samples h(x_m, t_n) on a time window, [n][m].
struct BoundarySamples {
  int nx = 0;
  double lx = 1.0;
  TimeWindow window;
  std::vector<double> values;

  BoundarySamples(int nx, double lx, const TimeWindow& w);

  double& at(int n, int m) { return values[static_cast<std::size_t>(n) * nx + m]; }
  double at(int n, int m) const { return values[static_cast<std::size_t>(n) * nx + m]; }
  std::span<const double> row(int n) const { return {values.data() + static_cast<std::size_t>(n) * nx, static_cast<std::size_t>(nx)}; }
  double x(int m) const { return -0.5 * lx + m * (lx / nx); }
  double dx() const { return lx / nx; }

  static BoundarySamples from_function(int nx, double lx, const TimeWindow& w,
                                       const std::function<double(double, double)>& fn);
  BoundarySamples& operator-=(const BoundarySamples& o);
};

/// Resamples file data given on [0, 1] onto the window; beyond t = 1 the data
/// are continued by a derivative-matching reflection, before t = 0 they are 0.
BoundarySamples boundary_from_file(const io::BoundaryFile& file, const TimeWindow& w);

/// Boundary data cut to t > 0 and tapered, with its transform in (xi, beta).
struct BoundaryData {
  BoundarySamples extended;    // taper(t) chi_{t>0} (h - p)
  std::vector<double> trace;   // h(., 0) as supplied, before any subtraction
  BoundarySpectrum spectrum;   // beta grid oversampled 8x relative to tau
  std::vector<std::string> warnings;
  double s = 1.0;
  bool zero = false;

  /// hchi^(xi_j, xi_j^5 + sign eta^2 / xi_j); 0 (and *on_grid = false) off the beta grid.
  cplx curve_value(int j, double eta, int sign, bool* on_grid = nullptr) const;
};

/// Builds BoundaryData. For s > 1/2 the trace of h - p must vanish; otherwise a
/// precondition error citing the corner compatibility condition is thrown.
BoundaryData extend_boundary(const BoundarySamples& h, double s, const BoundarySamples* subtract = nullptr,
                             double trace_tolerance = 1e-8);

/// Plain transform of boundary samples (no cut at t = 0), beta grid as in extend_boundary.
BoundarySpectrum boundary_transform(const BoundarySamples& b);

/// Curve samples on the grid frequencies, [j][k] as in SpectralField2D; the
/// xi = 0 column is 0.
SpectralField2D curve_samples(const BoundaryData& h, const Grid2D& grid, int sign);

/// L2_x norm of g(., 0) - h(., 0); 0 for s < 1/2 where no condition applies.
double compatibility_check(const InitialData& g, const BoundaryData& h, double s);
double compatibility_check(const InitialData& g, const BoundarySamples& h, double s);

/// Random field with |u^| = <xi^2 + eta^2>^{-(s + 1.1)/2} and uniform phases,
/// Hermitian, zero-mode projected, Nyquist zeroed.
SpectralField2D make_sobolev_sample(double s, std::uint64_t seed, const Grid2D& grid, double amplitude = 1.0);

}  // namespace kp5

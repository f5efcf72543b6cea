#pragma once

#include <string>
#include <vector>

#include "kp5/data_prep.hpp"
#include "kp5/grid.hpp"
#include "kp5/spacetime.hpp"

namespace kp5 {

/// Multiplies every mode with xi != 0 by e^{i omega t}. The x-Nyquist column
/// has no conjugate partner and is left as is.
SpectralField2D free_evolve(const SpectralField2D& g, double t);
/// free_evolve at every window time.
SpectralHistory free_history(const SpectralField2D& g, const TimeWindow& w);

/// u(x_m, 0).
std::vector<double> trace_y0(const SpectralField2D& u);
/// Largest |h-hat| over the beta grid.
double spectrum_peak(const BoundarySpectrum& sp);

/// u(x_m, 0, t_n) as boundary samples on the history's window.
BoundarySamples trace_y0(const SpectralHistory& u);

/// p(x, t) = mu(t) u(x, 0, t) for the free evolution of g_e.
BoundarySamples compute_p(const SpectralField2D& ge, const TimeWindow& w);

/// Limit of (-i lambda xi - xi^6)^{1/2} with Re r <= 0 as lambda -> i beta from Re lambda > 0:
/// -|d|^{1/2} if d = beta xi - xi^6 > 0, otherwise +-i|d|^{1/2} with the sign of xi.
cplx branch_r(double xi, double beta);

struct BoundaryDiagnostics {
  /// Fraction of quadrant modes whose curve point leaves the beta grid where the spectrum is not negligible.
  double w1_off_grid_fraction = 0.0;
  /// Largest spectrum magnitude at the beta-grid edge over columns with off-grid W1 modes, relative to the peak.
  double w1_edge_ratio = 0.0;
  /// Largest spectrum magnitude where a plus-branch curve exits the beta grid, relative to the peak.
  double w2_tail_ratio = 0.0;
  int w2_nodes = 0;
  std::vector<std::string> warnings;
};

/// The boundary operators W1, W2 for fixed data on a fixed grid. Densities and
/// quadrature nodes are computed once; evaluation at a time is then a multiplier
/// (W1) or a small matrix product per xi (W2).
class BoundaryOperator {
 public:
  /// Throws a resolution error when the W1 off-grid fraction exceeds 1% or
  /// the W2 tail ratio exceeds tail_tolerance (pass a negative value to only record it).
  /// Edge levels are relative to max(reference_peak, peak of h's spectrum); a correction
  /// term passes the spectrum peak of the data it corrects.
  BoundaryOperator(const BoundaryData& h, const Grid2D& grid, double tail_tolerance = 1e-8,
                   double reference_peak = 0.0);

  const Grid2D& grid() const { return grid_; }
  const BoundaryDiagnostics& diagnostics() const { return diag_; }
  bool zero() const { return zero_; }

  SpectralField2D w1(double t) const;
  SpectralField2D w2(double t) const;
  SpectralHistory w1_history(const TimeWindow& w) const;
  SpectralHistory w2_history(const TimeWindow& w) const;
  /// W1 + W2 on the window.
  SpectralHistory history(const TimeWindow& w) const;

  /// x-transform of W2 at (xi_j, y) for the given times, layout [t][y]; used by tests.
  std::vector<cplx> w2_column(int j, std::span<const double> ys, std::span<const double> ts) const;

 private:
  struct Column {
    int j = 0;
    std::vector<double> eta;
    std::vector<double> beta;
    std::vector<cplx> density;  // quadrature weight * (2 eta / |xi|) hchi / (2 pi)
  };
  void w2_into(std::span<const double> ts, std::vector<cplx>& out) const;

  Grid2D grid_;
  bool zero_ = true;
  std::vector<cplx> w1_amp_;
  std::vector<double> omega_;
  std::vector<Column> cols_;
  BoundaryDiagnostics diag_;
};

SpectralField2D boundary_w1(const BoundaryData& h, const Grid2D& grid, double t);
/// Real field W2 h(x, y, t) on the grid.
std::vector<double> boundary_w2(const BoundaryData& h, const Grid2D& grid, double t);

struct LinearDiagnostics {
  double compatibility = 0.0;
  BoundaryDiagnostics boundary;
  std::vector<std::string> warnings;
};

/// W(t) g_e + (W1 + W2)(h - p) on h's time window. For s > 1/2 the data must
/// be compatible, otherwise extend_boundary throws.
SpectralHistory linear_solution(const InitialData& g, const BoundarySamples& h, LinearDiagnostics* diag = nullptr,
                                double tail_tolerance = 1e-8, const Extension& ext = hestenes_extension);

}  // namespace kp5

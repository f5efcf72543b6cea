#pragma once

#include <span>
#include <string>
#include <vector>

#include "kp5/grid.hpp"
#include "kp5/spacetime.hpp"

namespace kp5 {

/// Exponents of the function spaces used by the solver and the estimates.
struct NormParams {
  double s = 1.0;
  double b = 0.45;
  double a = 0.25;
  /// Surrogate for the "+" in exponents such as 1/2+.
  double epsilon_plus = 0.05;

  /// b1 = 3/4 - (s + a)/2.
  double b1() const { return 0.75 - 0.5 * (s + a); }

  /// Throws a usage error naming the violated constraint.
  void validate_for_solver() const;
};

/// min(1/3, 2s/3, 3/2 - 3s/5); throws a domain error unless 0 < s < 5/2.
double a_max(double s);

/// A norm value plus any truncation diagnostics raised while computing it.
struct NormResult {
  double value = 0.0;
  std::vector<std::string> warnings;
};

/// (\int <xi^2 + eta^2>^s |u^|^2 dxi deta / (2 pi)^2)^{1/2}; at s = 0 this is the L2 norm.
double sobolev_norm(const SpectralField2D& field, double s);

/// Samples phi^(xi_j, beta_m) of a boundary function phi(x, t) on the x-grid
/// frequencies times a uniform beta grid beta_m = beta0 + m dbeta.
struct BoundarySpectrum {
  int nx = 0;
  double lx = 1.0;
  double beta0 = 0.0;
  double dbeta = 1.0;
  int nbeta = 0;
  std::vector<cplx> values;  // [j][m], j in FFT order

  BoundarySpectrum() = default;
  BoundarySpectrum(int nx, double lx, double beta0, double dbeta, int nbeta);

  double xi(int j) const;
  double beta(int m) const { return beta0 + m * dbeta; }
  double beta_max() const { return beta0 + (nbeta - 1) * dbeta; }
  std::span<cplx> column(int j) { return {values.data() + static_cast<std::size_t>(j) * nbeta, static_cast<std::size_t>(nbeta)}; }
  std::span<const cplx> column(int j) const { return {values.data() + static_cast<std::size_t>(j) * nbeta, static_cast<std::size_t>(nbeta)}; }
  /// Cubic interpolation in beta; false when beta is off the grid.
  bool value(int j, double beta, cplx* out) const;
  /// Largest |phi^| on the first/last two beta samples relative to the column maximum.
  double edge_ratio() const;
};

/// Weight <xi^2 + |xi beta - xi^6|>^{s/2} |xi beta - xi^6|^{1/4} / |xi|^{1/2} of the boundary space.
double boundary_weight(double xi, double beta, double s);

/// Boundary-space norm from the (xi, beta) form of the weight.
NormResult boundary_norm_beta(const BoundarySpectrum& phi, double s);
/// The same norm from the curve form: both branches beta = xi^5 +- eta^2/xi.
NormResult boundary_norm_eta(const BoundarySpectrum& phi, double s);

/// X^{s,b} norm with weight <tau - omega>^b <xi^2 + eta^2>^{s/2}; the xi = 0
/// column and Nyquist modes carry zero weight. Computed on the profile
/// e^{-i omega t} u^(t), whose time transform is u^ shifted to tau - omega.
NormResult xsb_norm(const SpectralHistory& u, double s, double b);
NormResult xsb_norm(const SpaceTimeField& u, double s, double b);

/// Anisotropic norm with weight <xi, eta>^{1/2+eps} |xi|^{(s+a)/2 - 1/4} <tau - omega>^{-b1},
/// b1 = 3/4 - (s+a)/2. Pass a = 0 for the un-shifted index.
NormResult weighted_xsb_norm(const SpectralHistory& f, double s, double a, double epsilon_plus = 0.05);
NormResult weighted_xsb_norm(const SpaceTimeField& f, double s, double a, double epsilon_plus = 0.05);

}  // namespace kp5

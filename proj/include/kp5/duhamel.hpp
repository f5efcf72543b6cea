#pragma once

#include <string>
#include <vector>

#include "kp5/data_prep.hpp"
#include "kp5/linear.hpp"
#include "kp5/norms.hpp"
#include "kp5/spacetime.hpp"

namespace kp5 {

struct SolverParams {
  double s = 1.0;
  double a = 0.25;
  double b = 0.45;
  double T = 0.5;
  double tol_fixed_point = 1e-10;
  int max_iter = 30;
  double dealias_fraction = 2.0 / 3.0;
  double epsilon_plus = 0.05;
  /// Relative W2 tail allowed for the boundary correction; negative only records it.
  double tail_tolerance = -1.0;

  double b1() const { return 0.75 - 0.5 * (s + a); }
  NormParams norms() const { return {s, b, a, epsilon_plus}; }
  /// Throws a usage error naming the violated constraint.
  void validate() const;
};

struct PicardDiagnostics {
  std::vector<double> norms;        // X^{s,b} norm of each iterate
  std::vector<double> differences;  // ||u^{n+1} - u^n||
  std::vector<double> factors;      // differences[n] / differences[n-1]
  double contraction = 0.0;         // largest factor
  double fixed_point_residual = 0.0;  // ||Phi(u) - u|| / ||u|| for the returned u
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

/// F = -mu(t/T) u u_x, products in physical space on the 2/3-truncated spectrum.
SpectralHistory nonlinearity(const SpectralHistory& u, double T, double dealias_fraction = 2.0 / 3.0);
SpaceTimeField nonlinearity(const SpaceTimeField& u, double T, double dealias_fraction = 2.0 / 3.0);

/// I(t) = \int_0^t W(t - t') F(t') dt' for every window time (negative t included).
/// Per mode, F^ is interpolated by quadratics on each step and multiplied by
/// e^{-i omega t'} exactly, so the phase is integrated without error.
SpectralHistory duhamel_integral(const SpectralHistory& F);
SpaceTimeField duhamel_integral(const SpaceTimeField& F);

/// q = mu(t) I(x, 0, t) for a Duhamel integral I; q(., 0) = 0.
BoundarySamples q_trace(const SpectralHistory& duhamel);

struct PicardResult {
  SpectralHistory u;        // last iterate on the whole window
  SpectralHistory linear;   // mu(t) W_0^t(g, h)
  PicardDiagnostics diagnostics;
};

/// One application of the fixed-point map: mu L + mu (I(F(u)) - (W1 + W2) q).
/// reference_peak is the boundary-spectrum scale for the resolution checks on q.
SpectralHistory picard_map(const SpectralHistory& mu_linear, const SpectralHistory& u, const SolverParams& params,
                           std::vector<std::string>* warnings = nullptr, double reference_peak = 0.0);

/// Picard iteration from u^0 = mu L. Throws a convergence error after three
/// consecutive difference ratios >= 1, or when max_iter is exhausted.
PicardResult picard_solve(const InitialData& g, const BoundarySamples& h, const SolverParams& params,
                          const Extension& ext = hestenes_extension);

struct ResidualRegion {
  double y_max_fraction = 0.25;  // y in (0, y_max_fraction Ly]
  double t_min = 0.0;
  double t_max = 1.0;            // t in (t_min, t_max)
  bool nonlinear = true;
};

/// ||d_x(u_t - d_x^5 u + u u_x) + u_yy|| over the region, divided by
/// ||d_x^6 u|| + ||u_yy|| + ||d_x(u u_x)||. Time derivative by fourth-order
/// central differences, space derivatives spectral.
double pde_residual(const SpectralHistory& u, const ResidualRegion& region);

}  // namespace kp5

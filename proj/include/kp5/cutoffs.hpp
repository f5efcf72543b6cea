#pragma once

namespace kp5::cutoffs {

/// sigma(r) = e^{-1/r} for r > 0, else 0.
double sigma(double r);

/// Smooth monotone step: 0 for r <= 0, 1 for r >= 1.
double smooth_step(double r);

/// Time cutoff: even, 1 on [-1, 1], 0 outside [-2, 2].
double mu(double t);

/// Spatial cutoff: 1 on [0, inf), 0 on (-inf, -2].
double rho(double y);

/// Boundary kernel f(y) = rho(y) e^{-y}.
double f_kernel(double y);

/// Time-extension taper: 1 on [0, 1], 0 outside [-1/2, 3/2].
double time_taper(double t);

/// mu^(beta) = \int mu(t) e^{-i beta t} dt; real and even.
double mu_hat(double beta);

/// \int mu(t)^2 dt.
double mu_l2_squared();

}  // namespace kp5::cutoffs

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "kp5/duhamel.hpp"
#include "kp5/grid.hpp"

namespace kp5::verify {

/// Summary of a ratio experiment. `growth` compares the maximum at the finer
/// resolution with the coarser one (0 when not measured).
struct RatioReport {
  std::string statement;
  double s = 0.0;
  double a = 0.0;
  double b = 0.0;
  int grid = 0;
  int samples = 0;
  double max = 0.0;
  double median = 0.0;
  double min = 0.0;
  double growth = 0.0;
  std::vector<double> ratios;
  std::vector<std::string> notes;

  /// Fills max/median/min from `ratios`.
  void summarize();
};

struct ResonanceStats {
  std::size_t samples = 0;
  double max_relative_error = 0.0;
  /// Smallest |tau - tau1 - tau2| / M observed.
  double min_ratio_to_m = 0.0;
  bool same_sign = true;
};

/// Resonance function from the definitions of tau, tau1, tau2 (with xi2 = xi - xi1).
long double resonance_direct(long double xi, long double xi1, long double theta, long double theta1,
                             long double lambda, long double lambda1);
/// Closed form -5 xi xi1 xi2 (xi^2 - xi xi1 + xi1^2) - (theta xi1 - theta1 xi)^2 / (xi xi1 xi2).
double resonance_closed(double xi, double xi1, double theta, double theta1);
ResonanceStats check_resonance_identity(std::size_t samples, std::uint64_t seed);

/// phi_beta(k) = sum_{|n| <= |k|} <n>^{-beta}; ~1, log(1 + <k>), <k>^{1 - beta} for beta >, =, < 1.
double phi_beta(double beta, double k);
/// \int <tau - k1>^{-beta} <tau - k2>^{-gamma} dtau.
double calculus_lemma_lhs(double beta, double gamma, double k1, double k2);
/// LHS / (<k1 - k2>^{-gamma} phi_beta(k1 - k2)); domain error unless beta >= gamma >= 0, beta + gamma > 1.
double calculus_lemma_check(double beta, double gamma, double k1, double k2);

/// calculus_lemma_check over (beta, gamma) pairs including beta = 1 and
/// |k1 - k2| from 0 to 1e4.
RatioReport calculus_lemma_sweep();

struct SchurResult {
  double opnorm = 0.0;
  double bound = 0.0;  // sqrt(A B)
  double a = 0.0;
  double b = 0.0;
  bool holds = true;
};

/// Discrete Schur test for the kernel K(theta_i, eta_j): A, B are the smallest
/// constants in sum_i K p <= A q and sum_j K q <= B p; the norm is from power iteration.
SchurResult schur_bound_check(const Eigen::MatrixXd& kernel, std::span<const double> p, std::span<const double> q);

struct SchurSweep {
  int kernels = 0;
  int failures = 0;
  double worst_margin = 0.0;  // largest opnorm / sqrt(AB)
};

/// Random nonnegative kernels <theta - eta>^{-c} times noise, with power weights.
SchurSweep schur_random_kernels(int count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Linear estimates

struct KatoSetup {
  int n = 64;
  double length = 16.0;
  double band = 1.5;    // base spectral radius of the ensemble
  int rescalings = 3;   // g, g(2.), g(4.)
  int y_stride = 2;     // y-slices examined: every y_stride-th row with y >= 0
};

/// ||mu(t) W(t) g restricted to y||_{boundary space} computed from mu^; exposed for tests.
double kato_slice_norm(const SpectralField2D& g, double y, double s);

/// sup_y ||mu W g(., y, .)||_{boundary space} / ||g||_{H^s} over a random band-limited ensemble
/// and its dyadic rescalings; growth = max/min of the per-rescaling maxima.
RatioReport kato_ratio(double s, int ensemble, std::uint64_t seed, const KatoSetup& setup = {});

struct EnsembleSetup {
  int n = 64;
  double length = 32.0;
  int nt = 288;
  double half_width = 2.25;
  bool refine = true;  // repeat on a grid with twice the points and report growth
};

/// ||mu W2 h||_{X^{s,b}} / ||chi h||_{boundary space} for random zero-trace h.
RatioReport w2_xsb_ratio(double s, double b, int ensemble, std::uint64_t seed, const EnsembleSetup& setup = {});

/// ||q||_{boundary space} / (||F||_{X^{s,-b}} + [s > 1/2] ||F||_{weighted}) for random F.
RatioReport q_trace_ratio(double s, double b, int ensemble, std::uint64_t seed, const EnsembleSetup& setup = {});

// ---------------------------------------------------------------------------
// Bilinear estimates on space-time frequency boxes

/// gridN^3 samples on xi, theta in (j + 1/2) delta, lambda in j delta, j = -N/2 .. N/2 - 1.
struct FrequencyBox {
  int n = 0;
  double delta = 0.25;
  std::vector<cplx> values;  // [xi][theta][lambda]

  FrequencyBox(int n, double delta);
  double xi(int i) const { return (i - n / 2 + 0.5) * delta; }
  double theta(int i) const { return (i - n / 2 + 0.5) * delta; }
  double lambda(int i) const { return (i - n / 2) * delta; }
  cplx& at(int i, int j, int k) { return values[(static_cast<std::size_t>(i) * n + j) * n + k]; }
  cplx at(int i, int j, int k) const { return values[(static_cast<std::size_t>(i) * n + j) * n + k]; }
};

/// Random |u^| = r / (<lambda - omega>^b <xi^2 + theta^2>^{s/2}), r uniform on [0, 1], uniform phases.
FrequencyBox random_xsb_spectrum(int n, double delta, double s, double b, std::mt19937_64& rng);

double box_xsb_norm(const FrequencyBox& u, double s, double b);

enum class BilinearTarget { Xsb, Weighted };

/// ||d_x(u v)||_target / (||u||_{X^{s,b}} ||v||_{X^{s,b}}); the product is the
/// discrete convolution delta^3 sum u^(p) v^(q - p).
double bilinear_pair_ratio(const FrequencyBox& u, const FrequencyBox& v, double s, double a, double b,
                           BilinearTarget target, double epsilon_plus = 0.05);

RatioReport bilinear_ratio(double s, double a, double b, int grid_n, int trials, std::uint64_t seed);
RatioReport weighted_bilinear_ratio(double s, double a, int grid_n, int trials, std::uint64_t seed, double b = 0.45);
/// Runs both sizes and sets growth = max(n2) / max(n1).
RatioReport bilinear_growth(double s, double a, double b, int n1, int n2, int trials, std::uint64_t seed,
                            BilinearTarget target);

// ---------------------------------------------------------------------------
// Smoothing

struct ShellFit {
  std::vector<double> radius;  // geometric mean radius of each shell, in mode units
  std::vector<double> energy;  // mean |u^|^2 per mode
  double slope = 0.0;          // d log E / d log r
  double index = 0.0;          // effective Sobolev index -slope/2 - 1
};

/// Mean energy per mode in the dyadic shells [2^k, 2^{k+1}) intersected with the dealiased band.
ShellFit shell_fit(const SpectralField2D& u, int k_min, int k_max, double dealias_fraction = 2.0 / 3.0);

// The shells must reach |xi| where the resonance times t is large; the
// Duhamel term only loses the derivative of u u_x below that.
struct SmoothingSetup {
  int n = 64;
  double length = 27.0;
  int nt = 2048;
  double half_width = 2.25;
  double amplitude = 0.02;
  int k_min = 2;
  int k_max = 5;
};

struct SmoothingReport {
  bool applicable = true;
  double gain = 0.0;          // index(u - L) - index(L) at t = T/2
  double control_gain = 0.0;  // index(L) - index(g_e)
  double a_target = 0.0;
  bool passed = false;
  std::vector<std::pair<double, bool>> per_a;  // (a, gain >= a - 0.1)
  ShellFit nonlinear;
  ShellFit linear;
  ShellFit data;
  PicardDiagnostics picard;
};

/// Solves with g = make_sobolev_sample(s, seed) and h = p (the free trace, so
/// the data are compatible) and fits the smoothing gain of u - W_0^t(g, h).
SmoothingReport smoothing_fit(std::uint64_t seed, double s, std::span<const double> a_grid, const SolverParams& params,
                              const SmoothingSetup& setup = {});

}  // namespace kp5::verify

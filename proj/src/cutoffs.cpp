#include "kp5/cutoffs.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "kp5/fft.hpp"
#include "kp5/quadrature.hpp"

namespace kp5::cutoffs {

double sigma(double r) { return r > 0.0 ? std::exp(-1.0 / r) : 0.0; }

double smooth_step(double r) {
  if (r <= 0.0) return 0.0;
  if (r >= 1.0) return 1.0;
  const double a = sigma(r);
  return a / (a + sigma(1.0 - r));
}

double mu(double t) { return smooth_step(2.0 - std::abs(t)); }

double rho(double y) { return smooth_step(0.5 * (y + 2.0)); }

double f_kernel(double y) {
  const double r = rho(y);
  return r == 0.0 ? 0.0 : r * std::exp(-y);
}

double time_taper(double t) { return smooth_step(2.0 * (t + 0.5)) * smooth_step(2.0 * (1.5 - t)); }

namespace {

// 2 \int_1^2 mu(t) cos(beta t) dt, panelled so each panel sees a few oscillations.
double transition_part(double beta) {
  const int panels = std::max(16, static_cast<int>(std::abs(beta) * 0.5) + 1);
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = 1.0 + static_cast<double>(p) / panels;
    const double b = 1.0 + static_cast<double>(p + 1) / panels;
    const auto r = gauss_legendre(16, a, b);
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
      acc += r.weights[i] * mu(r.nodes[i]) * std::cos(beta * r.nodes[i]);
  }
  return 2.0 * acc;
}

double mu_hat_direct(double beta) {
  const double flat = std::abs(beta) < 1e-8 ? 2.0 : 2.0 * std::sin(beta) / beta;
  return flat + transition_part(beta);
}

constexpr double kTableStep = 1.0 / 128.0;
constexpr double kTableMax = 512.0;

// Trapezoid sums of mu(t) e^{-i beta t} at beta = i * kTableStep through one FFT;
// mu is smooth and compactly supported, so the sums are spectrally accurate.
const std::vector<double>& table() {
  static const std::vector<double> tab = [] {
    constexpr int n = 1 << 20;
    const double period = 2.0 * std::numbers::pi / kTableStep;
    const double dt = period / n;
    std::vector<cplx> buf(n, cplx(0.0));
    for (int i = 0; i * dt < 2.0; ++i) {
      const double v = mu(i * dt);
      buf[i] = v;
      if (i > 0) buf[n - i] = v;
    }
    fft::transform_1d(buf, fft::Direction::Forward);
    const int m = static_cast<int>(kTableMax / kTableStep) + 4;
    std::vector<double> v(m);
    for (int i = 0; i < m; ++i) v[i] = dt * buf[i].real();
    return v;
  }();
  return tab;
}

}  // namespace

double mu_hat(double beta) {
  const double b = std::abs(beta);
  if (b >= kTableMax) return mu_hat_direct(b);
  const auto& tab = table();
  double out = 0.0;
  cubic_uniform<double>(std::span<const double>(tab), 0.0, kTableStep, b, &out);
  return out;
}

double mu_l2_squared() {
  static const double v = [] {
    const auto r = gauss_legendre(64, 1.0, 2.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * mu(r.nodes[i]) * mu(r.nodes[i]);
    return 2.0 * (1.0 + acc);
  }();
  return v;
}

}  // namespace kp5::cutoffs

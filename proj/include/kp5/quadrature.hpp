#pragma once

#include <complex>
#include <span>
#include <vector>

namespace kp5 {

/// Compensated summation; all norm reductions go through this so results do
/// not depend on loop partitioning.
class KahanSum {
 public:
  void add(double v) {
    const double y = v - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// Composite rule: `points`-point Gauss-Legendre on each panel [edges[i], edges[i+1]].
QuadratureRule composite_gauss(std::span<const double> edges, int points);

/// Four-point Lagrange interpolation on a uniform grid v[i] = f(x0 + i*h).
/// Returns false (and leaves *out untouched) when x lies outside [x0, x0 + (n-1)h].
template <typename T>
bool cubic_uniform(std::span<const T> v, double x0, double h, double x, T* out) {
  const int n = static_cast<int>(v.size());
  const double u = (x - x0) / h;
  if (!(u >= 0.0) || u > n - 1) return false;
  int i = static_cast<int>(u) - 1;
  if (i < 0) i = 0;
  if (i > n - 4) i = n - 4;
  const double s = u - i;
  const double w0 = -(s - 1) * (s - 2) * (s - 3) / 6.0;
  const double w1 = s * (s - 2) * (s - 3) / 2.0;
  const double w2 = -s * (s - 1) * (s - 3) / 2.0;
  const double w3 = s * (s - 1) * (s - 2) / 6.0;
  *out = w0 * v[i] + w1 * v[i + 1] + w2 * v[i + 2] + w3 * v[i + 3];
  return true;
}

/// <z> = (1 + z^2)^{1/2}.
inline double bracket(double z) { return std::sqrt(1.0 + z * z); }

}  // namespace kp5

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kp5/errors.hpp"
#include "kp5/linear.hpp"
#include "kp5/norms.hpp"
#include "kp5/quadrature.hpp"

using namespace kp5;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralField2D sample(const Grid2D& g, double (*fn)(double, double)) {
  std::vector<double> v(g.size());
  for (int m = 0; m < g.nx(); ++m)
    for (int n = 0; n < g.ny(); ++n) v[g.index(m, n)] = fn(g.x(m), g.y(n));
  return forward_transform(g, v);
}

double gaussian(double x, double y) { return std::exp(-0.5 * (x * x + y * y)); }
double odd_bump(double x, double y) { return x * std::exp(-0.25 * x * x - 0.5 * y * y); }
double odd_bump2(double x, double y) { return std::sin(x) * std::exp(-0.125 * x * x - 0.25 * (y - 1.0) * (y - 1.0)); }

}  // namespace

TEST_CASE("a_max") {
  CHECK(a_max(1.0) == doctest::Approx(1.0 / 3.0));
  CHECK(a_max(0.3) == doctest::Approx(0.2));
  CHECK(a_max(2.4) == doctest::Approx(0.06));
  CHECK_THROWS_AS(a_max(0.0), Error);
  CHECK_THROWS_AS(a_max(2.5), Error);
}

TEST_CASE("Sobolev norm") {
  const Grid2D g(64, 64, 20.0, 20.0);
  const SpectralField2D u = sample(g, gaussian);
  CHECK(sobolev_norm(u, 0.0) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-10));

  // cos(xi0 x) on an L x L box: two modes of size L^2 / 2.
  const Grid2D h(16, 16, 2.0 * kPi, 2.0 * kPi);
  std::vector<double> v(h.size());
  for (int m = 0; m < h.nx(); ++m)
    for (int n = 0; n < h.ny(); ++n) v[h.index(m, n)] = std::cos(3.0 * h.x(m));
  const SpectralField2D c = forward_transform(h, v);
  for (double s : {0.0, 0.5, 2.0})
    CHECK(sobolev_norm(c, s) == doctest::Approx(std::sqrt(2.0 * kPi * kPi * std::pow(bracket(9.0), s))).epsilon(1e-12));
}

TEST_CASE("boundary weight") {
  for (double s : {0.3, 1.0, 2.0}) CHECK(boundary_weight(1.0, 2.0, s) == doctest::Approx(std::pow(5.0, 0.25 * s)));
  // Vanishes on the curve beta = xi^5.
  CHECK(boundary_weight(1.5, std::pow(1.5, 5), 1.0) == doctest::Approx(0.0));
  // KP5 scaling (xi, beta) -> (l xi, l^5 beta) at s = 0: |xi beta - xi^6|^{1/4} |xi|^{-1/2} gains l.
  CHECK(boundary_weight(2.0, 32.0 * 3.0, 0.0) == doctest::Approx(2.0 * boundary_weight(1.0, 3.0, 0.0)));
}

TEST_CASE("boundary norm: beta and curve forms agree") {
  BoundarySpectrum sp(16, 16.0, -60.0, 0.02, 6001);
  for (int j = 0; j < sp.nx; ++j) {
    auto col = sp.column(j);
    for (int m = 0; m < sp.nbeta; ++m) {
      const double b = sp.beta(m);
      col[m] = std::exp(-sp.xi(j) * sp.xi(j)) * std::exp(-b * b / 50.0) * cplx(1.0, 0.1 * b);
    }
  }
  for (double s : {0.0, 1.0}) {
    const double nb = boundary_norm_beta(sp, s).value;
    const double ne = boundary_norm_eta(sp, s).value;
    CHECK(nb > 0.0);
    CHECK(std::abs(nb - ne) < 1e-4 * nb);
  }
  CHECK_THROWS_AS(BoundarySpectrum(8, 1.0, 0.0, 1.0, 3), Error);
}

TEST_CASE("X^{s,b} norm factors for a free solution") {
  const Grid2D g(32, 32, 16.0, 16.0);
  const TimeWindow w(256, 3.0);
  const auto phi = [](double t) { return std::exp(-4.0 * t * t); };
  const double phi_l2 = std::pow(kPi / 8.0, 0.25);

  double ratio_b = 0.0;
  for (auto fn : {odd_bump, odd_bump2}) {
    const SpectralField2D u0 = sample(g, fn);
    SpectralHistory u = free_history(u0, w);
    u.multiply_time(phi);
    for (double s : {0.0, 1.0}) {
      const NormResult r = xsb_norm(u, s, 0.0);
      CHECK(r.warnings.empty());
      CHECK(r.value == doctest::Approx(sobolev_norm(u0, s) * phi_l2).epsilon(1e-6));
    }
    // Modulation invariance: the b-part depends only on the time profile.
    const double rb = xsb_norm(u, 1.0, 0.45).value / sobolev_norm(u0, 1.0);
    if (ratio_b == 0.0)
      ratio_b = rb;
    else
      CHECK(rb == doctest::Approx(ratio_b).epsilon(1e-6));
    CHECK(rb > phi_l2);

    SpectralHistory twice = u;
    twice *= 2.0;
    CHECK(weighted_xsb_norm(twice, 1.0, 0.25).value == doctest::Approx(2.0 * weighted_xsb_norm(u, 1.0, 0.25).value));
  }
}

TEST_CASE("X^{s,b} at s = b = 0 is the space-time L2 norm") {
  const Grid2D g(32, 32, 16.0, 16.0);
  const TimeWindow w(128, 2.5);
  SpaceTimeField f(g, w);
  for (int n = 0; n < w.nt(); ++n) {
    const double t = w.t(n);
    auto sl = f.slice(n);
    for (int m = 0; m < g.nx(); ++m)
      for (int k = 0; k < g.ny(); ++k) {
        const double x = g.x(m) - t, y = g.y(k);
        sl[g.index(m, k)] = std::exp(-3.0 * t * t) * x * std::exp(-0.5 * x * x - 0.5 * y * y);
      }
  }
  double acc = 0.0;
  for (int n = 0; n < w.nt(); ++n) {
    const double l2 = grid_l2(g, f.slice(n));
    acc += w.dt() * l2 * l2;
  }
  CHECK(xsb_norm(f, 0.0, 0.0).value == doctest::Approx(std::sqrt(acc)).epsilon(1e-8));
}

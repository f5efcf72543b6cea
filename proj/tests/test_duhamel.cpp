#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kp5/cutoffs.hpp"
#include "kp5/duhamel.hpp"
#include "kp5/linear.hpp"

using namespace kp5;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("Duhamel integral of a constant forcing") {
  // xi = eta = 2 gives omega = 32 - 2 = 30.
  const Grid2D g(8, 8, kPi, kPi);
  const TimeWindow w(256, 2.5);
  SpectralHistory F(g, w);
  const cplx c(0.3, -0.2);
  for (int n = 0; n < w.nt(); ++n) {
    auto sl = F.slice(n);
    sl[g.index(g.index_x(1), g.index_y(1))] = c;
    sl[g.index(g.index_x(-1), g.index_y(-1))] = std::conj(c);
  }
  const SpectralHistory I = duhamel_integral(F);
  const double omega = dispersion_symbol(2.0, 2.0);
  REQUIRE(omega == 30.0);
  double err = 0.0;
  for (int n = 0; n < w.nt(); ++n) {
    const double t = w.t(n);
    const cplx exact = c * (std::polar(1.0, omega * t) - 1.0) / cplx(0.0, omega);
    err = std::max(err, std::abs(I.slice(n)[g.index(g.index_x(1), g.index_y(1))] - exact));
  }
  CHECK(err < 1e-8);
}

TEST_CASE("Duhamel integral vanishes at t = 0") {
  const Grid2D g(16, 16, 10.0, 10.0);
  const TimeWindow w(64, 2.25);
  SpectralHistory F(g, w);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (int n = 0; n < w.nt(); ++n) F.set(n, forward_transform(g, [&] {
    std::vector<double> v(g.size());
    for (auto& x : v) x = n01(rng);
    return v;
  }()));
  const SpectralHistory I = duhamel_integral(F);
  for (const auto& c : I.slice(w.zero_index())) CHECK(c == cplx(0.0));
  const BoundarySamples q = q_trace(I);
  for (int m = 0; m < q.nx; ++m) CHECK(q.at(w.zero_index(), m) == 0.0);
}

TEST_CASE("nonlinearity of a cosine") {
  // u = cos x: -u u_x = sin(2x) / 2.
  const Grid2D g(16, 8, 2.0 * kPi, 2.0);
  const TimeWindow w(32, 2.25);
  SpaceTimeField u(g, w);
  for (int n = 0; n < w.nt(); ++n)
    for (int m = 0; m < g.nx(); ++m)
      for (int k = 0; k < g.ny(); ++k) u.slice(n)[g.index(m, k)] = std::cos(g.x(m));
  const double T = 0.5;
  const SpaceTimeField F = nonlinearity(u, T);
  double err = 0.0;
  for (int n = 0; n < w.nt(); ++n)
    for (int m = 0; m < g.nx(); ++m)
      err = std::max(err, std::abs(F.slice(n)[g.index(m, 1)] - cutoffs::mu(w.t(n) / T) * 0.5 * std::sin(2.0 * g.x(m))));
  CHECK(err < 1e-13);
}

TEST_CASE("zero data give the zero solution") {
  const Grid2D g(16, 32, 16.0, 16.0);
  const TimeWindow w(64, 2.25);
  const InitialData d(g);
  const BoundarySamples h(g.nx(), g.lx(), w);
  const PicardResult r = picard_solve(d, h, SolverParams{});
  for (const auto& c : r.u.data) CHECK(c == cplx(0.0));
  CHECK(r.diagnostics.converged);
}

TEST_CASE("PDE residual") {
  const Grid2D g(16, 16, 2.0 * kPi, 8.0);
  const TimeWindow w(512, 2.25);
  SpectralField2D f(g);
  f.mode(1, 0) = cplx(1.0);
  f.mode(-1, 0) = cplx(1.0);
  f.mode(1, 1) = cplx(0.0, 0.5);
  f.mode(-1, -1) = cplx(0.0, -0.5);
  const SpectralHistory u = free_history(f, w);
  ResidualRegion lin;
  lin.nonlinear = false;
  CHECK(pde_residual(u, lin) < 1e-8);

  SpectralHistory noise(g, w);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (int n = 0; n < w.nt(); ++n) {
    std::vector<double> v(g.size());
    for (auto& x : v) x = n01(rng);
    noise.set(n, project_zero_mode(forward_transform(g, v)));
  }
  CHECK(pde_residual(noise, lin) > 0.1);
}

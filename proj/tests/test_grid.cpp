#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kp5/errors.hpp"
#include "kp5/grid.hpp"

using namespace kp5;

namespace {

std::vector<double> random_values(const Grid2D& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(g.size());
  for (auto& x : v) x = n(rng);
  return v;
}

double coeff_l2(const SpectralField2D& f) {
  double acc = 0.0;
  for (const auto& c : f.coeffs) acc += std::norm(c);
  return std::sqrt(acc / (f.grid.lx() * f.grid.ly()));
}

}  // namespace

TEST_CASE("grid geometry") {
  const Grid2D g(8, 16, 4.0, 8.0);
  CHECK(g.x(0) == doctest::Approx(-2.0));
  CHECK(g.y(g.y0_index()) == doctest::Approx(0.0));
  CHECK(g.mode_x(3) == 3);
  CHECK(g.mode_x(5) == -3);
  CHECK(g.index_x(-3) == 5);
  CHECK(g.nyquist_x(4));
  CHECK(g.xi(1) == doctest::Approx(2.0 * std::numbers::pi / 4.0));
  CHECK_THROWS_AS(Grid2D(7, 8, 1.0, 1.0), Error);
  CHECK_THROWS_AS(Grid2D(8, 8, -1.0, 1.0), Error);
}

TEST_CASE("constant field has only the zero mode") {
  const Grid2D g(16, 16, 6.0, 10.0);
  const std::vector<double> one(g.size(), 1.0);
  const SpectralField2D f = forward_transform(g, one);
  CHECK(std::abs(f.mode(0, 0) - cplx(60.0)) < 1e-12);
  double rest = 0.0;
  for (int j = 0; j < g.nx(); ++j)
    for (int k = 0; k < g.ny(); ++k)
      if (j != 0 || k != 0) rest = std::max(rest, std::abs(f.at(j, k)));
  CHECK(rest < 1e-12);
}

TEST_CASE("cosine splits into two equal modes") {
  const Grid2D g(32, 8, 5.0, 3.0);
  std::vector<double> v(g.size());
  for (int m = 0; m < g.nx(); ++m)
    for (int n = 0; n < g.ny(); ++n) v[g.index(m, n)] = std::cos(2.0 * std::numbers::pi * g.x(m) / g.lx());
  const SpectralField2D f = forward_transform(g, v);
  CHECK(std::abs(f.mode(1, 0) - cplx(7.5)) < 1e-12);
  CHECK(std::abs(f.mode(-1, 0) - cplx(7.5)) < 1e-12);
  double rest = 0.0;
  for (int j = 0; j < g.nx(); ++j)
    for (int k = 0; k < g.ny(); ++k)
      if (std::abs(g.mode_x(j)) != 1 || k != 0) rest = std::max(rest, std::abs(f.at(j, k)));
  CHECK(rest < 1e-12);
}

TEST_CASE("round trip, Parseval and linearity") {
  const Grid2D g(32, 64, 10.0, 20.0);
  const auto u = random_values(g, 1);
  const auto v = random_values(g, 2);
  const SpectralField2D fu = forward_transform(g, u);
  const auto back = inverse_transform(fu);
  double err = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(back[i] - u[i]));
  CHECK(err < 1e-12);

  CHECK(coeff_l2(fu) == doctest::Approx(grid_l2(g, u)).epsilon(1e-10));

  std::vector<double> w(g.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 2.0 * u[i] - 3.0 * v[i];
  const SpectralField2D fw = forward_transform(g, w);
  const SpectralField2D fv = forward_transform(g, v);
  double lin = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) lin = std::max(lin, std::abs(fw.coeffs[i] - 2.0 * fu.coeffs[i] + 3.0 * fv.coeffs[i]));
  CHECK(lin < 1e-12 * g.lx() * g.ly());

  CHECK_THROWS_AS(forward_transform(g, std::vector<double>(10)), Error);
}

TEST_CASE("dispersion symbol") {
  CHECK(dispersion_symbol(1.0, 0.0) == 1.0);
  CHECK(dispersion_symbol(2.0, 2.0) == 30.0);
  CHECK(dispersion_symbol(-1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(dispersion_symbol(0.0, 1.0), Error);
}

TEST_CASE("zero-mode projection") {
  const Grid2D g(16, 16, 8.0, 8.0);
  SpectralField2D only(g);
  only.mode(0, 3) = cplx(1.0, 2.0);
  only.mode(0, -3) = cplx(1.0, -2.0);
  for (const auto& c : project_zero_mode(only).coeffs) CHECK(c == cplx(0.0));

  const SpectralField2D f = forward_transform(g, random_values(g, 3));
  const SpectralField2D p = project_zero_mode(f);
  const SpectralField2D pp = project_zero_mode(p);
  for (std::size_t i = 0; i < p.coeffs.size(); ++i) CHECK(p.coeffs[i] == pp.coeffs[i]);

  const auto v = inverse_transform(p);
  for (int n = 0; n < g.ny(); ++n) {
    double mean = 0.0;
    for (int m = 0; m < g.nx(); ++m) mean += v[g.index(m, n)];
    CHECK(std::abs(mean / g.nx()) < 1e-12);
  }

  // <P a, b> = <a, P b>
  const SpectralField2D a = forward_transform(g, random_values(g, 4));
  const SpectralField2D b = forward_transform(g, random_values(g, 5));
  const SpectralField2D pa = project_zero_mode(a), pb = project_zero_mode(b);
  cplx lhs(0.0), rhs(0.0);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
    lhs += pa.coeffs[i] * std::conj(b.coeffs[i]);
    rhs += a.coeffs[i] * std::conj(pb.coeffs[i]);
  }
  CHECK(std::abs(lhs - rhs) < 1e-9 * std::abs(lhs));
}

TEST_CASE("spectral derivative of a sine") {
  const Grid2D g(32, 8, 2.0 * std::numbers::pi, 4.0);
  std::vector<double> v(g.size());
  for (int m = 0; m < g.nx(); ++m)
    for (int n = 0; n < g.ny(); ++n) v[g.index(m, n)] = std::sin(3.0 * g.x(m));
  const auto d = inverse_transform(x_derivative(forward_transform(g, v)));
  double err = 0.0;
  for (int m = 0; m < g.nx(); ++m) err = std::max(err, std::abs(d[g.index(m, 0)] - 3.0 * std::cos(3.0 * g.x(m))));
  CHECK(err < 1e-12);
}

TEST_CASE("two-thirds rule") {
  const Grid2D g(24, 24, 1.0, 1.0);
  CHECK(inside_dealias(g, g.index_x(7), 0, 2.0 / 3.0));
  CHECK_FALSE(inside_dealias(g, g.index_x(8), 0, 2.0 / 3.0));
  CHECK_FALSE(inside_dealias(g, 0, g.index_y(-8), 2.0 / 3.0));
}

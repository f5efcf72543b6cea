#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kp5/data_prep.hpp"
#include "kp5/errors.hpp"

using namespace kp5;

TEST_CASE("reflection coefficients") {
  const double scales[3] = {1.0, 2.0, 3.0};
  const auto a = reflection_coefficients(scales);
  REQUIRE(a.size() == 3);
  CHECK(a[0] == doctest::Approx(6.0));
  CHECK(a[1] == doctest::Approx(-8.0));
  CHECK(a[2] == doctest::Approx(3.0));
  CHECK_THROWS_AS(reflection_coefficients(std::span<const double>()), Error);
}

TEST_CASE("Hestenes extension reproduces quadratics in y") {
  const Grid2D g(8, 64, 4.0, 8.0);
  const auto p = [](double x, double y) { return (1.0 + x) * (1.0 - 2.0 * y + 0.5 * y * y); };
  const InitialData d = InitialData::from_function(g, p);
  const auto e = extend_initial_values(d);
  const int y0 = g.y0_index();
  for (int m = 0; m < g.nx(); ++m) {
    for (int n = 0; n < d.rows(); ++n) CHECK(e[g.index(m, y0 + n)] == d.at(m, n));
    // 3 n dy must stay inside the upper half.
    for (int n = 1; 3 * n < d.rows(); ++n)
      CHECK(e[g.index(m, y0 - n)] == doctest::Approx(p(g.x(m), -n * g.dy())));
  }
}

TEST_CASE("extension of decayed data is smooth and projected") {
  const Grid2D g(32, 64, 16.0, 16.0);
  const InitialData d =
      InitialData::from_function(g, [](double x, double y) { return x * std::exp(-0.25 * x * x - y * y); });
  std::vector<std::string> warnings;
  const SpectralField2D f = extend_initial(d, &warnings);
  CHECK(warnings.empty());
  for (int k = 0; k < g.ny(); ++k) CHECK(f.at(0, k) == cplx(0.0));

  const InitialData flat = InitialData::from_function(g, [](double x, double) { return x * std::exp(-x * x); });
  warnings.clear();
  extend_initial(flat, &warnings);
  CHECK(warnings.size() == 1);
}

TEST_CASE("corner compatibility") {
  const Grid2D g(64, 16, 16.0, 4.0);
  const TimeWindow w(64, 2.5);
  const InitialData d = InitialData::from_function(g, [](double x, double) { return std::exp(-x * x); });
  const BoundarySamples zero(g.nx(), g.lx(), w);
  CHECK(compatibility_check(d, zero, 1.0) == doctest::Approx(std::pow(std::numbers::pi / 2.0, 0.25)).epsilon(1e-10));
  CHECK(compatibility_check(d, zero, 0.3) == 0.0);

  const BoundarySamples same =
      BoundarySamples::from_function(g.nx(), g.lx(), w, [](double x, double t) { return std::exp(-x * x) * (1.0 + t); });
  CHECK(compatibility_check(d, same, 1.0) < 1e-14);
  CHECK_THROWS_AS(compatibility_check(d, BoundarySamples(8, g.lx(), w), 1.0), Error);
}

TEST_CASE("extend_boundary enforces the trace condition above s = 1/2") {
  const TimeWindow w(128, 2.25);
  const auto fn = [](double x, double t) { return std::exp(-x * x / 9.0) * std::exp(-4.0 * t * t); };
  const BoundarySamples h = BoundarySamples::from_function(32, 24.0, w, fn);
  CHECK_THROWS_AS(extend_boundary(h, 1.0), Error);
  const BoundaryData low = extend_boundary(h, 0.3);
  CHECK_FALSE(low.zero);
  // Cut to t > 0.
  for (int n = 0; n < w.zero_index(); ++n)
    for (int m = 0; m < h.nx; ++m) CHECK(low.extended.at(n, m) == 0.0);

  const BoundaryData none = extend_boundary(h, 1.0, &h);
  CHECK(none.zero);
}

TEST_CASE("Sobolev samples") {
  const Grid2D g(32, 32, 20.0, 20.0);
  const SpectralField2D a = make_sobolev_sample(1.0, 7, g);
  const SpectralField2D b = make_sobolev_sample(1.0, 7, g);
  const SpectralField2D c = make_sobolev_sample(1.0, 8, g);
  CHECK(a.coeffs == b.coeffs);
  CHECK(a.coeffs != c.coeffs);
  for (int k = 0; k < g.ny(); ++k) CHECK(a.at(0, k) == cplx(0.0));
  for (int k = 0; k < g.ny(); ++k) CHECK(a.at(g.nx() / 2, k) == cplx(0.0));

  // Real field: the inverse transform of a Hermitian spectrum round-trips.
  const auto v = inverse_transform(a);
  const SpectralField2D back = forward_transform(g, v);
  double err = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) err = std::max(err, std::abs(back.coeffs[i] - a.coeffs[i]));
  CHECK(err < 1e-10);
  CHECK_THROWS_AS(make_sobolev_sample(-1.0, 1, g), Error);
}

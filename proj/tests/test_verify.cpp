#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kp5/errors.hpp"
#include "kp5/verify.hpp"

using namespace kp5;
using namespace kp5::verify;

TEST_CASE("resonance function") {
  CHECK(resonance_closed(2.0, 1.0, 0.0, 0.0) == doctest::Approx(-30.0));
  CHECK(resonance_closed(2.0, 1.0, 1.0, 0.0) == doctest::Approx(-30.5));
  const long double d = resonance_direct(1.7L, -0.6L, 3.0L, 2.5L, 11.0L, -4.0L);
  CHECK(static_cast<double>(d) == doctest::Approx(resonance_closed(1.7, -0.6, 3.0, 2.5)).epsilon(1e-12));
  const ResonanceStats st = check_resonance_identity(1000, 2);
  CHECK(st.samples == 1000);
  CHECK(st.max_relative_error < 1e-10);
  CHECK(st.same_sign);
  CHECK(st.min_ratio_to_m >= 1.0 - 1e-12);
}

TEST_CASE("phi_beta") {
  CHECK(phi_beta(2.0, 0.0) == doctest::Approx(1.0));
  CHECK(phi_beta(0.0, 3.0) == doctest::Approx(7.0));
  CHECK(phi_beta(1.5, -4.0) == doctest::Approx(phi_beta(1.5, 4.0)));
}

TEST_CASE("calculus lemma") {
  for (double k1 : {0.0, 3.0, -50.0}) CHECK(calculus_lemma_lhs(2.0, 0.0, k1, 7.0) == doctest::Approx(std::numbers::pi).epsilon(1e-6));
  CHECK(calculus_lemma_lhs(0.8, 0.6, 1.0, 2.0) == doctest::Approx(calculus_lemma_lhs(0.8, 0.6, 11.0, 12.0)).epsilon(1e-6));
  CHECK_THROWS_AS(calculus_lemma_check(0.5, 0.4, 0.0, 1.0), Error);
  CHECK_THROWS_AS(calculus_lemma_check(0.6, 0.7, 0.0, 1.0), Error);
  CHECK(calculus_lemma_check(1.0, 0.5, 0.0, 100.0) > 0.0);
}

TEST_CASE("Schur test") {
  const std::vector<double> p{1.0, 2.0, 0.5}, q{1.0, 3.0, 1.0, 0.25};
  const SchurResult zero = schur_bound_check(Eigen::MatrixXd::Zero(3, 4), p, q);
  CHECK(zero.opnorm == 0.0);
  CHECK(zero.holds);

  // K = p q^T: Schur's bound is attained.
  Eigen::VectorXd u(3), v(4);
  for (int i = 0; i < 3; ++i) u(i) = p[i];
  for (int j = 0; j < 4; ++j) v(j) = q[j];
  const SchurResult one = schur_bound_check(u * v.transpose(), p, q);
  CHECK(one.opnorm == doctest::Approx(u.norm() * v.norm()).epsilon(1e-10));
  CHECK(one.bound == doctest::Approx(one.opnorm).epsilon(1e-10));
  CHECK(one.holds);

  CHECK_THROWS_AS(schur_bound_check(Eigen::MatrixXd::Ones(2, 2), p, q), Error);
  const SchurSweep sweep = schur_random_kernels(5, 3);
  CHECK(sweep.kernels == 5);
  CHECK(sweep.failures == 0);
}

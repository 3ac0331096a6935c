#include <cmath>

#include "doctest.h"
#include "rayleigh/fisher.hpp"

using namespace rayleigh;

TEST_CASE("sld qfim for a diagonal family") {
  Eigen::Matrix2d rho = Eigen::Vector2d(0.3, 0.7).asDiagonal();
  Eigen::Matrix2d d = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  const Eigen::MatrixXd J = qfim_from_sld(rho, {d}, 0.5);
  CHECK(J(0, 0) == doctest::Approx(0.5 * (1 / 0.3 + 1 / 0.7)));
}

TEST_CASE("sld qfim for a rotating pure state") {
  // |ψ(t)> = (cos t, sin t): QFI = 4 per unit parameter
  const double t = 0.3;
  const Eigen::Vector2d v(std::cos(t), std::sin(t)), dv(-std::sin(t), std::cos(t));
  const Eigen::Matrix2d rho = v * v.transpose();
  const Eigen::Matrix2d drho = dv * v.transpose() + v * dv.transpose();
  CHECK(qfim_from_sld(rho, {drho}, 1.0)(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("rho2 is linear in the moment matrix and has the expected trace") {
  const DeltaK2D dk{0.6, 0.4, 0.2};
  Eigen::Matrix2d A, B;
  A << 0.01, 0.002, 0.002, 0.02;
  B << 0.03, -0.001, -0.001, 0.005;
  CHECK((rho2(A + 2 * B, dk) - rho2(A, dk) - 2 * rho2(B, dk)).cwiseAbs().maxCoeff() < 1e-16);
  const Eigen::Matrix2d r = rho2(A, dk);
  CHECK(r.trace() == doctest::Approx(dk.kx * dk.kx * A(0, 0) + dk.ky * dk.ky * A(1, 1) +
                                     2 * dk.r * dk.kx * dk.ky * A(0, 1)));
  CHECK((r - r.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("qfim over X, Y, beta") {
  const double eps = 0.1, X = 0.05, Y = 0.08, beta = 0.4;
  const DeltaK2D dk{0.5, 0.3, 0.0};
  const FisherReport J = qfim_rho2(dk, X, Y, beta, eps);
  REQUIRE(J.size() == 3);
  CHECK(J.params[2] == "beta");
  CHECK(J(0, 0) == doctest::Approx(4 * eps * 0.25).epsilon(1e-10));
  CHECK(J(1, 1) == doctest::Approx(4 * eps * 0.09).epsilon(1e-10));
  const double jbb = 4 * eps * 0.25 * 0.09 * X * X * Y * Y / ((0.25 * X * X + 0.09 * Y * Y) * (1 - beta * beta));
  CHECK(J(2, 2) == doctest::Approx(jbb).epsilon(1e-10));
  CHECK(std::abs(J(0, 2)) < 1e-12);
  CHECK(J.symmetric());
  CHECK(J.positive_semidefinite());
}

TEST_CASE("perfect correlation drops beta and gives the pure-state matrix") {
  const DeltaK2D dk{0.5, 0.4, 0.3};
  const FisherReport J = qfim_rho2(dk, 0.05, 0.02, 1.0, 0.2);
  REQUIRE(J.size() == 2);
  CHECK(J(0, 0) == doctest::Approx(4 * 0.2 * 0.25));
  CHECK(J(0, 1) == doctest::Approx(4 * 0.2 * 0.3 * 0.5 * 0.4));
  CHECK(J(1, 1) == doctest::Approx(4 * 0.2 * 0.16));
  CHECK_THROWS_AS(qfim_rho2(dk, 0.05, 0.02, 1.2, 0.2), Error);
}

TEST_CASE("qfim over the principal axes") {
  const DeltaK2D dk{0.5, 0.5, 0.0};
  const AngleQfim a = qfim_angle(dk, 0.1, 0.04, 0.6, 0.05);
  const double f = 4 * 0.05 * 0.25;
  CHECK(a.report(0, 0) == doctest::Approx(f));
  CHECK(a.report(1, 1) == doctest::Approx(f));
  CHECK(a.report(2, 2) == doctest::Approx(f * std::pow(0.01 - 0.0016, 2) / (0.01 + 0.0016)));
  // projector pairs are orthonormal and mutually unbiased
  CHECK((a.basis1.transpose() * a.basis1 - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(a.basis1.col(0).dot(a.basis2.col(0))) == doctest::Approx(std::sqrt(0.5)));
  CHECK(qfim_angle(dk, 0.05, 0.05, 0.3, 0.05).report(2, 2) == 0.0);
  CHECK_THROWS_AS(qfim_angle(DeltaK2D{0.5, 0.4, 0.0}, 0.1, 0.04, 0.6, 0.05), Error);
}

TEST_CASE("optimal beta angle") {
  CHECK(optimal_beta_angle(0.1, 0.1, 0.5) == 0.0);
  CHECK(optimal_beta_angle(0.2, 0.1, 0.5) == doctest::Approx(0.5 * std::atan(0.5 * 0.03 / 0.04)));
}

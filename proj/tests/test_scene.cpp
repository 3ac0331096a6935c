#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "rayleigh/scene.hpp"

using namespace rayleigh;

TEST_CASE("moments of a two-point scene") {
  const Scene s = make_scene((Eigen::VectorXd(2) << 0.1, 0.5).finished(), Eigen::VectorXd::Ones(2), 0.01);
  const MomentVector m = moments(s, 6);
  CHECK(m.xbar == doctest::Approx(0.3));
  CHECK(m.s == doctest::Approx(0.4));
  CHECK(m.radicand(1) == 0.0);
  CHECK(m.M(2) == doctest::Approx(0.2));
  CHECK(m.radicand(3) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(m.M(4) == doctest::Approx(0.2));
}

TEST_CASE("odd moments carry sign") {
  const Scene s = make_scene((Eigen::VectorXd(3) << -0.6, 0.1, 0.5).finished(),
                             (Eigen::VectorXd(3) << 0.5, 0.3, 0.2).finished(), 0.01);
  const MomentVector m = moments(s, 5);
  double mu3 = 0.0;
  for (int j = 0; j < 3; ++j) mu3 += s.gamma(j) * std::pow(s.x(j) - m.xbar, 3);
  CHECK(m.radicand(3) == doctest::Approx(mu3).epsilon(1e-13));
  CHECK(m.sign(3) == (mu3 < 0 ? -1 : 1));
  CHECK(m.magnitude(3) == doctest::Approx(std::cbrt(std::abs(mu3))).epsilon(1e-13));
}

TEST_CASE("scaled family keeps the centroid and scales every moment") {
  const Scene shape = make_scene((Eigen::VectorXd(3) << -0.6, 0.1, 0.5).finished(),
                                 (Eigen::VectorXd(3) << 0.5, 0.3, 0.2).finished(), 0.01);
  const Scene a = scaled_family(shape, 0.02), b = scaled_family(shape, 0.04);
  CHECK(a.extent() == doctest::Approx(0.02));
  CHECK(a.centroid_x() == doctest::Approx(shape.centroid_x()));
  const MomentVector ma = moments(a, 6), mb = moments(b, 6);
  for (int k = 2; k <= 6; ++k) CHECK(mb.M(k) == doctest::Approx(2 * ma.M(k)).epsilon(1e-12));
}

TEST_CASE("2D second-moment parametrizations agree") {
  const Scene s = make_scene_2d((Eigen::VectorXd(3) << 0.0, 0.1, -0.05).finished(),
                                (Eigen::VectorXd(3) << 0.0, 0.03, 0.08).finished(), Eigen::VectorXd::Ones(3), 0.1);
  const SecondMoments2D p = second_moment_params_2d(s);
  const Eigen::MatrixXd mu = raw_moments_2d(s, 2, s.centroid_x(), s.centroid_y());
  CHECK(p.X * p.X == doctest::Approx(mu(2, 0)));
  CHECK(p.Y * p.Y == doctest::Approx(mu(0, 2)));
  CHECK(p.beta * p.X * p.Y == doctest::Approx(mu(1, 1)));
  // eigenvalues of the covariance are Λ1², Λ2²
  Eigen::Matrix2d cov;
  cov << mu(2, 0), mu(1, 1), mu(1, 1), mu(0, 2);
  const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(cov).eigenvalues();
  CHECK(p.lambda1 * p.lambda1 == doctest::Approx(ev(1)));
  CHECK(p.lambda2 * p.lambda2 == doctest::Approx(ev(0)));
}

TEST_CASE("scene file round trip") {
  const std::string path = "test_scene_tmp.txt";
  {
    std::ofstream f(path);
    f << "dimension=1\nepsilon=0.5\n# comment\n-0.1 1\n0.2 3\n";
  }
  const Scene s = load_scene(path);
  std::remove(path.c_str());
  CHECK(s.epsilon == 0.5);
  CHECK(s.size() == 2);
  CHECK(s.gamma(1) == doctest::Approx(0.75));
}

TEST_CASE("scene validation") {
  CHECK_THROWS_AS(make_scene(Eigen::VectorXd(0), Eigen::VectorXd(0), 0.1), Error);
  CHECK_THROWS_AS(make_scene(Eigen::VectorXd::Zero(2), (Eigen::VectorXd(2) << 1, -1).finished(), 0.1), Error);
  CHECK_THROWS_AS(make_scene(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2), -0.1), Error);
  const Scene point = make_scene(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2), 0.1);
  CHECK_THROWS_AS(scaled_family(point, 0.1), Error);
}

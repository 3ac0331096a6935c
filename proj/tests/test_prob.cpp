#include <cmath>

#include "doctest.h"
#include "rayleigh/prob.hpp"
#include "rayleigh/scene.hpp"

using namespace rayleigh;

namespace {

const DerivativeBasis& basis() {
  static const DerivativeBasis b = gram_schmidt_basis(PsfModel::gaussian(1.0), 5, 10);
  return b;
}

// Displaced Gaussian on Hermite-Gaussian modes: Poisson in Q = x²/(4σ²).
double hg_prob(int l, double x) {
  const double Q = x * x / 4.0;
  return std::exp(-Q) * std::pow(Q, l) / std::tgamma(l + 1.0);
}

Scene three_point(double eps) {
  return make_scene((Eigen::VectorXd(3) << -0.3, 0.05, 0.4).finished(),
                    (Eigen::VectorXd(3) << 0.5, 0.3, 0.2).finished(), eps);
}

}  // namespace

TEST_CASE("weak exact spade probabilities match the poisson law") {
  const double eps = 0.02;
  const Scene s = three_point(eps);
  const Povm p = with_frame(spade_povm(basis()), s.centroid_x(), false);
  const Eigen::VectorXd P = weak_exact_probs(s, basis(), p);
  CHECK(P(0) == doctest::Approx(1 - eps));
  for (int l = 0; l <= 5; ++l) {
    double expect = 0.0;
    for (int j = 0; j < 3; ++j) expect += s.gamma(j) * hg_prob(l, s.x(j) - s.centroid_x());
    CHECK(P(1 + l) == doctest::Approx(eps * expect).epsilon(1e-10));
  }
}

TEST_CASE("weak series converges to the exact probabilities within its remainder") {
  const Scene s = scaled_family(three_point(0.01), 0.3);
  const Povm p = with_frame(spade_povm(basis()), s.centroid_x(), false);
  const ProbSeries ser = weak_series(s, basis(), p);
  const Eigen::VectorXd mu = raw_moments(s, ser.kmax, ser.frame);
  const Eigen::VectorXd exact = weak_exact_probs(s, basis(), p);
  double prev = HUGE_VAL;
  for (int order : {2, 4, 6, 8}) {
    const Eigen::VectorXd err = (exact - ser.probabilities(mu, order)).cwiseAbs();
    CHECK((err.array() <= ser.remainder_bound(mu, order).array() + 1e-15).all());
    CHECK(err.maxCoeff() < prev);
    prev = err.maxCoeff();
  }
}

TEST_CASE("series coefficients are linear in epsilon") {
  const Povm p = interleaved_povm(basis(), PairParity::Odd);
  const ProbSeries a = weak_series(basis(), p, 0.01), b = weak_series(basis(), p, 0.03);
  const Eigen::VectorXd mu = raw_moments(scaled_family(three_point(0.01), 0.1), a.kmax, 0.0);
  const Eigen::VectorXd da = a.probabilities(mu) - a.vac * (1 - 0.01);
  const Eigen::VectorXd db = b.probabilities(mu) - b.vac * (1 - 0.03);
  CHECK((3 * da - db).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("wick closed forms: thermal and single-source identities") {
  // single source at the reference: |A0|² is exponential with mean ε
  for (double eps : {0.1, 1.0, 3.0}) {
    for (int k = 0; k <= 4; ++k) {
      const double direct = std::tgamma(k + 1.0) * std::pow(eps, k) / std::pow(1 + eps, k + 1);
      CHECK(wick_expectation(WickPattern::Thermal, k, eps, 0.0, 0.0) == doctest::Approx(direct).epsilon(1e-13));
    }
  }
  // A1 = d A0 for a single source at offset d
  const double eps = 0.4, d = 0.3;
  const double t2 = wick_expectation(WickPattern::Thermal, 2, eps, 0, 0);
  CHECK(wick_expectation(WickPattern::FirstOrder, 2, eps, d, d * d) == doctest::Approx(d * t2));
  CHECK(wick_expectation(WickPattern::FirstSquared, 2, eps, d, d * d) == doctest::Approx(d * d * t2));
  CHECK(wick_expectation(WickPattern::SecondOrder, 2, eps, d, d * d) == doctest::Approx(d * d * t2));
  CHECK(wick_expectation(WickPattern::FirstPair, 2, eps, d, d * d) == doctest::Approx(d * d * t2));
  CHECK_THROWS_AS(wick_expectation(WickPattern::FirstPair, 1, eps, d, d * d), Error);
}

TEST_CASE("strong series against the thermal monte carlo") {
  const DerivativeBasis b = gram_schmidt_basis(PsfModel::gaussian(1.0), 3, 6);
  const Scene s = scaled_family(three_point(0.5), 0.02);
  const Povm p = with_frame(dressed_povm(spade_povm(b), b, Dressing::Summed), s.centroid_x(), false);
  const StrongSeries ser = strong_series(b, p, 0.5);
  const Eigen::VectorXd mu = raw_moments(s, 2, p.frame);
  const Eigen::VectorXd P = ser.probabilities(mu(1), mu(2));
  const McEstimate mc = mc_gaussian_oracle(s, b, p, 200000, 9);
  for (Eigen::Index n = 0; n < P.size(); ++n)
    CHECK(std::abs(P(n) - mc.mean(n)) <= 4 * mc.se(n) + 1e-6);
}

TEST_CASE("2D weak series against direct overlaps") {
  const DerivativeBasis bx = gram_schmidt_basis(PsfModel::gaussian(1.0), 3, 6);
  const Basis2D b = separable_basis_2d(bx, bx);
  const Scene s = make_scene_2d((Eigen::VectorXd(3) << -0.01, 0.0, 0.012).finished(),
                                (Eigen::VectorXd(3) << 0.005, -0.01, 0.004).finished(),
                                (Eigen::VectorXd(3) << 0.3, 0.3, 0.4).finished(), 0.01);
  Scene c = s;
  c.x.array() -= s.centroid_x();
  c.y.array() -= s.centroid_y();
  const Povm p = table2d_povm(b, Family2D::B0, 3);
  const ProbSeries2D ser = weak_series_2d(b, p, 0.01);
  const Eigen::VectorXd series = ser.probabilities(raw_moments_2d(c, ser.kmax, 0, 0));
  const Eigen::VectorXd exact = weak_exact_probs_2d(c, b, p);
  CHECK((series - exact).cwiseAbs().maxCoeff() < 1e-12);
}

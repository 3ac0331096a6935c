// Randomized invariants over scenes and measurements.

#include <cmath>
#include <random>

#include "doctest.h"
#include "rayleigh/fisher.hpp"
#include "rayleigh/harness.hpp"
#include "rayleigh/sim.hpp"

using namespace rayleigh;

namespace {

const DerivativeBasis& basis() {
  static const DerivativeBasis b = gram_schmidt_basis(PsfModel::gaussian(1.0), 6);
  return b;
}

Scene random_scene(std::mt19937_64& rng, double eps) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int J = 2 + int(rng() % 4);
  Eigen::VectorXd x(J), w(J);
  for (int j = 0; j < J; ++j) {
    x(j) = u(rng);
    w(j) = 0.1 + std::abs(u(rng));
  }
  const double s = std::pow(10.0, -2.0 + (u(rng) + 1.0) / 2.0);  // 0.01 .. 0.1
  return scaled_family(make_scene(x, w, eps), s);
}

FisherReport series_fi(const Scene& s, const DerivativeBasis& b, const Povm& p, const std::vector<int>& params) {
  const MomentVector m = moments(s, b.kmax);
  return fi_from_series(weak_series(s, b, with_frame(p, m.xbar, false)), params, m);
}

}  // namespace

TEST_CASE("fisher matrices are symmetric and positive semidefinite") {
  std::mt19937_64 rng(7);
  const Povm families[] = {spade_povm(basis()), interleaved_povm(basis(), PairParity::Odd),
                           interleaved_povm(basis(), PairParity::Even), sliver_povm(basis().grid()),
                           direct_imaging_povm(basis().grid(), 0.1)};
  for (int trial = 0; trial < 10; ++trial) {
    const Scene s = random_scene(rng, 0.01);
    for (const Povm& p : families) {
      const FisherReport f = series_fi(s, basis(), p, {1, 2, 3, 4});
      CHECK(f.symmetric());
      CHECK(f.positive_semidefinite());
    }
  }
}

TEST_CASE("resolving more modes never loses information") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Scene s = random_scene(rng, 0.01);
    double prev = 0.0;
    for (int L = 1; L <= 6; ++L) {
      Povm p = spade_povm(basis());
      p.outcomes.erase(p.outcomes.begin() + 2 + L, p.outcomes.end() - 1);
      const double f = series_fi(s, basis(), p, {2})(0, 0);
      CHECK(f >= prev * (1 - 1e-12));
      prev = f;
    }
  }
}

TEST_CASE("weak fisher information is linear in epsilon") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    Scene s = random_scene(rng, 0.001);
    const double f1 = series_fi(s, basis(), spade_povm(basis()), {4})(0, 0);
    s.epsilon = 0.004;
    const double f4 = series_fi(s, basis(), spade_povm(basis()), {4})(0, 0);
    CHECK(f4 == doctest::Approx(4 * f1).epsilon(1e-10));
  }
}

TEST_CASE("fisher information scales as inverse length squared") {
  // stretching the PSF and the scene by c leaves probabilities unchanged
  const double c = 2.5;
  const DerivativeBasis wide = gram_schmidt_basis(PsfModel::gaussian(c), 6);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const Scene s = random_scene(rng, 0.01);
    Scene big = s;
    big.x *= c;
    for (int k : {2, 4}) {
      const double f = series_fi(s, basis(), spade_povm(basis()), {k})(0, 0);
      const double g = series_fi(big, wide, spade_povm(wide), {k})(0, 0);
      CHECK(g == doctest::Approx(f / (c * c)).epsilon(1e-8));
    }
  }
}

TEST_CASE("translation leaves centred fisher information unchanged") {
  std::mt19937_64 rng(19);
  const Scene s = random_scene(rng, 0.01);
  Scene moved = s;
  moved.x.array() += 0.37;
  const double f = series_fi(s, basis(), interleaved_povm(basis(), PairParity::Odd), {3})(0, 0);
  const double g = series_fi(moved, basis(), interleaved_povm(basis(), PairParity::Odd), {3})(0, 0);
  CHECK(g == doctest::Approx(f).epsilon(1e-9));
}

TEST_CASE("pipeline is deterministic under a fixed seed") {
  const Scene s = scaled_family(make_scene((Eigen::VectorXd(2) << -1, 1).finished(), Eigen::VectorXd::Ones(2), 0.01), 0.2);
  const Povm p = with_frame(spade_povm(basis()), s.centroid_x(), false);
  const VarianceStudy a = variance_study(s, basis(), p, 2, 1000000, 10, 99, EstimationMethod::MaxLikelihood, 0.01);
  const VarianceStudy b = variance_study(s, basis(), p, 2, 1000000, 10, 99, EstimationMethod::MaxLikelihood, 0.01);
  const VarianceStudy c = variance_study(s, basis(), p, 2, 1000000, 10, 100, EstimationMethod::MaxLikelihood, 0.01);
  CHECK(a.estimates == b.estimates);
  CHECK(a.estimates != c.estimates);
}

TEST_CASE("ml never ends above its inversion start") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 8; ++trial) {
    const Scene s = random_scene(rng, 0.05);
    const Povm p = with_frame(spade_povm(basis()), s.centroid_x(), false);
    const ProbSeries model = weak_series(s, basis(), p);
    const CountRecord r = sample_outcomes(weak_exact_probs(s, basis(), p), 1000000, 100 + trial);
    const MomentEstimate e = estimate_moments(r, model, {2, 4}, raw_moments(s, model.kmax, model.frame),
                                              EstimationMethod::MaxLikelihood);
    CHECK(e.deviance <= e.start_deviance + 1e-9);
  }
}

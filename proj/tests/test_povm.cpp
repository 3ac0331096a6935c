#include <numeric>

#include "doctest.h"
#include "rayleigh/povm.hpp"
#include "rayleigh/prob.hpp"
#include "rayleigh/scene.hpp"

using namespace rayleigh;

namespace {

const DerivativeBasis& basis() {
  static const DerivativeBasis b = gram_schmidt_basis(PsfModel::gaussian(1.0), 5);
  return b;
}

Scene scene() {
  return make_scene((Eigen::VectorXd(3) << -0.2, 0.05, 0.3).finished(),
                    (Eigen::VectorXd(3) << 0.5, 0.3, 0.2).finished(), 0.05);
}

// outcomes must be a complete measurement: probabilities add to one
void check_complete(const Povm& p) {
  const Scene s = scene();
  const Povm centred = with_frame(p, s.centroid_x(), false);
  const Eigen::VectorXd P = weak_exact_probs(s, basis(), centred);
  CHECK(P.size() == p.size());
  CHECK(P.sum() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(P.minCoeff() >= -1e-14);
}

}  // namespace

TEST_CASE("spade outcomes and labels") {
  const Povm p = spade_povm(basis());
  const auto labels = p.labels();
  REQUIRE(labels.size() == 8);
  CHECK(labels.front() == "vac");
  CHECK(labels[1] == "b0");
  CHECK(labels[6] == "b5");
  CHECK(labels.back() == "bucket");
  CHECK(p.has_bucket());
  check_complete(p);
}

TEST_CASE("every family is complete") {
  check_complete(interleaved_povm(basis(), PairParity::Even));
  check_complete(interleaved_povm(basis(), PairParity::Odd));
  check_complete(sliver_povm(basis().grid()));
  check_complete(direct_imaging_povm(basis().grid(), 0.1));
}

TEST_CASE("pair coefficients are unit and orthogonal") {
  const Eigen::VectorXcd a = pair_coeffs(5, 2, +1.0), b = pair_coeffs(5, 2, -1.0);
  CHECK(a.norm() == doctest::Approx(1.0));
  CHECK(std::abs(a.dot(b)) < 1e-15);
  CHECK(std::abs(a(2)) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("dressed povm keeps the totals") {
  const Povm d = dressed_povm(spade_povm(basis()), basis(), Dressing::Summed);
  CHECK(d.dressed());
  const StrongSeries s = strong_series(basis(), d, 0.5);
  CHECK(s.q0.sum() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(s.q1.sum()) < 1e-10);
  CHECK(std::abs(s.q2mu.sum() + s.q2m1.sum()) < 1e-10);
}

TEST_CASE("povm validation") {
  CHECK_THROWS_AS(direct_imaging_povm(basis().grid(), 1e-6), Error);
  const Povm p = spade_povm(basis());
  const Scene s = make_scene((Eigen::VectorXd(2) << 0.4, 0.6).finished(), Eigen::VectorXd::Ones(2), 0.1);
  // frame far from the centroid without the reference flag
  CHECK_THROWS_AS(weak_series(s, basis(), p), Error);
  CHECK_NOTHROW(weak_series(s, basis(), with_frame(p, 0.5, false)));
}

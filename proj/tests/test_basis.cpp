#include <cmath>

#include "doctest.h"
#include "rayleigh/basis.hpp"

using namespace rayleigh;

TEST_CASE("gram-schmidt modes are orthonormal with positive q") {
  for (double sigma : {0.7, 1.0, 2.0}) {
    const DerivativeBasis b = gram_schmidt_basis(PsfModel::gaussian(sigma), 8);
    CHECK(b.orthonormality_error() < 1e-10);
    for (int l = 0; l <= 8; ++l) {
      CHECK(b.q(l) > 0);
      CHECK(b.q(l) == doctest::Approx(std::pow(2 * sigma, -l) / std::sqrt(std::tgamma(l + 1.0))).epsilon(1e-8));
    }
  }
}

TEST_CASE("derivative modes of a gaussian are hermite-gaussian") {
  const DerivativeBasis b = gram_schmidt_basis(PsfModel::gaussian(1.0), 6);
  for (int l = 0; l <= 6; ++l) {
    const Eigen::VectorXcd h = hermite_gaussian(l, 1.0, b.grid().nodes).cast<cplx>();
    CHECK(std::abs(inner_product(b.grid(), h, b.modes.col(l))) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("overlaps are lower triangular with parity zeros") {
  const DerivativeBasis b = gram_schmidt_basis(PsfModel::gaussian(1.0), 5, 9);
  for (int m = 0; m <= 5; ++m) {
    for (int i = 0; i < m; ++i) CHECK(std::abs(b.overlap(m, i)) == 0.0);
    for (int i = m; i <= 9; ++i)
      if ((i - m) % 2 == 1) CHECK(std::abs(b.overlap(m, i)) == 0.0);
    CHECK(std::abs(b.overlap(m, m)) == doctest::Approx(b.q(m) * std::tgamma(m + 1.0)).epsilon(1e-10));
  }
}

TEST_CASE("sinc basis is orthonormal") {
  const DerivativeBasis b = gram_schmidt_basis(PsfModel::sinc(1.0), 4);
  CHECK(b.orthonormality_error() < 1e-8);
  for (int l = 0; l <= 4; ++l) CHECK(b.q(l) > 0);
}

TEST_CASE("2D separable basis multiplies q") {
  const DerivativeBasis bx = gram_schmidt_basis(PsfModel::gaussian(1.0), 3);
  const DerivativeBasis by = gram_schmidt_basis(PsfModel::gaussian(1.5), 2);
  const Basis2D b = separable_basis_2d(bx, by);
  CHECK(b.size() == 12);
  CHECK(b.q2d(2, 1) == doctest::Approx(bx.q(2) * by.q(1)));
}

TEST_CASE("basis validation") {
  CHECK_THROWS_AS(gram_schmidt_basis(PsfModel::gaussian(1.0), -1), Error);
  CHECK_THROWS_AS(gram_schmidt_basis(PsfModel::gaussian(1.0), 6, 41), Error);
  // kmax below lmax is raised to lmax
  CHECK(gram_schmidt_basis(PsfModel::gaussian(1.0), 6, 3).kmax == 6);
}

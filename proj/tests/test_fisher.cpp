#include <cmath>

#include "doctest.h"
#include "rayleigh/fisher.hpp"
#include "rayleigh/povm.hpp"

using namespace rayleigh;

namespace {

const DerivativeBasis& basis() {
  static const DerivativeBasis b = gram_schmidt_basis(PsfModel::gaussian(1.0), 6);
  return b;
}

Scene three_point(double s, double eps) {
  const Scene shape = make_scene((Eigen::VectorXd(3) << -0.6, 0.1, 0.5).finished(),
                                 (Eigen::VectorXd(3) << 0.5, 0.3, 0.2).finished(), eps);
  return scaled_family(shape, s);
}

FisherReport series_fi(const Scene& s, const Povm& p, const std::vector<int>& params) {
  const MomentVector m = moments(s, basis().kmax);
  return fi_from_series(weak_series(s, basis(), with_frame(p, m.xbar, false)), params, m);
}

}  // namespace

TEST_CASE("second moment under spade approaches 4 eps dk^2") {
  const double eps = 0.01;
  const Scene s = make_scene((Eigen::VectorXd(2) << -0.005, 0.005).finished(), Eigen::VectorXd::Ones(2), eps);
  const FisherReport f = series_fi(s, spade_povm(basis()), {2});
  CHECK(f.regime == Regime::Series);
  CHECK(f(0, 0) == doctest::Approx(4 * eps * 0.25).epsilon(1e-3));
  const MomentVector m = moments(s, basis().kmax);
  CHECK(fi_limit_formula(basis(), m, eps, {LimitFormula::Second, 1, 0})(0, 0) ==
        doctest::Approx(4 * eps * 0.25).epsilon(1e-12));
  // the even formula at l = 1 is the same number
  CHECK(fi_limit_formula(basis(), m, eps, {LimitFormula::Even, 1, 0})(0, 0) ==
        doctest::Approx(4 * eps * 0.25).epsilon(1e-12));
}

TEST_CASE("odd moment closed form against the series") {
  const double eps = 0.02;
  const Scene s = three_point(0.005, eps);
  const MomentVector m = moments(s, basis().kmax);
  const double cf = fi_limit_formula(basis(), m, eps, {LimitFormula::Odd, 1, 0})(0, 0);
  const double num = series_fi(s, interleaved_povm(basis(), PairParity::Odd), {3})(0, 0);
  CHECK(num == doctest::Approx(cf).epsilon(1e-3));
}

TEST_CASE("2D even closed form against the 2D series") {
  const DerivativeBasis bx = gram_schmidt_basis(PsfModel::gaussian(1.0), 4, 8);
  const Basis2D b = separable_basis_2d(bx, bx);
  const Scene s = make_scene_2d((Eigen::VectorXd(3) << -0.004, 0.001, 0.005).finished(),
                                (Eigen::VectorXd(3) << 0.002, -0.004, 0.003).finished(),
                                (Eigen::VectorXd(3) << 0.3, 0.4, 0.3).finished(), 0.01);
  Scene c = s;
  c.x.array() -= s.centroid_x();
  c.y.array() -= s.centroid_y();
  const MomentVector m = moments(c, 8);
  const ProbSeries2D ser = weak_series_2d(b, table2d_povm(b, Family2D::B0, 4), 0.01);
  const double num = fi_from_series_2d(ser, {{2, 0}}, m)(0, 0);
  const double cf = fi_limit_formula_2d(b, m, 0.01, {LimitFormula::Even2D, 1, 1})(0, 0);
  CHECK(num == doctest::Approx(cf).epsilon(1e-2));
}

TEST_CASE("strong series fisher information at small extent") {
  const double eps = 2.0;
  const Povm d = dressed_povm(spade_povm(basis()), basis(), Dressing::Summed);
  const StrongSeries ser = strong_series(basis(), d, eps);
  CHECK(strong_fi_limit(ser) == doctest::Approx(4 * eps * 0.25).epsilon(1e-8));
  const FisherReport f = fi_from_strong(ser, 0.0, 1e-4);
  CHECK(f.size() == 2);
  CHECK(f(1, 1) == doctest::Approx(strong_fi_limit(ser)).epsilon(1e-6));
}

TEST_CASE("crb inverts a regular matrix and reports a singular one") {
  const Scene s = three_point(0.05, 0.01);
  const FisherReport f = series_fi(s, spade_povm(basis()), {2, 4});
  const CrbReport c = crb(f);
  REQUIRE(c.invertible);
  const Eigen::MatrixXd inv = f.matrix.inverse();
  CHECK(c.matrix_bound(0) == doctest::Approx(inv(0, 0)));
  CHECK(c.diagonal_bound(1) == doctest::Approx(1 / f(1, 1)));
  CHECK(c.matrix_bound(1) >= c.diagonal_bound(1));

  // odd moments are invisible to plain spade
  const CrbReport sing = crb(series_fi(s, spade_povm(basis()), {2, 3}));
  CHECK_FALSE(sing.invertible);
  CHECK(std::isnan(sing.matrix_bound(0)));
  CHECK(std::isinf(sing.diagonal_bound(1)));
  CHECK_FALSE(sing.note.empty());
}

TEST_CASE("fisher validation") {
  const Scene s = three_point(0.05, 0.01);
  const MomentVector m = moments(s, basis().kmax);
  const ProbSeries off = weak_series(basis(), spade_povm(basis()), 0.01);  // frame at 0, centroid not
  CHECK_THROWS_AS(fi_from_series(off, {2}, m), Error);
  const ProbSeries ser = weak_series(s, basis(), with_frame(spade_povm(basis()), m.xbar, false));
  CHECK_THROWS_AS(fi_from_series(ser, {basis().kmax}, m), Error);
  MomentVector flat = m;
  flat.radicand(2) = flat.magnitude(2) = 0.0;
  CHECK_THROWS_AS(fi_limit_formula(basis(), flat, 0.01, {LimitFormula::Odd, 1, 0}), Error);
  try {
    fi_limit_formula(basis(), flat, 0.01, {LimitFormula::Odd, 1, 0});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroEvenMoment);
  }
}

TEST_CASE("centroid scheme constants") {
  const PsfModel psf = PsfModel::gaussian(1.0);
  const CentroidScheme w = centroid_scheme(psf, 0.1, SourceMode::Weak);
  CHECK(w.fi11 == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(w.split_fim(0, 0) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(w.qfim(1, 1) == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(w.efficiency == doctest::Approx(0.96414).epsilon(1e-5));
  CHECK(w.trace_bound == doctest::Approx(40.0).epsilon(1e-10));
  const CentroidScheme st = centroid_scheme(psf, 0.1, SourceMode::Strong);
  CHECK(st.trace_bound == doctest::Approx((1 + std::exp(1.0)) / 0.1).epsilon(1e-10));
}

TEST_CASE("two-photon counterexample coefficients") {
  const DerivativeBasis b = gram_schmidt_basis(PsfModel::gaussian(1.0), 4);
  const Scene s = make_scene((Eigen::VectorXd(4) << -0.15, -0.05, 0.05, 0.15).finished(),
                             Eigen::VectorXd::Ones(4), 1.0);
  const AppFResult r = appf_counterexample(s, b);
  CHECK(r.improvement);
  CHECK(r.subspace_qfi == doctest::Approx(r.numeric_subspace_qfi).epsilon(1e-8));
  CHECK(r.ratio == doctest::Approx(r.subspace_qfi / r.diagonal_fi));
  CHECK(r.A44 * r.A22 > r.A42 * r.A42);
  const AppFMc mc = appf_monte_carlo(s, b, 200000, 3);
  const Eigen::Vector3d cf(r.A44, r.A42, r.A22);
  CHECK(((mc.mean - cf).cwiseAbs().array() <= 4 * mc.se.array()).all());
  // the as-printed normalization rescales the b_2² block only
  const AppFResult p = appf_counterexample(s, b, AppFPrefactor::AsPrinted);
  CHECK(p.A44 == doctest::Approx(r.A44));
  CHECK(p.A22 / r.A22 == doctest::Approx(std::pow(std::sqrt(2.0) / 4, 2)));
}

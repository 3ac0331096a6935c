#include "rayleigh/prob.hpp"

#include "forms.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace rayleigh {

using namespace detail;

namespace {

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

void clean(Eigen::MatrixXcd& m, double tol) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) < tol) m(i, j) = 0.0;
}

}  // namespace

Eigen::VectorXd ProbSeries::probabilities(const Eigen::VectorXd& mu, int order) const {
  if (order < 0 || order > kmax) order = kmax;
  if (mu.size() < order + 1) throw Error(ErrorCode::InvalidArgument, "too few moments for the series order");
  Eigen::VectorXd scaled(order + 1);
  double fact = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) fact *= k;
    scaled(k) = mu(k) / fact;
  }
  return (1.0 - epsilon) * vac + epsilon * p.leftCols(order + 1) * scaled;
}

Eigen::VectorXd ProbSeries::remainder_bound(const Eigen::VectorXd& mu, int order) const {
  Eigen::VectorXd tail = Eigen::VectorXd::Zero(size());
  double fact = 1.0;
  for (int k = 0; k <= kmax && k < mu.size(); ++k) {
    if (k > 0) fact *= k;
    if (k > order) tail += (p.col(k) * (mu(k) / fact)).cwiseAbs();
  }
  return 2.0 * epsilon * tail;
}

SinglePhotonForms single_photon_forms(const DerivativeBasis& basis, const Povm& povm) {
  if (povm.dimension != 1) throw Error(ErrorCode::InvalidArgument, "1D forms requested for a 2D POVM");
  const int K = basis.kmax;
  const Eigen::Index n = povm.size();
  SinglePhotonForms out;
  out.G.assign(std::size_t(n), Eigen::MatrixXcd::Zero(K + 1, K + 1));
  out.vac = Eigen::VectorXd::Zero(n);

  bool all_modes = true;
  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Identity(basis.lmax + 1, basis.lmax + 1);
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(K + 1, K + 1);
  double vac_total = 0.0;

  for (Eigen::Index i = 0; i < n; ++i) {
    const OutcomeOp& o = povm.outcomes[std::size_t(i)];
    if (o.kind == OutcomeKind::Bucket) continue;
    out.vac(i) = vacuum_part(o);
    vac_total += out.vac(i);
    if (!has_single_photon_part(o)) continue;
    if (!mode_like(o)) all_modes = false;
    if (o.kind == OutcomeKind::Mode) {
      if (o.coeffs.size() != basis.lmax + 1)
        throw Error(ErrorCode::InvalidArgument, "mode coefficients do not match the basis size");
      Q -= o.coeffs * o.coeffs.adjoint();
    } else if (o.kind == OutcomeKind::Fundamental) {
      Q(0, 0) -= 1.0;
    }
    out.G[std::size_t(i)] = base_operator_form(basis, o, basis.derivs, basis.overlap);
    total += out.G[std::size_t(i)];
  }

  if (povm.has_bucket()) {
    const Eigen::Index b = n - 1;
    out.vac(b) = std::abs(1.0 - vac_total) < 1e-12 ? 0.0 : 1.0 - vac_total;
    Eigen::MatrixXcd G;
    if (all_modes) {
      // span part through the leftover mode projector, exact zeros kept exact
      clean(Q, 1e-12);
      G = basis.overlap.adjoint() * Q * basis.overlap;
      for (int i = basis.lmax + 1; i <= K; ++i)
        for (int j = basis.lmax + 1; j <= K; ++j)
          G(i, j) += basis.dgram(i, j) - basis.overlap.col(i).dot(basis.overlap.col(j));
    } else {
      G = basis.dgram - total;
      for (int i = 0; i <= K; ++i)
        for (int j = 0; j <= K; ++j) {
          const double scale = std::sqrt(std::abs(basis.dgram(i, i) * basis.dgram(j, j)));
          if (std::abs(G(i, j)) < 1e-11 * scale) G(i, j) = 0.0;
        }
    }
    out.G[std::size_t(b)] = G;
  }
  return out;
}

ProbSeries weak_series(const DerivativeBasis& basis, const Povm& povm, double epsilon, int kmax) {
  if (kmax < 0 || kmax > basis.kmax) kmax = basis.kmax;
  const SinglePhotonForms forms = single_photon_forms(basis, povm);
  ProbSeries s;
  s.labels = povm.labels();
  s.epsilon = epsilon;
  s.frame = povm.frame;
  s.kmax = kmax;
  s.vac = forms.vac;
  s.p = Eigen::MatrixXd::Zero(povm.size(), kmax + 1);
  for (Eigen::Index n = 0; n < povm.size(); ++n) {
    const Eigen::MatrixXcd& G = forms.G[std::size_t(n)];
    for (int k = 0; k <= kmax; ++k) {
      double acc = 0.0;
      for (int i = 0; i <= k; ++i) acc += binomial(k, i) * std::real(G(i, k - i));
      s.p(n, k) = acc;
    }
  }
  return s;
}

ProbSeries weak_series(const Scene& scene, const DerivativeBasis& basis, const Povm& povm, int kmax) {
  validate(scene);
  check_frame(scene, povm, basis.psf.sigma());
  if (kmax < 0 || kmax > basis.kmax) kmax = basis.kmax;
  const double r0 = convergence_radius_lower_bound(basis.psf, std::max(1, std::min(kmax, basis.psf.max_order())));
  const double reach = std::max(scene.extent(), (scene.x.array() - povm.frame).abs().maxCoeff());
  if (!(reach < r0))
    throw Error(ErrorCode::OutsideConvergenceRadius,
                fmt::format("scene reach {} is not below the convergence radius bound {}", reach, r0));
  return weak_series(basis, povm, scene.epsilon, kmax);
}

Eigen::VectorXd weak_exact_probs(const Scene& scene, const DerivativeBasis& basis, const Povm& povm) {
  validate(scene);
  check_frame(scene, povm, basis.psf.sigma());
  const Grid& grid = basis.grid();
  const Eigen::Index J = scene.size();
  Eigen::MatrixXcd phi(grid.size(), J);
  for (Eigen::Index j = 0; j < J; ++j) phi.col(j) = basis.psf.derivative(0, scene.x(j) - povm.frame);
  const Eigen::MatrixXcd b_phi = basis.modes.adjoint() * grid.weights.asDiagonal() * phi;

  const Eigen::Index n = povm.size();
  Eigen::VectorXd P = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd single = Eigen::VectorXd::Zero(n);
  double vac_total = 0.0, single_total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const OutcomeOp& o = povm.outcomes[std::size_t(i)];
    if (o.kind == OutcomeKind::Bucket) continue;
    P(i) = (1.0 - scene.epsilon) * vacuum_part(o);
    vac_total += vacuum_part(o);
    if (!has_single_photon_part(o)) continue;
    const Eigen::MatrixXcd form = base_operator_form(basis, o, phi, b_phi);
    single(i) = scene.gamma.dot(form.diagonal().real());
    single_total += single(i);
    P(i) += scene.epsilon * single(i);
  }
  if (povm.has_bucket()) {
    const double norms = scene.gamma.dot((phi.adjoint() * grid.weights.asDiagonal() * phi).diagonal().real());
    P(n - 1) = (1.0 - scene.epsilon) * (1.0 - vac_total) + scene.epsilon * (norms - single_total);
  }
  return P;
}

// ---------------------------------------------------------------------------
// strong sources

Eigen::VectorXd StrongSeries::probabilities(double m1, double mu2) const {
  return q0 + q1 * m1 + q2mu * mu2 + q2m1 * (m1 * m1);
}

int dressing_truncation(double epsilon) {
  if (!(epsilon > 0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  const double r = epsilon / (1.0 + epsilon);
  const double lr = std::log(r);
  for (int K = 1; K <= 100000; ++K)
    if (K * lr + 2.0 * std::log(K + 3.0) < std::log(1e-12)) return K;
  throw Error(ErrorCode::TruncationFailure,
              fmt::format("thermal sums at epsilon = {} need more than 1e5 terms", epsilon));
}

StrongSeries strong_series(const DerivativeBasis& basis, const Povm& povm, double epsilon) {
  if (povm.dimension != 1) throw Error(ErrorCode::InvalidArgument, "strong series is 1D");
  if (basis.kmax < 2) throw Error(ErrorCode::OrderTooHigh, "strong series needs derivatives to order 2");
  const int K = dressing_truncation(epsilon);
  const double r = epsilon / (1.0 + epsilon);
  const double inv = 1.0 / (1.0 + epsilon);
  const double dk2 = std::real(basis.dgram(1, 1));
  const cplx dd01 = basis.overlap(0, 1);
  const cplx dd02 = basis.overlap(0, 2);

  // r^k for k = 0..K+4
  std::vector<double> rp(std::size_t(K + 5));
  rp[0] = 1.0;
  for (std::size_t k = 1; k < rp.size(); ++k) rp[k] = rp[k - 1] * r;

  const Eigen::Index n = povm.size();
  StrongSeries s;
  s.labels = povm.labels();
  s.epsilon = epsilon;
  s.frame = povm.frame;
  s.truncation = K;
  s.q0 = s.q1 = s.q2mu = s.q2m1 = Eigen::VectorXd::Zero(n);

  struct Term {
    double f0 = 0, f1 = 0, f11 = 0, f2 = 0, f1b = 0;
  };
  auto accumulate = [&](Eigen::Index i, int k, const Term& t) {
    const double rk1 = rp[std::size_t(k) + 1];
    s.q0(i) += rp[std::size_t(k)] * t.f0 * inv;
    s.q1(i) += 2.0 * rk1 * t.f1 * inv;
    const double a = rk1 * t.f11;
    s.q2mu(i) += a;
    s.q2m1(i) += -a + (k + 1) * rk1 * t.f11 * inv;
    const double b = rk1 * t.f2 * inv;
    s.q2mu(i) += b;
    s.q2m1(i) += b;
    s.q2m1(i) += rp[std::size_t(k) + 2] * t.f1b * inv;
    const double e = dk2 * rk1 * (k - epsilon) * t.f0 * inv;
    s.q2mu(i) += e;
    s.q2m1(i) -= e;
  };

  for (Eigen::Index i = 0; i < n; ++i) {
    const OutcomeOp& o = povm.outcomes[std::size_t(i)];
    if (o.kind == OutcomeKind::Bucket) continue;
    if (o.kind == OutcomeKind::Vacuum) {
      accumulate(i, 0, Term{1.0});
      continue;
    }
    if (o.kind == OutcomeKind::Fundamental) {
      auto fund = [&](int N) {
        // state with N fundamental photons
        Term t0;
        t0.f0 = 1.0;
        accumulate(i, N, t0);
        if (N >= 1) {
          Term t1;
          t1.f1 = N * std::real(dd01);
          t1.f11 = N * std::norm(dd01);
          t1.f2 = N * std::real(dd02);
          accumulate(i, N - 1, t1);
        }
        if (N >= 2) {
          Term t2;
          t2.f1b = N * (N - 1) * std::real(dd01 * dd01);
          accumulate(i, N - 2, t2);
        }
      };
      if (o.photons >= 0) {
        if (o.photons <= K + 1) fund(o.photons);
      } else {
        for (int N = 0; N <= K + 1; ++N) fund(N);
      }
      continue;
    }
    const Eigen::MatrixXcd G = base_operator_form(basis, o, basis.derivs, basis.overlap);
    const double g11 = std::real(G(1, 1));
    switch (o.dressing) {
      case Dressing::None: {
        Term t;
        t.f11 = g11;
        t.f1 = std::real(G(0, 1));
        t.f2 = std::real(G(0, 2));
        accumulate(i, 0, t);
        Term t0;
        t0.f0 = std::real(G(0, 0));
        accumulate(i, 1, t0);
        break;
      }
      case Dressing::Summed:
        for (int k = 0; k <= K; ++k) accumulate(i, k, Term{0, 0, g11});
        break;
      case Dressing::PerCount:
        if (o.photons <= K) accumulate(i, o.photons, Term{0, 0, g11});
        break;
    }
  }

  if (povm.has_bucket()) {
    const Eigen::Index b = n - 1;
    auto cleaned = [](double v) { return std::abs(v) < 1e-12 ? 0.0 : v; };
    s.q0(b) = cleaned(1.0 - s.q0.head(b).sum());
    const double scale = std::max(1.0, dk2);
    s.q1(b) = -s.q1.head(b).sum();
    s.q2mu(b) = -s.q2mu.head(b).sum();
    s.q2m1(b) = -s.q2m1.head(b).sum();
    if (std::abs(s.q1(b)) < 1e-12 * scale) s.q1(b) = 0.0;
    if (std::abs(s.q2mu(b)) < 1e-12 * scale) s.q2mu(b) = 0.0;
    if (std::abs(s.q2m1(b)) < 1e-12 * scale) s.q2m1(b) = 0.0;
  }
  return s;
}

}  // namespace rayleigh

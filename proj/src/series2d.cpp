#include <cmath>

#include "forms.hpp"
#include "rayleigh/prob.hpp"

namespace rayleigh {

using namespace detail;

namespace {

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Parity form ⟨d_i|(I + s P)/2|d_j⟩ for one axis.
Eigen::MatrixXcd axis_parity(const DerivativeBasis& b, int sign) {
  if (sign == 0) return b.dgram;
  const Eigen::MatrixXcd pf = reflect(b.grid(), b.derivs);
  return 0.5 * b.derivs.adjoint() * b.grid().weights.asDiagonal() * (b.derivs + double(sign) * pf);
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

Eigen::VectorXd ProbSeries2D::probabilities(const Eigen::MatrixXd& mu) const {
  Eigen::VectorXd P = (1.0 - epsilon) * vac;
  for (Eigen::Index n = 0; n < size(); ++n) {
    double acc = 0.0;
    for (int a = 0; a <= kmax; ++a)
      for (int b = 0; a + b <= kmax; ++b)
        acc += p[std::size_t(n)](a, b) * mu(a, b) / (std::tgamma(a + 1.0) * std::tgamma(b + 1.0));
    P(n) += epsilon * acc;
  }
  return P;
}

ProbSeries2D weak_series_2d(const Basis2D& basis, const Povm& povm, double epsilon, int kmax) {
  if (povm.dimension != 2) throw Error(ErrorCode::InvalidArgument, "POVM is not 2D");
  const int K = std::min(basis.x.kmax, basis.y.kmax);
  if (kmax < 0 || kmax > K) kmax = K;
  const int lx = basis.lx(), ly = basis.ly();
  const Eigen::Index D = Eigen::Index(K + 1) * (K + 1);
  auto didx = [&](int i, int j) { return Eigen::Index(i) * (K + 1) + j; };

  const Eigen::MatrixXcd Dx = basis.x.overlap.leftCols(K + 1);
  const Eigen::MatrixXcd Dy = basis.y.overlap.leftCols(K + 1);
  const Eigen::MatrixXcd D2 = kron(Dx, Dy);  // (m,l) × (i,j)

  ProbSeries2D s;
  s.labels = povm.labels();
  s.epsilon = epsilon;
  s.kmax = kmax;
  s.vac = Eigen::VectorXd::Zero(povm.size());

  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Identity(basis.size(), basis.size());
  bool all_modes = true;
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(D, D);
  std::vector<Eigen::MatrixXcd> forms(std::size_t(povm.size()), Eigen::MatrixXcd::Zero(D, D));
  double vac_total = 0.0;

  for (Eigen::Index n = 0; n < povm.size(); ++n) {
    const OutcomeOp& o = povm.outcomes[std::size_t(n)];
    switch (o.kind) {
      case OutcomeKind::Vacuum:
        s.vac(n) = 1.0;
        vac_total += 1.0;
        break;
      case OutcomeKind::Mode: {
        if (o.coeffs.size() != basis.size())
          throw Error(ErrorCode::InvalidArgument, "mode coefficients do not match the 2D basis");
        const Eigen::VectorXcd w = D2.transpose() * o.coeffs.conjugate();  // ⟨v, d_ij⟩
        forms[std::size_t(n)] = w.conjugate() * w.transpose();
        Q -= o.coeffs * o.coeffs.adjoint();
        break;
      }
      case OutcomeKind::Parity:
        all_modes = false;
        forms[std::size_t(n)] = kron(axis_parity(basis.x, o.parity_x).topLeftCorner(K + 1, K + 1),
                                     axis_parity(basis.y, o.parity_y).topLeftCorner(K + 1, K + 1));
        break;
      case OutcomeKind::Bucket:
        break;
      default:
        throw Error(ErrorCode::UnsupportedBase, "outcome " + o.label + " has no 2D series");
    }
    total += forms[std::size_t(n)];
  }

  if (povm.has_bucket()) {
    const Eigen::Index b = povm.size() - 1;
    s.vac(b) = std::abs(1.0 - vac_total) < 1e-12 ? 0.0 : 1.0 - vac_total;
    const Eigen::MatrixXcd gx = basis.x.dgram.topLeftCorner(K + 1, K + 1);
    const Eigen::MatrixXcd gy = basis.y.dgram.topLeftCorner(K + 1, K + 1);
    Eigen::MatrixXcd G;
    if (all_modes) {
      for (Eigen::Index i = 0; i < Q.rows(); ++i)
        for (Eigen::Index j = 0; j < Q.cols(); ++j)
          if (std::abs(Q(i, j)) < 1e-12) Q(i, j) = 0.0;
      G = D2.adjoint() * Q * D2;
      const Eigen::MatrixXcd px = Dx.adjoint() * Dx, py = Dy.adjoint() * Dy;
      for (int i = 0; i <= K; ++i)
        for (int j = 0; j <= K; ++j) {
          if (i <= lx && j <= ly) continue;
          for (int i2 = 0; i2 <= K; ++i2)
            for (int j2 = 0; j2 <= K; ++j2) {
              if (i2 <= lx && j2 <= ly) continue;
              G(didx(i, j), didx(i2, j2)) += gx(i, i2) * gy(j, j2) - px(i, i2) * py(j, j2);
            }
        }
    } else {
      G = kron(gx, gy) - total;
      for (Eigen::Index i = 0; i < D; ++i)
        for (Eigen::Index j = 0; j < D; ++j)
          if (std::abs(G(i, j)) < 1e-11 * std::sqrt(std::abs(total(i, i) * total(j, j))) + 1e-300)
            G(i, j) = 0.0;
    }
    forms[std::size_t(b)] = G;
  }

  for (Eigen::Index n = 0; n < povm.size(); ++n) {
    const Eigen::MatrixXcd& G = forms[std::size_t(n)];
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(kmax + 1, kmax + 1);
    for (int a = 0; a <= kmax; ++a)
      for (int bb = 0; a + bb <= kmax; ++bb) {
        double acc = 0.0;
        for (int i = 0; i <= a; ++i)
          for (int j = 0; j <= bb; ++j)
            acc += binomial(a, i) * binomial(bb, j) * std::real(G(didx(i, j), didx(a - i, bb - j)));
        p(a, bb) = acc;
      }
    s.p.push_back(p);
  }
  return s;
}

Eigen::VectorXd weak_exact_probs_2d(const Scene& scene, const Basis2D& basis, const Povm& povm) {
  validate(scene);
  if (scene.dimension != 2 || povm.dimension != 2)
    throw Error(ErrorCode::InvalidArgument, "2D scene and POVM required");
  check_frame(scene, povm, std::min(basis.x.psf.sigma(), basis.y.psf.sigma()));
  const Eigen::Index J = scene.size();
  const Grid& gx = basis.x.grid();
  const Grid& gy = basis.y.grid();
  Eigen::MatrixXcd fx(gx.size(), J), fy(gy.size(), J);
  for (Eigen::Index j = 0; j < J; ++j) {
    fx.col(j) = basis.x.psf.derivative(0, scene.x(j) - povm.frame);
    fy.col(j) = basis.y.psf.derivative(0, scene.y(j) - povm.frame_y);
  }
  const Eigen::MatrixXcd bx = basis.x.modes.adjoint() * gx.weights.asDiagonal() * fx;
  const Eigen::MatrixXcd by = basis.y.modes.adjoint() * gy.weights.asDiagonal() * fy;

  Eigen::VectorXd P = Eigen::VectorXd::Zero(povm.size());
  double vac_total = 0.0, single_total = 0.0;
  for (Eigen::Index n = 0; n < povm.size(); ++n) {
    const OutcomeOp& o = povm.outcomes[std::size_t(n)];
    double single = 0.0;
    switch (o.kind) {
      case OutcomeKind::Vacuum:
        P(n) = 1.0 - scene.epsilon;
        vac_total += 1.0;
        continue;
      case OutcomeKind::Bucket:
        continue;
      case OutcomeKind::Mode:
        for (Eigen::Index j = 0; j < J; ++j) {
          cplx amp = 0.0;
          for (int m = 0; m <= basis.lx(); ++m)
            for (int l = 0; l <= basis.ly(); ++l)
              amp += std::conj(o.coeffs(basis.index(m, l))) * bx(m, j) * by(l, j);
          single += scene.gamma(j) * std::norm(amp);
        }
        break;
      case OutcomeKind::Parity: {
        const Eigen::MatrixXcd px = reflect(gx, fx), py = reflect(gy, fy);
        for (Eigen::Index j = 0; j < J; ++j) {
          const double ex = 0.5 * std::real(inner_product(gx, fx.col(j), fx.col(j) + double(o.parity_x) * px.col(j)));
          const double ey = 0.5 * std::real(inner_product(gy, fy.col(j), fy.col(j) + double(o.parity_y) * py.col(j)));
          single += scene.gamma(j) * ex * ey;
        }
        break;
      }
      default:
        throw Error(ErrorCode::UnsupportedBase, "outcome " + o.label + " has no 2D model");
    }
    single_total += single;
    P(n) = scene.epsilon * single;
  }
  if (povm.has_bucket()) {
    double norms = 0.0;
    for (Eigen::Index j = 0; j < J; ++j)
      norms += scene.gamma(j) * norm_squared(gx, fx.col(j)) * norm_squared(gy, fy.col(j));
    P(povm.size() - 1) = (1.0 - scene.epsilon) * (1.0 - vac_total) + scene.epsilon * (norms - single_total);
  }
  return P;
}

}  // namespace rayleigh

#include <cmath>

#include <fmt/format.h>

#include "rayleigh/fisher.hpp"

namespace rayleigh {

Eigen::Matrix2d rho2(const Eigen::Matrix2d& C, const DeltaK2D& dk) {
  const double a2 = dk.kx * dk.kx * C(0, 0);
  const double b2 = dk.ky * dk.ky * C(1, 1);
  const double cross = 2.0 * dk.kx * dk.ky * C(0, 1);
  const double w = std::sqrt(std::max(0.0, 1.0 - dk.r * dk.r));
  Eigen::Matrix2d rho;
  // (a2 + b2)(I + r σz) + cross (r I + σz) + w (a2 - b2) σx
  rho(0, 0) = (a2 + b2) * (1.0 + dk.r) + cross * (dk.r + 1.0);
  rho(1, 1) = (a2 + b2) * (1.0 - dk.r) + cross * (dk.r - 1.0);
  rho(0, 1) = rho(1, 0) = w * (a2 - b2);
  return 0.5 * rho;
}

Eigen::MatrixXd qfim_from_sld(const Eigen::Matrix2d& rho, const std::vector<Eigen::Matrix2d>& drho,
                              double epsilon) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(rho);
  const Eigen::Vector2d lam = es.eigenvalues();
  const Eigen::Matrix2d U = es.eigenvectors();
  const double tol = 1e-14 * std::max(std::abs(rho.trace()), 1e-300);

  // SLDs in the eigenbasis; blocks on the kernel are dropped
  std::vector<Eigen::Matrix2d> L;
  for (const auto& d : drho) {
    const Eigen::Matrix2d D = U.transpose() * d * U;
    Eigen::Matrix2d l = Eigen::Matrix2d::Zero();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double den = std::max(lam(i), 0.0) + std::max(lam(j), 0.0);
        if (den > tol) l(i, j) = 2.0 * D(i, j) / den;
      }
    L.push_back(l);
  }
  const Eigen::Index m = Eigen::Index(drho.size());
  Eigen::MatrixXd J(m, m);
  const Eigen::Matrix2d R = lam.cwiseMax(0.0).asDiagonal();
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) {
      const Eigen::Matrix2d& La = L[std::size_t(a)];
      const Eigen::Matrix2d& Lb = L[std::size_t(b)];
      J(a, b) = 0.5 * epsilon * ((La * Lb + Lb * La) * R).trace();
    }
  return 0.5 * (J + J.transpose());
}

FisherReport qfim_rho2(const DeltaK2D& dk, double X, double Y, double beta, double epsilon) {
  if (!(dk.kx > 0) || !(dk.ky > 0)) throw Error(ErrorCode::InvalidArgument, "gradient norms must be positive");
  if (!(std::abs(beta) <= 1.0)) throw Error(ErrorCode::InvalidBeta, fmt::format("beta = {} is outside [-1, 1]", beta));
  if (!(X > 0) || !(Y > 0)) throw Error(ErrorCode::InvalidArgument, "X and Y must be positive");
  if (!(epsilon > 0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");

  Eigen::Matrix2d C, dX, dY, dB;
  C << X * X, beta * X * Y, beta * X * Y, Y * Y;
  dX << 2.0 * X, beta * Y, beta * Y, 0.0;
  dY << 0.0, beta * X, beta * X, 2.0 * Y;
  dB << 0.0, X * Y, X * Y, 0.0;

  FisherReport r;
  r.regime = Regime::Exact;
  r.epsilon = epsilon;
  std::vector<Eigen::Matrix2d> d{rho2(dX, dk), rho2(dY, dk)};
  r.params = {"X", "Y"};
  // the β direction leaves the support of a pure ρ₂, so only (X, Y) is reported
  if (std::abs(beta) < 1.0 - 1e-12) {
    d.push_back(rho2(dB, dk));
    r.params.push_back("beta");
  }
  r.matrix = qfim_from_sld(rho2(C, dk), d, epsilon);
  return r;
}

double optimal_beta_angle(double X, double Y, double beta) {
  if (!(X > 0) || !(Y > 0)) throw Error(ErrorCode::InvalidArgument, "X and Y must be positive");
  return 0.5 * std::atan(beta * (X * X - Y * Y) / (2.0 * X * Y));
}

AngleQfim qfim_angle(const DeltaK2D& dk, double lambda1, double lambda2, double theta,
                     double epsilon) {
  if (!(dk.kx > 0) || std::abs(dk.kx - dk.ky) > 1e-10 * dk.kx || std::abs(dk.r) > 1e-10)
    throw Error(ErrorCode::AnisotropicPsf, "angle QFIM needs equal gradient norms and r = 0");
  if (!(lambda1 >= 0) || !(lambda2 >= 0)) throw Error(ErrorCode::InvalidArgument, "Lambda must be non-negative");
  if (!(epsilon > 0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");

  const double c = std::cos(theta), s = std::sin(theta);
  const double l1 = lambda1 * lambda1, l2 = lambda2 * lambda2;
  Eigen::Matrix2d R;
  R << c, -s, s, c;
  const Eigen::Matrix2d C = R * Eigen::Vector2d(l1, l2).asDiagonal() * R.transpose();
  const Eigen::Matrix2d d1 = R * Eigen::Vector2d(2.0 * lambda1, 0.0).asDiagonal() * R.transpose();
  const Eigen::Matrix2d d2 = R * Eigen::Vector2d(0.0, 2.0 * lambda2).asDiagonal() * R.transpose();
  // factored on Λ1² - Λ2² so that equal Λ give an exact zero
  Eigen::Matrix2d dt;
  dt << -2.0 * c * s, c * c - s * s, c * c - s * s, 2.0 * c * s;
  dt *= l1 - l2;

  AngleQfim out;
  out.report.regime = Regime::Exact;
  out.report.epsilon = epsilon;
  out.report.params = {"Lambda1", "Lambda2", "theta"};
  out.report.matrix = qfim_from_sld(rho2(C, dk), {rho2(d1, dk), rho2(d2, dk), rho2(dt, dk)}, epsilon);
  out.theta_prime = C(0, 0) > 0 && C(1, 1) > 0
                        ? optimal_beta_angle(std::sqrt(C(0, 0)), std::sqrt(C(1, 1)),
                                             C(0, 1) / std::sqrt(C(0, 0) * C(1, 1)))
                        : 0.0;
  auto pair = [](double phi) {
    Eigen::Matrix2d m;
    m << std::cos(phi), std::sin(phi), -std::sin(phi), std::cos(phi);
    return m;
  };
  out.basis1 = pair(theta + M_PI / 4.0);
  out.basis2 = pair(theta);
  return out;
}

}  // namespace rayleigh

#include "rayleigh/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rayleigh {

double DerivativeBasis::orthonormality_error() const {
  Eigen::MatrixXcd g = modes.adjoint() * grid().weights.asDiagonal() * modes;
  g -= Eigen::MatrixXcd::Identity(g.rows(), g.cols());
  return g.cwiseAbs().maxCoeff();
}

DerivativeBasis gram_schmidt_basis(const PsfModel& psf, int lmax, int kmax) {
  if (lmax < 0) throw Error(ErrorCode::InvalidArgument, "lmax must be non-negative");
  if (lmax > psf.max_order())
    throw Error(ErrorCode::OrderTooHigh, "lmax " + std::to_string(lmax) + " exceeds the PSF limit");
  if (kmax < 0) kmax = std::min(2 * lmax + 4, psf.max_order());
  kmax = std::max(kmax, lmax);
  if (kmax > psf.max_order())
    throw Error(ErrorCode::OrderTooHigh, "kmax " + std::to_string(kmax) + " exceeds the PSF limit");

  const Grid& grid = psf.grid();
  const Eigen::Index n = grid.size();
  const bool even = psf.is_even();

  DerivativeBasis b{psf, lmax, kmax, {}, {}, {}, {}, {}};
  b.derivs.resize(n, kmax + 1);
  for (int i = 0; i <= kmax; ++i)
    b.derivs.col(i) = (i % 2 ? -1.0 : 1.0) * psf.derivative(i);

  auto ip = [&](const auto& f, const auto& g) { return inner_product(grid, f, g); };

  b.modes.resize(n, lmax + 1);
  double fact = 1.0;
  for (int l = 0; l <= lmax; ++l) {
    if (l > 0) fact *= l;
    Eigen::VectorXcd v = b.derivs.col(l) * (std::pow(psf.sigma(), l) / fact);
    const double start = std::sqrt(norm_squared(grid, v));
    for (int pass = 0; pass < 2; ++pass)
      for (int m = 0; m < l; ++m) v -= ip(b.modes.col(m), v) * b.modes.col(m);
    const double rest = std::sqrt(norm_squared(grid, v));
    if (!(rest > 1e-5 * start))  // squared ratio below 1e-10
      throw Error(ErrorCode::LinearDependence,
                  "derivative of order " + std::to_string(l) + " lies in the span of lower orders");
    b.modes.col(l) = v / rest;
  }

  b.overlap = Eigen::MatrixXcd::Zero(lmax + 1, kmax + 1);
  for (int m = 0; m <= lmax; ++m)
    for (int i = m; i <= kmax; ++i) {
      if (even && (m + i) % 2) continue;
      b.overlap(m, i) = ip(b.modes.col(m), b.derivs.col(i));
    }

  b.dgram = Eigen::MatrixXcd::Zero(kmax + 1, kmax + 1);
  for (int i = 0; i <= kmax; ++i)
    for (int j = i; j <= kmax; ++j) {
      if (even && (i + j) % 2) continue;
      b.dgram(i, j) = ip(b.derivs.col(i), b.derivs.col(j));
      b.dgram(j, i) = std::conj(b.dgram(i, j));
    }

  b.q.resize(lmax + 1);
  fact = 1.0;
  for (int l = 0; l <= lmax; ++l) {
    if (l > 0) fact *= l;
    // Gram-Schmidt makes ⟨b_l, d_l⟩ real and positive
    b.overlap(l, l) = std::real(b.overlap(l, l));
    b.q(l) = std::real(b.overlap(l, l)) / fact;
  }
  return b;
}

Eigen::MatrixXcd Basis2D::mode(int k, int l) const {
  return x.modes.col(k) * y.modes.col(l).transpose();
}

Basis2D separable_basis_2d(const DerivativeBasis& bx, const DerivativeBasis& by) {
  if (bx.modes.rows() != bx.grid().size() || by.modes.rows() != by.grid().size())
    throw Error(ErrorCode::GridMismatch, "factor basis is not sampled on its PSF grid");
  Basis2D b{bx, by, bx.q * by.q.transpose()};
  return b;
}

Eigen::VectorXd hermite_gaussian(int n, double sigma, const Eigen::VectorXd& x) {
  const double w = std::sqrt(2.0) * sigma;
  double log_norm = -0.25 * std::log(2.0 * std::numbers::pi * sigma * sigma) - 0.5 * n * std::log(2.0);
  for (int k = 2; k <= n; ++k) log_norm -= 0.5 * std::log(double(k));
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double u = x(i) / w;
    double h0 = 1.0, h1 = 2.0 * u;
    double h = n == 0 ? h0 : h1;
    for (int k = 1; k < n; ++k) {
      h = 2.0 * u * h1 - 2.0 * k * h0;
      h0 = h1;
      h1 = h;
    }
    out(i) = std::exp(log_norm - 0.5 * u * u) * h;
  }
  return out;
}

}  // namespace rayleigh

#pragma once

#include <Eigen/Dense>

#include "rayleigh/psf.hpp"

namespace rayleigh {

/// Orthonormal modes b_0..b_lmax built from displacement derivatives of the PSF.
///
/// `derivs` holds d_i = ∂_X^i ψ(x - X) at X = 0 for i ≤ kmax, which is
/// (-1)^i ψ^{(i)}(x). `overlap(m, i)` is ⟨b_m, d_i⟩ with the structural zeros
/// (i < m, and odd m + i for even PSFs) set exactly.
struct DerivativeBasis {
  PsfModel psf;
  int lmax = 0;
  int kmax = 0;
  Eigen::MatrixXcd modes;
  Eigen::MatrixXcd derivs;
  Eigen::MatrixXcd overlap;
  Eigen::MatrixXcd dgram;
  Eigen::VectorXd q;

  const Grid& grid() const { return psf.grid(); }
  /// Largest |⟨b_i, b_j⟩ - δ_ij|.
  double orthonormality_error() const;
};

/// Gram-Schmidt on σ^l/l! scaled derivatives with one re-orthogonalization pass.
/// kmax < 0 selects 2 lmax + 4 capped by the model's derivative limit.
DerivativeBasis gram_schmidt_basis(const PsfModel& psf, int lmax, int kmax = -1);

/// Separable 2D modes b_{kl}(x, y) = b_k(x) b_l(y).
struct Basis2D {
  DerivativeBasis x;
  DerivativeBasis y;
  Eigen::MatrixXd q2d;  // q_{kl} = q_k q_l

  int lx() const { return x.lmax; }
  int ly() const { return y.lmax; }
  /// Flattened index of mode (k, l).
  Eigen::Index index(int k, int l) const { return Eigen::Index(k) * (y.lmax + 1) + l; }
  Eigen::Index size() const { return Eigen::Index(x.lmax + 1) * (y.lmax + 1); }
  /// Mode (k, l) on the tensor grid, x index major.
  Eigen::MatrixXcd mode(int k, int l) const;
};

Basis2D separable_basis_2d(const DerivativeBasis& bx, const DerivativeBasis& by);

/// Normalized Hermite-Gaussian mode matching a Gaussian PSF of width σ.
Eigen::VectorXd hermite_gaussian(int n, double sigma, const Eigen::VectorXd& x);

}  // namespace rayleigh

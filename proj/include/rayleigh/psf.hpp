#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rayleigh/errors.hpp"

namespace rayleigh {

using cplx = std::complex<double>;

/// Quadrature nodes and weights on the real line.
struct Grid {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return nodes.size(); }
  double lo() const { return nodes(0); }
  double hi() const { return nodes(nodes.size() - 1); }
  double spacing() const { return (hi() - lo()) / double(size() - 1); }
  /// True when nodes are mirror images about the origin.
  bool symmetric(double tol = 1e-12) const;
};

/// Uniform grid with trapezoid weights.
Grid uniform_grid(double lo, double hi, Eigen::Index n);

/// Discrete L2 inner product sum_i w_i conj(f_i) g_i.
template <typename DerivedF, typename DerivedG>
auto inner_product(const Grid& grid, const Eigen::MatrixBase<DerivedF>& f,
                   const Eigen::MatrixBase<DerivedG>& g) {
  using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedF::Scalar,
                                                      typename DerivedG::Scalar>::ReturnType;
  if (f.size() != grid.size() || g.size() != grid.size())
    throw Error(ErrorCode::GridMismatch, "operands are not sampled on the same grid");
  // dot() conjugates its left operand
  return f.template cast<Scalar>().dot(
      grid.weights.template cast<Scalar>().cwiseProduct(g.template cast<Scalar>()));
}

/// Squared norm under the grid measure.
template <typename Derived>
double norm_squared(const Grid& grid, const Eigen::MatrixBase<Derived>& f) {
  if (f.size() != grid.size())
    throw Error(ErrorCode::GridMismatch, "operand is not sampled on the grid");
  return grid.weights.dot(f.cwiseAbs2());
}

enum class PsfKind { Gaussian, Sinc, Sampled };

/// Normalized 1D amplitude point-spread function.
///
/// Evaluation is analytic for the built-in kinds and spectral for sampled
/// data. The model owns a default grid on which its normalization and all
/// basis construction are carried out.
class PsfModel {
 public:
  static PsfModel gaussian(double sigma);
  static PsfModel gaussian(double sigma, Grid grid);
  static PsfModel sinc(double sigma);
  static PsfModel sinc(double sigma, Grid grid);
  /// Values must sit on a uniform grid; derivatives are taken spectrally.
  static PsfModel sampled(Grid grid, Eigen::VectorXcd values, int max_order = 12);
  /// Reads rows of `x re [im]` separated by whitespace or commas.
  static PsfModel load_sampled(const std::string& path, int max_order = 12);

  PsfKind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  const Grid& grid() const { return grid_; }
  int max_order() const { return max_order_; }
  bool is_even() const { return even_; }

  /// ψ^{(order)}(x - shift) at the given points.
  Eigen::VectorXcd derivative(int order, const Eigen::VectorXd& points, double shift = 0.0) const;
  Eigen::VectorXcd derivative(int order, double shift = 0.0) const {
    return derivative(order, grid_.nodes, shift);
  }
  Eigen::VectorXcd eval(const Eigen::VectorXd& points, double shift = 0.0) const {
    return derivative(0, points, shift);
  }

  /// Largest relative violation of ∫ conj(ψ^{(l)}) ψ^{(l+1)} = 0 over l < lmax.
  double parity_violation(int lmax) const;

 private:
  PsfModel() = default;
  Eigen::VectorXcd sampled_derivative(int order, const Eigen::VectorXd& points, double shift) const;

  PsfKind kind_ = PsfKind::Gaussian;
  double sigma_ = 1.0;
  double scale_ = 1.0;  // multiplies the unnormalized profile
  Grid grid_;
  int max_order_ = 40;
  bool even_ = true;
  // sampled data: tapered spectrum on the FFT frequency grid
  Eigen::VectorXcd spectrum_;
  Eigen::VectorXd freqs_;
};

/// Separable 2D PSF ψ(x, y) = ψx(x) ψy(y).
struct Psf2D {
  PsfModel x;
  PsfModel y;
};

struct DeltaK2D {
  double kx;
  double ky;
  double r;  // cross correlation of the two gradient components
};

/// ‖ψ'‖ on the model grid.
double delta_k(const PsfModel& psf);
DeltaK2D delta_k(const Psf2D& psf);

/// Lower bound on the Taylor convergence radius of the displaced PSF.
double convergence_radius_lower_bound(const PsfModel& psf, int lmax);

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n);

}  // namespace rayleigh

#pragma once

#include <string>

#include <Eigen/Dense>

#include "rayleigh/errors.hpp"

namespace rayleigh {

/// Incoherent point sources with relative weights and mean photon number ε.
struct Scene {
  int dimension = 1;
  Eigen::VectorXd x;
  Eigen::VectorXd y;  // empty in 1D
  Eigen::VectorXd gamma;
  double epsilon = 0.0;

  Eigen::Index size() const { return x.size(); }
  double centroid_x() const { return gamma.dot(x); }
  double centroid_y() const { return dimension == 2 ? gamma.dot(y) : 0.0; }
  /// Largest pairwise distance.
  double extent() const;
};

/// Builds and validates a scene; weights are normalized to sum to one.
Scene make_scene(Eigen::VectorXd x, Eigen::VectorXd gamma, double epsilon);
Scene make_scene_2d(Eigen::VectorXd x, Eigen::VectorXd y, Eigen::VectorXd gamma, double epsilon);
void validate(const Scene& scene);

/// Reads `key = value` header lines (dimension, epsilon) followed by rows
/// `x [y] gamma`.
Scene load_scene(const std::string& path);

/// Normalized moments of a scene about its centroid.
///
/// `radicand(k)` is Σ γ_j (x_j - X̄)^k and `magnitude(k)` its |.|^{1/k};
/// odd radicands can be negative, in which case `sign(k)` is -1 and the
/// magnitude is the estimable parameter. In 2D the same fields are indexed
/// by (k, l) in the `*2d` matrices.
struct MomentVector {
  double xbar = 0.0;
  double ybar = 0.0;
  int kmax = 0;
  double s = 0.0;
  Eigen::VectorXd radicand;
  Eigen::VectorXd magnitude;
  Eigen::VectorXi sign;
  Eigen::MatrixXd radicand2d;
  Eigen::MatrixXd magnitude2d;

  double M(int k) const { return magnitude(k); }
};

MomentVector moments(const Scene& scene, int kmax);

/// Raw moments Σ γ_j (x_j - frame)^k for k ≤ kmax.
Eigen::VectorXd raw_moments(const Scene& scene, int kmax, double frame);

/// Raw 2D moments Σ γ_j (x_j - fx)^k (y_j - fy)^l for k, l ≤ kmax.
Eigen::MatrixXd raw_moments_2d(const Scene& scene, int kmax, double fx, double fy);

/// Second-moment block in the (X, Y, β) and (Λ1, Λ2, θ) parametrizations.
struct SecondMoments2D {
  double X = 0.0;
  double Y = 0.0;
  double beta = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double theta = 0.0;
  bool theta_degenerate = false;
  Eigen::Matrix2d C = Eigen::Matrix2d::Zero();
};

SecondMoments2D second_moment_params_2d(const Scene& scene);

/// Rescales positions about the centroid so the extent equals s.
Scene scaled_family(const Scene& shape, double s);

}  // namespace rayleigh

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rayleigh/basis.hpp"
#include "rayleigh/prob.hpp"
#include "rayleigh/psf.hpp"
#include "rayleigh/scene.hpp"

namespace rayleigh {

enum class Regime { LimitFormula, Series, Exact };

const char* to_string(Regime r);

/// Fisher or quantum Fisher information matrix over named parameters.
struct FisherReport {
  std::vector<std::string> params;
  Eigen::MatrixXd matrix;
  Regime regime = Regime::Series;
  double s = 0.0;
  double epsilon = 0.0;
  int truncation = 0;

  Eigen::Index size() const { return matrix.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return matrix(i, j); }
  bool symmetric(double tol = 1e-10) const;
  /// Eigenvalues no lower than -1e-10 times the trace.
  bool positive_semidefinite() const;
};

/// FI over normalized moments M_k, treating them as independent coordinates.
///
/// `at` must hold central moments about the series frame through the series
/// order.
FisherReport fi_from_series(const ProbSeries& series, const std::vector<int>& params,
                            const MomentVector& at);

/// Same over 2D moments M_{ab}; `params` are (a, b) pairs.
FisherReport fi_from_series_2d(const ProbSeries2D& series,
                               const std::vector<std::pair<int, int>>& params,
                               const MomentVector& at);

/// FI over (M1, M2) from the O(s²) strong-source series; M1 is the centroid
/// offset from the frame and M2 the central second moment.
FisherReport fi_from_strong(const StrongSeries& series, double m1, double m2);

/// s → 0 limit of 𝓕_22 for a strong series: outcomes with q0 = 0 give 4 q2mu each.
double strong_fi_limit(const StrongSeries& series);

enum class LimitFormula {
  Even,        // M_{2l} under the derivative basis
  Odd,         // M_{2l+1} under the (b_l ± b_{l+1}) pairs
  Second,      // M_2, any source strength
  Even2D,      // M_{2L, 2K-2L} under B0
  Pair2D,      // M_{2L+1, 2K-2L-1} under B1 / B2
  OddX2D,      // M_{2L+1, 2K-2L} under B3 / B4
  OddY2D,      // M_{2K-2L, 2L+1} under B5 / B6
};

struct LimitSpec {
  LimitFormula which = LimitFormula::Second;
  int l = 1;  // l in 1D, L in 2D
  int K = 0;  // total half-order in 2D
};

/// Leading-order FI closed forms. The 1D forms take `q` from `basis`; the
/// 2D forms take both axes from `basis2d`.
FisherReport fi_limit_formula(const DerivativeBasis& basis, const MomentVector& m, double epsilon,
                              const LimitSpec& spec);
FisherReport fi_limit_formula_2d(const Basis2D& basis, const MomentVector& m, double epsilon,
                                 const LimitSpec& spec);

/// The 2×2 second-moment density block, with C the second-moment matrix
/// [[M20², M11²], [M11², M02²]].
Eigen::Matrix2d rho2(const Eigen::Matrix2d& C, const DeltaK2D& dk);

/// ε Tr(½{L_μ, L_ν} ρ) for the SLDs of ρ along the directions `drho`.
Eigen::MatrixXd qfim_from_sld(const Eigen::Matrix2d& rho, const std::vector<Eigen::Matrix2d>& drho,
                              double epsilon);

/// QFIM over (X, Y, β) with X² = M20², Y² = M02², βXY = M11². At |β| = 1
/// the β direction is dropped and the pure-state (X, Y) matrix is returned.
FisherReport qfim_rho2(const DeltaK2D& dk, double X, double Y, double beta, double epsilon);

struct AngleQfim {
  FisherReport report;  // over (Λ1, Λ2, θ)
  /// Optimal angle for β at the given (X, Y, β).
  double theta_prime = 0.0;
  /// Projector vectors in the e1/e2 basis for the rotated pairs.
  Eigen::Matrix2d basis1;  // columns at angle θ + π/4
  Eigen::Matrix2d basis2;  // columns at angle θ
};

/// QFIM over (Λ1, Λ2, θ) for an isotropic gradient (Δk_x = Δk_y, r = 0).
AngleQfim qfim_angle(const DeltaK2D& dk, double lambda1, double lambda2, double theta,
                     double epsilon);

/// ½ atan(β (X² - Y²) / (2XY)).
double optimal_beta_angle(double X, double Y, double beta);

struct CrbReport {
  std::vector<std::string> params;
  Eigen::VectorXd matrix_bound;    // (𝓕⁻¹)_kk, NaN when singular
  Eigen::VectorXd diagonal_bound;  // 1 / 𝓕_kk, +inf when 𝓕_kk = 0
  bool invertible = true;
  bool coincide = false;
  std::string note;
};

/// Per-shot variance lower bounds; divide by N for N shots.
CrbReport crb(const FisherReport& report);

/// Normalization of the |b_2²⟩ component in the two-photon subspace.
enum class AppFPrefactor { Derived, AsPrinted };

struct AppFResult {
  double A44 = 0.0;
  double A42 = 0.0;
  double A22 = 0.0;
  double dA44 = 0.0;  // ∂A44/∂M8
  double diagonal_fi = 0.0;
  double subspace_qfi = 0.0;
  double numeric_subspace_qfi = 0.0;  // SLD of the 2×2 block
  double ratio = 0.0;
  double total_diagonal_fi = 0.0;  // all photon numbers of the b_4 dressing
  double total_ratio = 0.0;
  bool improvement = false;
};

/// Two-photon-subspace QFI for M8 against the diagonal dressed-SPADE FI.
AppFResult appf_counterexample(const Scene& scene, const DerivativeBasis& basis,
                               AppFPrefactor prefactor = AppFPrefactor::Derived);

/// Monte Carlo of the three A coefficients via the thermal amplitudes.
struct AppFMc {
  Eigen::Vector3d mean;
  Eigen::Vector3d se;
};

AppFMc appf_monte_carlo(const Scene& scene, const DerivativeBasis& basis, long samples,
                        std::uint64_t seed, AppFPrefactor prefactor = AppFPrefactor::Derived);

enum class SourceMode { Weak, Strong };

struct CentroidScheme {
  double fi11 = 0.0;
  Eigen::Matrix2d split_fim;  // (M1, M2) with half the resource on each
  Eigen::Matrix2d qfim;
  double trace_bound = 0.0;  // lower bound on tr(𝓕⁻¹) for any scheme
  double efficiency = 0.0;   // √((1+e)/4)
};

CentroidScheme centroid_scheme(const PsfModel& psf, double epsilon, SourceMode mode);

/// (b_0 ± b_1)/√2 pair at the reference point with the bucket.
Povm centroid_povm(const DerivativeBasis& basis, double reference);

}  // namespace rayleigh

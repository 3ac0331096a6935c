#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rayleigh/basis.hpp"
#include "rayleigh/povm.hpp"
#include "rayleigh/scene.hpp"

namespace rayleigh {

/// Weak-source series P(n) = (1-ε) vac(n) + ε Σ_k p_k(n) μ_k / k!.
///
/// μ_k are raw moments about the POVM frame; p_k(n) is the k-th
/// displacement derivative of the single-photon outcome probability.
struct ProbSeries {
  std::vector<std::string> labels;
  double epsilon = 0.0;
  double frame = 0.0;
  int kmax = 0;
  Eigen::VectorXd vac;
  Eigen::MatrixXd p;  // outcomes × (kmax + 1)

  Eigen::Index size() const { return p.rows(); }
  /// Partial sums through `order` (all available orders when negative).
  Eigen::VectorXd probabilities(const Eigen::VectorXd& mu, int order = -1) const;
  /// Twice the magnitude of the terms beyond `order`, per outcome.
  Eigen::VectorXd remainder_bound(const Eigen::VectorXd& mu, int order) const;
};

/// Single-photon operator ⟨d_i|E(n)|d_j⟩ per outcome, plus vac(n).
struct SinglePhotonForms {
  std::vector<Eigen::MatrixXcd> G;
  Eigen::VectorXd vac;
};

SinglePhotonForms single_photon_forms(const DerivativeBasis& basis, const Povm& povm);

/// Coefficients only; no convergence check.
ProbSeries weak_series(const DerivativeBasis& basis, const Povm& povm, double epsilon, int kmax = -1);

/// Checks that the scene sits inside the convergence radius of the expansion.
ProbSeries weak_series(const Scene& scene, const DerivativeBasis& basis, const Povm& povm,
                       int kmax = -1);

/// Direct overlap integrals of the displaced PSFs, first order in ε.
Eigen::VectorXd weak_exact_probs(const Scene& scene, const DerivativeBasis& basis, const Povm& povm);

/// Through-O(s²) strong-source series about the POVM frame.
///
/// P(n) ≈ q0 + q1 M1 + q2mu μ2 + q2m1 M1², with M1 the centroid offset and
/// μ2 the raw second moment, both measured from the frame.
struct StrongSeries {
  std::vector<std::string> labels;
  double epsilon = 0.0;
  double frame = 0.0;
  int truncation = 0;
  Eigen::VectorXd q0, q1, q2mu, q2m1;

  Eigen::Index size() const { return q0.size(); }
  Eigen::VectorXd probabilities(double m1, double mu2) const;
};

/// Thermal sums are cut once r^K (K+3)^2 < 1e-12 with r = ε/(1+ε).
int dressing_truncation(double epsilon);

StrongSeries strong_series(const DerivativeBasis& basis, const Povm& povm, double epsilon);

/// Gaussian expectations of the thermal amplitudes A^{(l)} = Σ_j α_j (x_j - X_R)^l.
enum class WickPattern {
  Thermal,        // E[e^{-|A0|²} |A0|^{2k}]
  FirstOrder,     // E[e^{-|A0|²} (A0*)^{k-1} A1* A0^k]
  FirstSquared,   // E[e^{-|A0|²} |A0|^{2(k-1)} |A1|²]
  SecondOrder,    // E[e^{-|A0|²} |A0|^{2(k-1)} A2* A0]
  FirstPair,      // E[e^{-|A0|²} (A0*)^{k-2} (A1*)² A0^k]
};

const char* to_string(WickPattern p);

/// Closed form with m1 = Σγ(x - X_R) and mu2 = Σγ(x - X_R)².
double wick_expectation(WickPattern pattern, int k, double epsilon, double m1, double mu2);

struct McEstimate {
  std::vector<std::string> labels;
  Eigen::VectorXd mean;
  Eigen::VectorXd se;
  long samples = 0;
};

/// Monte Carlo over the source amplitudes α_j ~ CN(0, ε γ_j).
McEstimate mc_gaussian_oracle(const Scene& scene, const DerivativeBasis& basis, const Povm& povm,
                              long samples, std::uint64_t seed);

/// Monte Carlo estimate of a Wick pattern about the reference X_R.
McEstimate mc_wick(WickPattern pattern, int k, const Scene& scene, double reference, long samples,
                   std::uint64_t seed);

/// 2D weak series P = (1-ε) vac + ε Σ p_ab μ_ab / (a! b!).
struct ProbSeries2D {
  std::vector<std::string> labels;
  double epsilon = 0.0;
  int kmax = 0;
  Eigen::VectorXd vac;
  std::vector<Eigen::MatrixXd> p;

  Eigen::Index size() const { return Eigen::Index(p.size()); }
  Eigen::VectorXd probabilities(const Eigen::MatrixXd& mu) const;
};

ProbSeries2D weak_series_2d(const Basis2D& basis, const Povm& povm, double epsilon, int kmax = -1);
Eigen::VectorXd weak_exact_probs_2d(const Scene& scene, const Basis2D& basis, const Povm& povm);

}  // namespace rayleigh

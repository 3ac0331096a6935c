#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rayleigh/basis.hpp"
#include "rayleigh/fisher.hpp"
#include "rayleigh/povm.hpp"
#include "rayleigh/prob.hpp"
#include "rayleigh/scene.hpp"

namespace rayleigh {

/// Outcome counts from N independent shots.
struct CountRecord {
  std::vector<std::string> labels;
  std::vector<long> counts;
  long shots = 0;
  std::uint64_t seed = 0;
  std::string povm;
};

/// Multinomial draw. Tiny negative probabilities are clipped to zero; the
/// total must be one within 1e-9.
CountRecord sample_outcomes(const Eigen::VectorXd& probs, long shots, std::uint64_t seed,
                            std::vector<std::string> labels = {}, std::string povm = {});

/// Deterministic 64-bit seed for sub-stream (a, b) of a run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

enum class EstimationMethod { Inversion, MaxLikelihood };

struct MomentEstimate {
  std::vector<int> params;
  Eigen::VectorXd radicand;   // μ̂_k about the model frame
  Eigen::VectorXd magnitude;  // sign-carrying |μ̂_k|^{1/k}
  Eigen::VectorXd se;         // plug-in standard errors of the magnitudes
  double deviance = 0.0;
  double start_deviance = 0.0;  // at the inversion start
  std::vector<std::string> warnings;
};

/// Estimates the raw moments `params` from counts under the series model.
///
/// Moments not listed are held at their values in `nuisance` (raw moments
/// about the series frame, at least through the series order). Inversion is
/// weighted least squares on the observed frequencies; maximum likelihood
/// refines that start by coordinate-wise golden-section search.
MomentEstimate estimate_moments(const CountRecord& record, const ProbSeries& model,
                                const std::vector<int>& params, const Eigen::VectorXd& nuisance,
                                EstimationMethod method);

/// Replicated estimation of one moment against its Cramér-Rao bound.
struct VarianceStudy {
  int param = 2;
  Eigen::VectorXd estimates;  // per replication, magnitudes
  double truth = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double crb = 0.0;  // per-experiment bound, 1 / (N 𝓕)
  double ratio = 0.0;
};

/// Samples from the exact weak probabilities of `scene` and estimates M_param
/// with the other moments held at their true values.
VarianceStudy variance_study(const Scene& scene, const DerivativeBasis& basis, const Povm& povm,
                             int param, long shots, int replications, std::uint64_t seed,
                             EstimationMethod method, double fisher_per_shot);

struct CentroidStudy {
  double split = 0.5;
  Eigen::VectorXd centroid;  // per replication
  Eigen::VectorXd m2;        // per replication
  double centroid_mean = 0.0;
  double centroid_variance = 0.0;
  double m2_mean = 0.0;
  double m2_variance = 0.0;
  /// 1/(N 𝓕) for each stage with its share of the shots.
  double centroid_crb = 0.0;
  double m2_crb = 0.0;
};

/// Locate the centroid with (b_0 ± b_1)/√2 at `reference` on split·N shots,
/// then estimate M2 by SPADE re-centred on the estimate. split = 0 skips
/// the first stage and trusts the reference.
CentroidStudy centroid_two_stage(const Scene& scene, const DerivativeBasis& basis, long shots,
                                 double split, double reference, int replications,
                                 std::uint64_t seed);

}  // namespace rayleigh

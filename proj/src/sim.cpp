#include "rayleigh/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

namespace rayleigh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// P = base + A θ for the listed moments, others frozen.
struct LinearModel {
  Eigen::VectorXd base;
  Eigen::MatrixXd A;
};

LinearModel linearize(const ProbSeries& model, const std::vector<int>& params, const Eigen::VectorXd& nuisance) {
  LinearModel lm;
  lm.base = (1.0 - model.epsilon) * model.vac;
  lm.A.resize(model.size(), Eigen::Index(params.size()));
  double fact = 1.0;
  for (int k = 0; k <= model.kmax; ++k) {
    if (k > 0) fact *= k;
    const auto it = std::find(params.begin(), params.end(), k);
    if (it != params.end())
      lm.A.col(it - params.begin()) = model.epsilon * model.p.col(k) / fact;
    else
      lm.base += model.epsilon * model.p.col(k) * (nuisance(k) / fact);
  }
  return lm;
}

double deviance(const Eigen::VectorXd& P, const std::vector<long>& counts, long shots) {
  double d = 0.0;
  for (std::size_t n = 0; n < counts.size(); ++n) {
    if (counts[n] == 0) continue;
    const double p = P(Eigen::Index(n));
    if (!(p > 0)) return kInf;
    d += 2.0 * counts[n] * std::log(double(counts[n]) / (double(shots) * p));
  }
  return d;
}

// Shots × Σ A_n A_nᵀ / P_n over outcomes with positive probability.
Eigen::MatrixXd information(const LinearModel& lm, const Eigen::VectorXd& P, long shots) {
  const Eigen::Index m = lm.A.cols();
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index n = 0; n < P.size(); ++n)
    if (P(n) > 1e-300) F += lm.A.row(n).transpose() * lm.A.row(n) / P(n);
  return double(shots) * F;
}

template <typename F>
double golden_section(F&& f, double lo, double hi, double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

double signed_root(double mu, int k) {
  const double m = std::pow(std::abs(mu), 1.0 / k);
  return mu < 0 ? -m : m;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(a), std::uint32_t(a >> 32),
                    std::uint32_t(b), std::uint32_t(b >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (std::uint64_t(out[0]) << 32) | out[1];
}

CountRecord sample_outcomes(const Eigen::VectorXd& probs, long shots, std::uint64_t seed,
                            std::vector<std::string> labels, std::string povm) {
  if (probs.size() == 0) throw Error(ErrorCode::InvalidDistribution, "no outcomes");
  if (shots < 0) throw Error(ErrorCode::InvalidArgument, "shot count must be non-negative");
  Eigen::VectorXd p = probs;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p(i)) || p(i) < -1e-9)
      throw Error(ErrorCode::InvalidDistribution, fmt::format("probability {} of outcome {} is invalid", p(i), i));
    p(i) = std::max(0.0, p(i));
  }
  if (std::abs(p.sum() - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidDistribution, fmt::format("probabilities sum to {}", p.sum()));

  CountRecord r;
  r.labels = labels.empty() ? std::vector<std::string>(std::size_t(p.size())) : std::move(labels);
  if (Eigen::Index(r.labels.size()) != p.size())
    throw Error(ErrorCode::InvalidArgument, "label count does not match the outcomes");
  r.counts.assign(std::size_t(p.size()), 0);
  r.shots = shots;
  r.seed = seed;
  r.povm = std::move(povm);

  std::mt19937_64 rng(derive_seed(seed, 0x6d756c74));
  long left = shots;
  double mass = p.sum();
  for (Eigen::Index i = 0; i + 1 < p.size() && left > 0; ++i) {
    const double q = mass > 0 ? std::clamp(p(i) / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<long> draw(left, q);
    const long c = q >= 1.0 ? left : draw(rng);
    r.counts[std::size_t(i)] = c;
    left -= c;
    mass -= p(i);
  }
  r.counts.back() += left;
  return r;
}

MomentEstimate estimate_moments(const CountRecord& record, const ProbSeries& model,
                                const std::vector<int>& params, const Eigen::VectorXd& nuisance,
                                EstimationMethod method) {
  if (params.empty()) throw Error(ErrorCode::InvalidArgument, "no parameters requested");
  if (Eigen::Index(record.counts.size()) != model.size())
    throw Error(ErrorCode::InvalidArgument, "record and model have different outcome counts");
  if (record.shots <= 0) throw Error(ErrorCode::InvalidArgument, "record has no shots");
  if (nuisance.size() < model.kmax + 1)
    throw Error(ErrorCode::InvalidArgument, "nuisance moments do not cover the series order");
  for (int k : params)
    if (k < 1 || k > model.kmax || model.p.col(k).cwiseAbs().maxCoeff() == 0.0)
      throw Error(ErrorCode::NonIdentifiable, fmt::format("moment order {} does not enter the model", k));

  const LinearModel lm = linearize(model, params, nuisance);
  const Eigen::Index m = lm.A.cols();
  const double N = double(record.shots);
  Eigen::VectorXd f(model.size());
  for (Eigen::Index n = 0; n < f.size(); ++n) f(n) = double(record.counts[std::size_t(n)]) / N;

  // weighted least squares on the frequencies, columns scaled for conditioning
  Eigen::VectorXd w(f.size());
  for (Eigen::Index n = 0; n < f.size(); ++n) w(n) = 1.0 / std::max(f(n), 1.0 / N);
  const Eigen::VectorXd sw = w.cwiseSqrt();
  Eigen::VectorXd scale = lm.A.colwise().norm().transpose();
  for (Eigen::Index c = 0; c < m; ++c)
    if (scale(c) == 0.0) throw Error(ErrorCode::NonIdentifiable, "parameter has no effect on the model");
  const Eigen::MatrixXd As = sw.asDiagonal() * lm.A * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
  qr.setThreshold(1e-12);
  if (qr.rank() < m) throw Error(ErrorCode::NonIdentifiable, "parameters are not jointly identifiable");
  Eigen::VectorXd theta = qr.solve(Eigen::VectorXd(sw.asDiagonal() * (f - lm.base))).cwiseQuotient(scale);

  auto dev_at = [&](const Eigen::VectorXd& t) { return deviance(lm.base + lm.A * t, record.counts, record.shots); };

  MomentEstimate est;
  est.params = params;
  est.start_deviance = dev_at(theta);
  double best = est.start_deviance;

  if (method == EstimationMethod::MaxLikelihood) {
    Eigen::VectorXd P0 = (lm.base + lm.A * theta).cwiseMax(1.0 / N);
    const Eigen::MatrixXd F = information(lm, P0, record.shots);
    Eigen::VectorXd width(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(F);
    const bool ok = es.eigenvalues().minCoeff() > 0;
    for (Eigen::Index c = 0; c < m; ++c) {
      const double se = ok ? std::sqrt((es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                                        es.eigenvectors().transpose())(c, c))
                           : std::abs(theta(c));
      width(c) = 6.0 * std::max(se, 1e-300);
    }
    for (int sweep = 0; sweep < 3; ++sweep)
      for (Eigen::Index c = 0; c < m; ++c) {
        Eigen::VectorXd trial = theta;
        auto g = [&](double v) {
          trial(c) = v;
          return dev_at(trial);
        };
        const double lo = theta(c) - width(c), hi = theta(c) + width(c);
        const double tol = 1e-10 * std::max(std::abs(theta(c)), width(c));
        const double v = golden_section(g, lo, hi, tol);
        trial(c) = v;
        const double d = dev_at(trial);
        if (d < best) {
          best = d;
          theta = trial;
        }
      }
  }
  est.deviance = best;

  est.radicand = theta;
  est.magnitude.resize(m);
  est.se.resize(m);
  const Eigen::VectorXd P = lm.base + lm.A * theta;
  const Eigen::MatrixXd F = information(lm, P, record.shots);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(F);
  const bool invertible = es.eigenvalues().minCoeff() > 1e-300;
  const Eigen::MatrixXd cov = invertible ? Eigen::MatrixXd(es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                                                           es.eigenvectors().transpose())
                                         : Eigen::MatrixXd::Constant(m, m, kInf);
  for (Eigen::Index c = 0; c < m; ++c) {
    const int k = params[std::size_t(c)];
    est.magnitude(c) = signed_root(theta(c), k);
    const double jac = k * std::pow(std::abs(est.magnitude(c)), k - 1);
    est.se(c) = jac > 0 ? std::sqrt(cov(c, c)) / jac : kInf;
    if (k % 2 == 0 && theta(c) < 0)
      est.warnings.push_back(fmt::format("{}: estimate of M{}^{} is {}, magnitude reported as {}",
                                         to_string(ErrorCode::NegativeRadicand), k, k, theta(c), est.magnitude(c)));
    // informative outcomes should carry enough counts for the asymptotics
    double total = 0.0;
    for (Eigen::Index n = 0; n < P.size(); ++n)
      if (P(n) > 1e-300) total += lm.A(n, c) * lm.A(n, c) / P(n);
    for (Eigen::Index n = 0; n < P.size(); ++n)
      if (P(n) > 1e-300 && lm.A(n, c) * lm.A(n, c) / P(n) >= 0.01 * total && N * P(n) < 20.0) {
        est.warnings.push_back(fmt::format("LowCounts: outcome {} expects {:.3g} counts for M{}",
                                           record.labels[std::size_t(n)], N * P(n), k));
        break;
      }
  }
  return est;
}

VarianceStudy variance_study(const Scene& scene, const DerivativeBasis& basis, const Povm& povm,
                             int param, long shots, int replications, std::uint64_t seed,
                             EstimationMethod method, double fisher_per_shot) {
  if (replications < 2) throw Error(ErrorCode::InvalidArgument, "need at least two replications");
  if (!(fisher_per_shot > 0)) throw Error(ErrorCode::InvalidArgument, "Fisher information must be positive");
  const Eigen::VectorXd probs = weak_exact_probs(scene, basis, povm);
  const ProbSeries model = weak_series(scene, basis, povm);
  const Eigen::VectorXd nuisance = raw_moments(scene, model.kmax, povm.frame);

  VarianceStudy v;
  v.param = param;
  v.truth = signed_root(nuisance(param), param);
  v.estimates.resize(replications);
  for (int r = 0; r < replications; ++r) {
    const CountRecord rec = sample_outcomes(probs, shots, derive_seed(seed, std::uint64_t(r)), povm.labels(), povm.label);
    v.estimates(r) = estimate_moments(rec, model, {param}, nuisance, method).magnitude(0);
  }
  v.mean = v.estimates.mean();
  v.variance = (v.estimates.array() - v.mean).square().sum() / (replications - 1);
  v.crb = 1.0 / (double(shots) * fisher_per_shot);
  v.ratio = v.variance / v.crb;
  return v;
}

CentroidStudy centroid_two_stage(const Scene& scene, const DerivativeBasis& basis, long shots,
                                 double split, double reference, int replications,
                                 std::uint64_t seed) {
  validate(scene);
  if (!(split >= 0.0 && split < 1.0)) throw Error(ErrorCode::InvalidArgument, "split must lie in [0, 1)");
  if (shots <= 0) throw Error(ErrorCode::InvalidArgument, "shot count must be positive");
  if (replications < 2) throw Error(ErrorCode::InvalidArgument, "need at least two replications");
  const long n1 = std::lround(split * double(shots));
  const long n2 = shots - n1;
  if (n2 <= 0) throw Error(ErrorCode::InvalidArgument, "no shots left for the second stage");

  const double eps = scene.epsilon;
  const Povm stage1 = centroid_povm(basis, reference);
  const ProbSeries model1 = weak_series(basis, stage1, eps);
  const Eigen::VectorXd probs1 = weak_exact_probs(scene, basis, stage1);
  const Povm spade = spade_povm(basis);
  ProbSeries model2 = weak_series(basis, spade, eps);
  Eigen::VectorXd prior = Eigen::VectorXd::Zero(std::max(model1.kmax, model2.kmax) + 1);
  prior(0) = 1.0;

  CentroidStudy c;
  c.split = split;
  c.centroid.resize(replications);
  c.m2.resize(replications);
  for (int r = 0; r < replications; ++r) {
    double xhat = reference;
    if (n1 > 0) {
      const CountRecord rec = sample_outcomes(probs1, n1, derive_seed(seed, std::uint64_t(r), 1), stage1.labels(),
                                              stage1.label);
      xhat += estimate_moments(rec, model1, {1}, prior, EstimationMethod::MaxLikelihood).radicand(0);
    }
    const Povm stage2 = with_frame(spade, xhat, true);
    model2.frame = xhat;
    const Eigen::VectorXd probs2 = weak_exact_probs(scene, basis, stage2);
    const CountRecord rec = sample_outcomes(probs2, n2, derive_seed(seed, std::uint64_t(r), 2), stage2.labels(),
                                            stage2.label);
    c.centroid(r) = xhat;
    c.m2(r) = estimate_moments(rec, model2, {2}, prior, EstimationMethod::MaxLikelihood).magnitude(0);
  }
  auto var = [](const Eigen::VectorXd& v) {
    return (v.array() - v.mean()).square().sum() / double(v.size() - 1);
  };
  c.centroid_mean = c.centroid.mean();
  c.centroid_variance = var(c.centroid);
  c.m2_mean = c.m2.mean();
  c.m2_variance = var(c.m2);
  const double dk = delta_k(basis.psf);
  const double f = 4.0 * eps * dk * dk;
  c.centroid_crb = n1 > 0 ? 1.0 / (f * double(n1)) : 0.0;
  c.m2_crb = 1.0 / (f * double(n2));
  return c;
}

}  // namespace rayleigh

#include <cmath>

#include <fmt/format.h>

#include "rayleigh/fisher.hpp"
#include "rayleigh/harness.hpp"
#include "rayleigh/prob.hpp"

namespace rayleigh {

namespace {

// Shape moved so its centroid sits on the origin.
Scene centred(Scene s) {
  const double cx = s.centroid_x();
  s.x.array() -= cx;
  if (s.dimension == 2) s.y.array() -= s.centroid_y();
  return s;
}

// True when every outcome carrying at least 1% of 𝓕_kk has a remainder
// bound below 1% of its probability.
bool series_trustworthy(const ProbSeries& series, const Eigen::VectorXd& mu, int k) {
  const Eigen::VectorXd P = series.probabilities(mu);
  const Eigen::VectorXd rb = series.remainder_bound(mu, series.kmax - 2);
  const Eigen::VectorXd g = series.p.col(k).cwiseAbs();  // proportional to |∂P/∂M_k|
  double total = 0.0;
  for (Eigen::Index n = 0; n < P.size(); ++n)
    if (P(n) > 1e-300) total += g(n) * g(n) / P(n);
  for (Eigen::Index n = 0; n < P.size(); ++n)
    if (P(n) > 1e-300 && g(n) * g(n) / P(n) >= 0.01 * total && rb(n) > 0.01 * P(n)) return false;
  return true;
}

}  // namespace

Povm make_povm(const std::string& name, const DerivativeBasis& basis, double pixel_width) {
  if (name == "spade") return spade_povm(basis);
  if (name == "interleaved-even") return interleaved_povm(basis, PairParity::Even);
  if (name == "interleaved-odd") return interleaved_povm(basis, PairParity::Odd);
  if (name == "direct") return direct_imaging_povm(basis.grid(), pixel_width);
  if (name == "sliver") return sliver_povm(basis.grid());
  throw Error(ErrorCode::ConfigError, "unknown POVM family '" + name + "'");
}

double expected_exponent(const Target& t) {
  if (t.k < 1) throw Error(ErrorCode::ConfigError, "moment order must be positive");
  if (t.povm == "direct") return 2.0 * t.k - 2.0;
  if (t.k % 2 == 0) return t.k - 2.0;
  // M_{2l+1} pairs b_l with b_{l+1}
  const int l = (t.k - 1) / 2;
  if ((t.povm == "interleaved-even" && l % 2 == 0) || (t.povm == "interleaved-odd" && l % 2 == 1)) return t.k - 1.0;
  throw Error(ErrorCode::ConfigError, fmt::format("no scaling law for M{} under {}", t.k, t.povm));
}

SlopeFit fit_loglog(const std::vector<double>& s, const std::vector<double>& f) {
  if (s.size() != f.size()) throw Error(ErrorCode::InvalidArgument, "mismatched sweep lengths");
  const Eigen::Index n = Eigen::Index(s.size());
  if (n < 3) throw Error(ErrorCode::InsufficientGrid, "a slope fit needs at least three points");
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(s[std::size_t(i)] > 0) || !(f[std::size_t(i)] > 0))
      throw Error(ErrorCode::InvalidArgument, "log-log fit needs positive values");
    A(i, 0) = 1.0;
    A(i, 1) = std::log(s[std::size_t(i)]);
    y(i) = std::log(f[std::size_t(i)]);
  }
  const Eigen::Vector2d beta = A.colPivHouseholderQr().solve(y);
  const double rss = (y - A * beta).squaredNorm();
  const Eigen::Matrix2d cov = (A.transpose() * A).inverse() * (rss / double(n - 2));
  SlopeFit fit;
  fit.intercept = beta(0);
  fit.slope = beta(1);
  fit.se = std::sqrt(std::max(0.0, cov(1, 1)));
  fit.points = int(n);
  return fit;
}

std::vector<ScalingRow> run_scaling_experiment(const ExperimentConfig& config) {
  if (config.s_values.size() < 8)
    throw Error(ErrorCode::InsufficientGrid,
                fmt::format("scaling fits need at least 8 s values, got {}", config.s_values.size()));
  if (config.targets.empty()) throw Error(ErrorCode::ConfigError, "no fisher.targets given");
  const PsfModel psf = make_psf(config);
  const DerivativeBasis basis = gram_schmidt_basis(psf, config.lmax, config.kmax);
  const Scene shape = centred(shape_scene(config));
  const double eps = config.epsilon;

  std::vector<ScalingRow> rows;
  for (const Target& t : config.targets) {
    ScalingRow row;
    row.target = t;
    row.expected = expected_exponent(t);
    const Povm povm = make_povm(t.povm, basis, config.pixel_width);
    const ProbSeries series = weak_series(basis, povm, eps);
    for (double s : config.s_values) {
      Scene scene = scaled_family(shape, s);
      scene.epsilon = eps;
      weak_series(scene, basis, povm, 1);  // convergence radius guard
      const MomentVector m = moments(scene, series.kmax);
      if (!series_trustworthy(series, m.radicand, t.k)) {
        ++row.discarded;
        continue;
      }
      row.s.push_back(s);
      row.fisher.push_back(fi_from_series(series, {t.k}, m)(0, 0));
    }
    if (row.s.size() < 3)
      throw Error(ErrorCode::InsufficientGrid, fmt::format("only {} usable points for M{} under {}", row.s.size(),
                                                           t.k, t.povm));
    row.fit = fit_loglog(row.s, row.fisher);
    row.pass = std::abs(row.fit.slope - row.expected) <= 0.1;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ConvergenceRow> run_convergence_check(const ExperimentConfig& config) {
  const PsfModel psf = make_psf(config);
  const DerivativeBasis basis = gram_schmidt_basis(psf, config.lmax, config.kmax);
  const Scene shape = centred(shape_scene(config));
  const Povm povm = spade_povm(basis);
  const ProbSeries series = weak_series(basis, povm, config.epsilon);
  const int order = std::min(config.series_order, series.kmax);
  const double r0 = convergence_radius_lower_bound(psf, std::max(1, std::min(config.lmax, psf.max_order())));

  std::vector<ConvergenceRow> rows;
  for (double s : config.s_values) {
    ConvergenceRow row;
    row.s = s;
    row.radius = r0;
    row.inside = s < r0;
    Scene scene = scaled_family(shape, s);
    scene.epsilon = config.epsilon;
    const Eigen::VectorXd mu = raw_moments(scene, series.kmax, 0.0);
    const Eigen::VectorXd exact = weak_exact_probs(scene, basis, povm);
    const Eigen::VectorXd approx = series.probabilities(mu, order);
    const Eigen::VectorXd bound = series.remainder_bound(mu, order);
    const Eigen::VectorXd err = (exact - approx).cwiseAbs();
    row.max_error = err.maxCoeff();
    row.remainder = bound.maxCoeff();
    row.pass = row.inside && ((err.array() <= bound.array() + 1e-14).all());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rayleigh

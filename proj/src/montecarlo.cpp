#include <cmath>

#include "forms.hpp"
#include "rayleigh/prob.hpp"

namespace rayleigh {

using namespace detail;

namespace {

constexpr long kBlock = 8192;

// Per-outcome running sums over one block, merged in block order.
struct Moments {
  std::vector<Neumaier> sum, sq;
  explicit Moments(std::size_t n) : sum(n), sq(n) {}
  void add(std::size_t i, double v) {
    sum[i].add(v);
    sq[i].add(v * v);
  }
};

McEstimate finish(std::vector<std::string> labels, const Moments& m, long samples) {
  const std::size_t n = m.sum.size();
  McEstimate out;
  out.labels = std::move(labels);
  out.samples = samples;
  out.mean.resize(Eigen::Index(n));
  out.se.resize(Eigen::Index(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double mean = m.sum[i].value() / double(samples);
    const double var = std::max(0.0, m.sq[i].value() / double(samples) - mean * mean);
    out.mean(Eigen::Index(i)) = mean;
    out.se(Eigen::Index(i)) = std::sqrt(var * double(samples) / double(samples - 1) / double(samples));
  }
  return out;
}

template <typename PerSample>
Moments run_blocks(std::size_t outcomes, long samples, std::uint64_t seed, PerSample&& per_sample) {
  Moments total(outcomes);
  const long blocks = (samples + kBlock - 1) / kBlock;
  for (long b = 0; b < blocks; ++b) {
    auto rng = block_stream(seed, std::uint64_t(b));
    Moments local(outcomes);
    const long count = std::min(kBlock, samples - b * kBlock);
    for (long i = 0; i < count; ++i) per_sample(rng, local);
    for (std::size_t i = 0; i < outcomes; ++i) {
      total.sum[i].add(local.sum[i].value());
      total.sq[i].add(local.sq[i].value());
    }
  }
  return total;
}

Eigen::VectorXcd draw_amplitudes(std::mt19937_64& rng, const Eigen::VectorXd& scale) {
  std::normal_distribution<double> normal;
  Eigen::VectorXcd a(scale.size());
  for (Eigen::Index j = 0; j < scale.size(); ++j) {
    const double re = normal(rng);
    const double im = normal(rng);
    a(j) = scale(j) * cplx(re, im);
  }
  return a;
}

}  // namespace

McEstimate mc_gaussian_oracle(const Scene& scene, const DerivativeBasis& basis, const Povm& povm,
                              long samples, std::uint64_t seed) {
  validate(scene);
  check_frame(scene, povm, basis.psf.sigma());
  if (povm.dimension != 1) throw Error(ErrorCode::InvalidArgument, "Monte Carlo oracle is 1D");
  if (samples < 10000) throw Error(ErrorCode::InvalidArgument, "Monte Carlo oracle needs >= 1e4 samples");

  const Grid& grid = basis.grid();
  const Eigen::Index J = scene.size();
  Eigen::MatrixXcd phi(grid.size(), J);
  for (Eigen::Index j = 0; j < J; ++j) phi.col(j) = basis.psf.derivative(0, scene.x(j) - povm.frame);
  const Eigen::MatrixXcd b_phi = basis.modes.adjoint() * grid.weights.asDiagonal() * phi;
  const Eigen::MatrixXcd gram = phi.adjoint() * grid.weights.asDiagonal() * phi;
  const Eigen::VectorXcd t = b_phi.row(0).transpose();

  const std::size_t n = std::size_t(povm.size());
  std::vector<Eigen::MatrixXcd> E(n);
  for (std::size_t i = 0; i < n; ++i) E[i] = base_operator_form(basis, povm.outcomes[i], phi, b_phi);

  const Eigen::VectorXd scale = (scene.epsilon * scene.gamma / 2.0).cwiseSqrt();
  std::vector<double> lfact(64, 0.0);
  for (std::size_t k = 1; k < lfact.size(); ++k) lfact[k] = lfact[k - 1] + std::log(double(k));
  auto poisson = [&](double mean, int k) {
    if (k >= int(lfact.size())) return 0.0;
    if (mean <= 0) return k == 0 ? 1.0 : 0.0;
    return std::exp(k * std::log(mean) - mean - lfact[std::size_t(k)]);
  };

  const Moments m = run_blocks(n, samples, seed, [&](std::mt19937_64& rng, Moments& acc) {
    const Eigen::VectorXcd a = draw_amplitudes(rng, scale);
    const double photons = std::real(a.dot(gram * a));
    const double fund = std::norm(cplx(t.transpose() * a));  // |⟨b_0, field⟩|²
    const double rest = std::max(0.0, photons - fund);
    double used = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const OutcomeOp& o = povm.outcomes[i];
      double v = 0.0;
      switch (o.kind) {
        case OutcomeKind::Bucket:
          v = 1.0 - used;
          break;
        case OutcomeKind::Vacuum:
          v = std::exp(-photons);
          break;
        case OutcomeKind::Fundamental:
          v = o.photons < 0 ? std::exp(-rest) : std::exp(-rest) * poisson(fund, o.photons);
          break;
        default: {
          const double e = std::real(a.dot(E[i] * a));
          if (o.dressing == Dressing::None) v = std::exp(-photons) * e;
          else if (o.dressing == Dressing::Summed) v = std::exp(-rest) * e;
          else v = std::exp(-rest) * poisson(fund, o.photons) * e;
        }
      }
      used += v;
      acc.add(i, v);
    }
  });
  return finish(povm.labels(), m, samples);
}

McEstimate mc_wick(WickPattern pattern, int k, const Scene& scene, double reference, long samples,
                   std::uint64_t seed) {
  validate(scene);
  const int kmin = pattern == WickPattern::Thermal ? 0 : pattern == WickPattern::FirstPair ? 2 : 1;
  if (k < kmin) throw Error(ErrorCode::UnsupportedPattern, "pattern order out of range");
  const Eigen::VectorXd scale = (scene.epsilon * scene.gamma / 2.0).cwiseSqrt();
  const Eigen::VectorXd d = scene.x.array() - reference;
  const Eigen::VectorXd d2 = d.cwiseAbs2();

  const Moments m = run_blocks(1, samples, seed, [&](std::mt19937_64& rng, Moments& acc) {
    const Eigen::VectorXcd a = draw_amplitudes(rng, scale);
    const cplx a0 = a.sum();
    const cplx a1 = (a.array() * d.array()).sum();
    const cplx a2 = (a.array() * d2.array()).sum();
    const double w = std::exp(-std::norm(a0));
    const double n0 = std::norm(a0);
    cplx v;
    switch (pattern) {
      case WickPattern::Thermal:
        v = w * std::pow(n0, k);
        break;
      case WickPattern::FirstOrder:
        v = w * std::pow(std::conj(a0), k - 1) * std::conj(a1) * std::pow(a0, k);
        break;
      case WickPattern::FirstSquared:
        v = w * std::pow(n0, k - 1) * std::norm(a1);
        break;
      case WickPattern::SecondOrder:
        v = w * std::pow(n0, k - 1) * std::conj(a2) * a0;
        break;
      case WickPattern::FirstPair:
        v = w * std::pow(std::conj(a0), k - 2) * std::conj(a1) * std::conj(a1) * std::pow(a0, k);
        break;
    }
    acc.add(0, std::real(v));
  });
  return finish({to_string(pattern)}, m, samples);
}

}  // namespace rayleigh

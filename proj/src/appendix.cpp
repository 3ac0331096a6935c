#include <cmath>

#include <fmt/format.h>

#include "forms.hpp"
#include "rayleigh/fisher.hpp"
#include "rayleigh/povm.hpp"

namespace rayleigh {

using namespace detail;

namespace {

struct AppFInputs {
  double eps, mu2, mu4, mu6, mu8, q2, q4, c;
};

AppFInputs appf_inputs(const Scene& scene, const DerivativeBasis& basis, AppFPrefactor prefactor) {
  validate(scene);
  if (scene.dimension != 1) throw Error(ErrorCode::InvalidArgument, "the M8 counterexample is 1D");
  if (basis.lmax < 4) throw Error(ErrorCode::OrderTooHigh, "the M8 counterexample needs modes through b_4");
  if (!(scene.extent() > 0)) throw Error(ErrorCode::DegenerateScene, "scene has zero size");
  const MomentVector m = moments(scene, 8);
  AppFInputs in;
  in.eps = scene.epsilon;
  in.mu2 = m.radicand(2);
  in.mu4 = m.radicand(4);
  in.mu6 = m.radicand(6);
  in.mu8 = m.radicand(8);
  in.q2 = basis.q(2);
  in.q4 = basis.q(4);
  in.c = prefactor == AppFPrefactor::Derived ? in.q2 * in.q2 / std::sqrt(2.0) : in.q2 * in.q2 / 4.0;
  return in;
}

}  // namespace

AppFResult appf_counterexample(const Scene& scene, const DerivativeBasis& basis, AppFPrefactor prefactor) {
  const AppFInputs in = appf_inputs(scene, basis, prefactor);
  const double e = in.eps, e1 = 1.0 + e;
  const double r2 = e * e / (e1 * e1);
  AppFResult r;
  r.A44 = in.q4 * in.q4 * r2 * ((in.mu8 - in.mu4 * in.mu4) + 2.0 * in.mu4 * in.mu4 / e1);
  r.A42 = in.q4 * in.c * 2.0 * r2 * ((in.mu6 * in.mu2 - in.mu4 * in.mu2 * in.mu2) + in.mu4 * in.mu2 * in.mu2 / e1);
  r.A22 = in.c * in.c *
          (2.0 * e * e * in.mu4 * in.mu4 / e1 - 4.0 * e * e * e * in.mu4 * in.mu2 * in.mu2 / (e1 * e1) +
           2.0 * std::pow(e, 4) * std::pow(in.mu2, 4) / (e1 * e1 * e1));
  const double det = r.A44 * r.A22 - r.A42 * r.A42;
  if (!(det > 0) || !(r.A44 > 0))
    throw Error(ErrorCode::DegenerateScene,
                fmt::format("two-photon block is singular (det = {}); no improvement regime", det));

  const double m8 = std::pow(in.mu8, 1.0 / 8.0);
  const double slope = 8.0 * std::pow(m8, 7);
  r.dA44 = in.q4 * in.q4 * r2 * slope;
  r.diagonal_fi = r.dA44 * r.dA44 / r.A44;
  r.subspace_qfi = r.dA44 * r.dA44 * (det + r.A22 * r.A22) / ((r.A44 + r.A22) * det);

  Eigen::Matrix2d rho, drho;
  rho << r.A44, r.A42, r.A42, r.A22;
  drho << r.dA44, 0.0, 0.0, 0.0;
  r.numeric_subspace_qfi = qfim_from_sld(rho, {drho}, 1.0)(0, 0);
  r.ratio = r.subspace_qfi / r.diagonal_fi;

  // b_4 dressed with k fundamental photons, summed over k
  const double rr = e / e1;
  double total = 0.0, rk = rr;
  for (int k = 0; k < 100000; ++k, rk *= rr) {
    const double term = rk / ((in.mu8 - in.mu4 * in.mu4) + (k + 1) * in.mu4 * in.mu4 / e1);
    total += term;
    if (term < 1e-17 * total) break;
  }
  r.total_diagonal_fi = slope * slope * in.q4 * in.q4 * total;
  r.total_ratio = (r.total_diagonal_fi - r.diagonal_fi + r.subspace_qfi) / r.total_diagonal_fi;
  r.improvement = r.ratio > 1.0 + 1e-3;
  return r;
}

AppFMc appf_monte_carlo(const Scene& scene, const DerivativeBasis& basis, long samples,
                        std::uint64_t seed, AppFPrefactor prefactor) {
  const AppFInputs in = appf_inputs(scene, basis, prefactor);
  if (samples < 2) throw Error(ErrorCode::InvalidArgument, "need at least two samples");
  const double xbar = scene.centroid_x();
  const Eigen::ArrayXd d = scene.x.array() - xbar;
  const Eigen::ArrayXd d2 = d.square(), d4 = d2.square();
  const Eigen::ArrayXd scale = (in.eps * scene.gamma.array() / 2.0).sqrt();

  constexpr long kBlock = 8192;
  Neumaier sum[3], sq[3];
  const long blocks = (samples + kBlock - 1) / kBlock;
  for (long b = 0; b < blocks; ++b) {
    auto rng = block_stream(seed, std::uint64_t(b));
    std::normal_distribution<double> normal;
    Neumaier ls[3], lq[3];
    const long count = std::min(kBlock, samples - b * kBlock);
    for (long i = 0; i < count; ++i) {
      Eigen::ArrayXcd a(scene.size());
      for (Eigen::Index j = 0; j < a.size(); ++j) {
        const double re = normal(rng);
        const double im = normal(rng);
        a(j) = scale(j) * cplx(re, im);
      }
      const cplx a0 = a.sum(), a2 = (a * d2).sum(), a4 = (a * d4).sum();
      const double w = std::exp(-std::norm(a0));
      const double v[3] = {in.q4 * in.q4 * w * std::norm(a4) * std::norm(a0),
                           in.q4 * in.c * w * std::real(a4 * a0 * std::conj(a2 * a2)),
                           in.c * in.c * w * std::norm(a2) * std::norm(a2)};
      for (int t = 0; t < 3; ++t) {
        ls[t].add(v[t]);
        lq[t].add(v[t] * v[t]);
      }
    }
    for (int t = 0; t < 3; ++t) {
      sum[t].add(ls[t].value());
      sq[t].add(lq[t].value());
    }
  }
  AppFMc out;
  const double n = double(samples);
  for (int t = 0; t < 3; ++t) {
    const double mean = sum[t].value() / n;
    const double var = std::max(0.0, sq[t].value() / n - mean * mean) * n / (n - 1.0);
    out.mean(t) = mean;
    out.se(t) = std::sqrt(var / n);
  }
  return out;
}

CentroidScheme centroid_scheme(const PsfModel& psf, double epsilon, SourceMode mode) {
  if (!(epsilon > 0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  const double dk = delta_k(psf);
  const double f = 4.0 * epsilon * dk * dk;
  CentroidScheme c;
  c.fi11 = f;
  c.split_fim = Eigen::Matrix2d::Identity() * (f / 2.0);
  c.qfim = Eigen::Matrix2d::Identity() * f;
  c.efficiency = std::sqrt((1.0 + std::exp(1.0)) / 4.0);
  c.trace_bound = mode == SourceMode::Weak ? 4.0 / f : (1.0 + std::exp(1.0)) / f;
  return c;
}

Povm centroid_povm(const DerivativeBasis& basis, double reference) {
  if (basis.lmax < 1) throw Error(ErrorCode::InvalidArgument, "centroid pair needs lmax >= 1");
  Povm p;
  p.label = "centroid";
  OutcomeOp vac;
  vac.kind = OutcomeKind::Vacuum;
  vac.label = "vac";
  p.outcomes.push_back(vac);
  for (double sign : {1.0, -1.0}) {
    OutcomeOp o;
    o.kind = OutcomeKind::Mode;
    o.coeffs = pair_coeffs(basis.lmax, 0, sign);
    o.label = sign > 0 ? "b0+b1" : "b0-b1";
    p.outcomes.push_back(o);
  }
  OutcomeOp bucket;
  bucket.kind = OutcomeKind::Bucket;
  bucket.label = "bucket";
  p.outcomes.push_back(bucket);
  return with_frame(p, reference, true);
}

}  // namespace rayleigh

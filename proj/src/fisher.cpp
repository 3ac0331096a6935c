#include "rayleigh/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace rayleigh {

namespace {

double factorial(int k) { return std::tgamma(k + 1.0); }

// ∂μ/∂M for μ = sign · M^k.
double moment_jacobian(double radicand, int k) {
  const double sign = radicand < 0 ? -1.0 : 1.0;
  return k * sign * std::pow(std::abs(radicand), double(k - 1) / k);
}

// Σ_n g_a g_b / P over outcomes, with the limit convention for empty outcomes.
Eigen::MatrixXd accumulate(const Eigen::VectorXd& P, const Eigen::MatrixXd& grad,
                           const std::vector<std::string>& labels) {
  const Eigen::Index m = grad.cols();
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index n = 0; n < P.size(); ++n) {
    const bool zero_grad = grad.row(n).cwiseAbs().maxCoeff() == 0.0;
    if (P(n) < 1e-300) {
      if (zero_grad) continue;
      if (P(n) <= 0.0)
        throw Error(ErrorCode::SingularProbability,
                    fmt::format("outcome {} has P = {} with a nonzero derivative",
                                n < Eigen::Index(labels.size()) ? labels[std::size_t(n)] : std::to_string(n), P(n)));
    }
    if (zero_grad) continue;
    F += grad.row(n).transpose() * grad.row(n) / P(n);
  }
  return 0.5 * (F + F.transpose());
}

}  // namespace

const char* to_string(Regime r) {
  switch (r) {
    case Regime::LimitFormula: return "limit-formula";
    case Regime::Series: return "series";
    case Regime::Exact: return "exact";
  }
  return "unknown";
}

bool FisherReport::symmetric(double tol) const {
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  return (matrix - matrix.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

bool FisherReport::positive_semidefinite() const {
  if (matrix.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (matrix + matrix.transpose()));
  return es.eigenvalues().minCoeff() >= -1e-10 * std::abs(matrix.trace());
}

FisherReport fi_from_series(const ProbSeries& series, const std::vector<int>& params,
                            const MomentVector& at) {
  if (params.empty()) throw Error(ErrorCode::InvalidArgument, "no parameters requested");
  const int top = *std::max_element(params.begin(), params.end());
  if (*std::min_element(params.begin(), params.end()) < 1)
    throw Error(ErrorCode::InvalidArgument, "moment orders start at 1");
  if (top + 2 > series.kmax)
    throw Error(ErrorCode::OrderTooHigh,
                fmt::format("M_{} needs series order {} but the series stops at {}", top, top + 2, series.kmax));
  if (at.radicand.size() < series.kmax + 1)
    throw Error(ErrorCode::InvalidArgument, "moment vector is shorter than the series");
  if (std::abs(at.xbar - series.frame) > 1e-9 * std::max(1.0, std::abs(at.xbar)))
    throw Error(ErrorCode::CentroidFrameMismatch, "series frame is not the scene centroid");

  const Eigen::VectorXd mu = at.radicand.head(series.kmax + 1);
  const Eigen::VectorXd P = series.probabilities(mu);
  const Eigen::Index m = Eigen::Index(params.size());
  Eigen::MatrixXd grad(series.size(), m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const int k = params[std::size_t(a)];
    grad.col(a) = series.epsilon * series.p.col(k) * (moment_jacobian(mu(k), k) / factorial(k));
  }

  FisherReport r;
  for (int k : params) r.params.push_back(fmt::format("M{}", k));
  r.matrix = accumulate(P, grad, series.labels);
  r.regime = Regime::Series;
  r.s = at.s;
  r.epsilon = series.epsilon;
  r.truncation = series.kmax;
  return r;
}

FisherReport fi_from_series_2d(const ProbSeries2D& series,
                               const std::vector<std::pair<int, int>>& params,
                               const MomentVector& at) {
  if (params.empty()) throw Error(ErrorCode::InvalidArgument, "no parameters requested");
  int top = 0;
  for (auto [a, b] : params) {
    if (a < 0 || b < 0 || a + b < 1) throw Error(ErrorCode::InvalidArgument, "invalid 2D moment order");
    top = std::max(top, a + b);
  }
  if (top + 2 > series.kmax)
    throw Error(ErrorCode::OrderTooHigh,
                fmt::format("order {} needs series order {} but the series stops at {}", top, top + 2, series.kmax));
  if (at.radicand2d.rows() < series.kmax + 1)
    throw Error(ErrorCode::InvalidArgument, "2D moment matrix is shorter than the series");

  const Eigen::MatrixXd mu = at.radicand2d.topLeftCorner(series.kmax + 1, series.kmax + 1);
  const Eigen::VectorXd P = series.probabilities(mu);
  const Eigen::Index m = Eigen::Index(params.size());
  Eigen::MatrixXd grad(series.size(), m);
  for (Eigen::Index c = 0; c < m; ++c) {
    const auto [a, b] = params[std::size_t(c)];
    const double jac = moment_jacobian(mu(a, b), a + b) / (factorial(a) * factorial(b));
    for (Eigen::Index n = 0; n < series.size(); ++n)
      grad(n, c) = series.epsilon * series.p[std::size_t(n)](a, b) * jac;
  }

  FisherReport r;
  for (auto [a, b] : params) r.params.push_back(fmt::format("M{},{}", a, b));
  r.matrix = accumulate(P, grad, series.labels);
  r.regime = Regime::Series;
  r.s = at.s;
  r.epsilon = series.epsilon;
  r.truncation = series.kmax;
  return r;
}

FisherReport fi_from_strong(const StrongSeries& series, double m1, double m2) {
  const double mu2 = m2 * m2 + m1 * m1;
  const Eigen::VectorXd P = series.probabilities(m1, mu2);
  Eigen::MatrixXd grad(series.size(), 2);
  grad.col(0) = series.q1 + 2.0 * m1 * (series.q2mu + series.q2m1);
  grad.col(1) = 2.0 * m2 * series.q2mu;

  FisherReport r;
  r.params = {"M1", "M2"};
  r.matrix = accumulate(P, grad, series.labels);
  r.regime = Regime::Series;
  r.s = 0.0;
  r.epsilon = series.epsilon;
  r.truncation = series.truncation;
  return r;
}

double strong_fi_limit(const StrongSeries& series) {
  double total = 0.0;
  for (Eigen::Index n = 0; n < series.size(); ++n)
    if (series.q0(n) == 0.0) total += 4.0 * series.q2mu(n);
  return total;
}

FisherReport fi_limit_formula(const DerivativeBasis& basis, const MomentVector& m, double epsilon,
                              const LimitSpec& spec) {
  if (!(epsilon > 0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  FisherReport r;
  r.regime = Regime::LimitFormula;
  r.s = m.s;
  r.epsilon = epsilon;
  const int l = spec.l;
  auto need = [&](int k) {
    if (k > m.kmax) throw Error(ErrorCode::InvalidArgument, fmt::format("moment M_{} not available", k));
  };
  auto need_q = [&](int i) {
    if (i > basis.lmax) throw Error(ErrorCode::OrderTooHigh, fmt::format("basis has no mode b_{}", i));
  };
  double value = 0.0;
  switch (spec.which) {
    case LimitFormula::Second: {
      const double dk = delta_k(basis.psf);
      value = 4.0 * epsilon * dk * dk;
      r.params = {"M2"};
      break;
    }
    case LimitFormula::Even: {
      if (l < 1) throw Error(ErrorCode::InvalidArgument, "even formula needs l >= 1");
      need(2 * l);
      need_q(l);
      const double q = basis.q(l);
      value = epsilon * q * q * 4.0 * l * l * std::pow(m.M(2 * l), 2 * l - 2);
      r.params = {fmt::format("M{}", 2 * l)};
      break;
    }
    case LimitFormula::Odd: {
      if (l < 1) throw Error(ErrorCode::InvalidArgument, "odd formula needs l >= 1");
      need(2 * l + 1);
      need_q(l + 1);
      const double q = basis.q(l + 1);
      const double even = m.M(2 * l);
      if (even == 0.0) throw Error(ErrorCode::ZeroEvenMoment, fmt::format("M_{} vanishes", 2 * l));
      value = 4.0 * epsilon * q * q * std::pow(2 * l + 1.0, 2) * std::pow(m.M(2 * l + 1), 4 * l) /
              std::pow(even, 2 * l);
      r.params = {fmt::format("M{}", 2 * l + 1)};
      break;
    }
    default:
      throw Error(ErrorCode::InvalidArgument, "2D formula requested on a 1D basis");
  }
  r.matrix = Eigen::MatrixXd::Constant(1, 1, value);
  return r;
}

FisherReport fi_limit_formula_2d(const Basis2D& basis, const MomentVector& m, double epsilon,
                                 const LimitSpec& spec) {
  if (!(epsilon > 0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (m.radicand2d.size() == 0) throw Error(ErrorCode::InvalidArgument, "moment vector is not 2D");
  const int L = spec.l, K = spec.K;
  if (L < 0 || K < 1) throw Error(ErrorCode::InvalidArgument, "2D formula needs K >= 1 and L >= 0");
  auto q = [&](int a, int b) {
    if (a > basis.lx() || b > basis.ly())
      throw Error(ErrorCode::OrderTooHigh, fmt::format("basis has no mode b_{},{}", a, b));
    return basis.q2d(a, b);
  };
  auto M = [&](int a, int b) {
    if (a + b > m.kmax) throw Error(ErrorCode::InvalidArgument, fmt::format("moment M_{},{} not available", a, b));
    return m.magnitude2d(a, b);
  };
  FisherReport r;
  r.regime = Regime::LimitFormula;
  r.s = m.s;
  r.epsilon = epsilon;
  double value = 0.0;
  switch (spec.which) {
    case LimitFormula::Even2D: {
      if (L > K) throw Error(ErrorCode::InvalidArgument, "L must not exceed K");
      const double qq = q(L, K - L);
      value = epsilon * qq * qq * 4.0 * K * K * std::pow(M(2 * L, 2 * K - 2 * L), 2 * K - 2);
      r.params = {fmt::format("M{},{}", 2 * L, 2 * K - 2 * L)};
      break;
    }
    case LimitFormula::Pair2D: {
      if (L > K - 1) throw Error(ErrorCode::InvalidArgument, "L must be below K");
      const double qa = q(L, K - L), qb = q(L + 1, K - L - 1);
      const double a = qa * qa * std::pow(M(2 * L, 2 * K - 2 * L), 2 * K) +
                       qb * qb * std::pow(M(2 * L + 2, 2 * K - 2 * L - 2), 2 * K);
      const double odd = M(2 * L + 1, 2 * K - 2 * L - 1);
      const double b2 = 4.0 * qa * qa * qb * qb * std::pow(odd, 4 * K);
      const double den = a * a - b2;
      if (!(den > 0)) throw Error(ErrorCode::ZeroEvenMoment, "pair formula denominator vanishes");
      value = 4.0 * epsilon * a * qa * qa * qb * qb * 4.0 * K * K * std::pow(odd, 4 * K - 2) / den;
      r.params = {fmt::format("M{},{}", 2 * L + 1, 2 * K - 2 * L - 1)};
      break;
    }
    case LimitFormula::OddX2D:
    case LimitFormula::OddY2D: {
      if (L > K) throw Error(ErrorCode::InvalidArgument, "L must not exceed K");
      const bool x = spec.which == LimitFormula::OddX2D;
      const double qq = x ? q(L + 1, K - L) : q(K - L, L + 1);
      const double odd = x ? M(2 * L + 1, 2 * K - 2 * L) : M(2 * K - 2 * L, 2 * L + 1);
      const double even = x ? M(2 * L, 2 * K - 2 * L) : M(2 * K - 2 * L, 2 * L);
      if (even == 0.0) throw Error(ErrorCode::ZeroEvenMoment, "even companion moment vanishes");
      value = 4.0 * epsilon * qq * qq * std::pow(2 * K + 1.0, 2) * std::pow(odd, 4 * K) / std::pow(even, 2 * K);
      r.params = {x ? fmt::format("M{},{}", 2 * L + 1, 2 * K - 2 * L)
                    : fmt::format("M{},{}", 2 * K - 2 * L, 2 * L + 1)};
      break;
    }
    default:
      throw Error(ErrorCode::InvalidArgument, "1D formula requested on a 2D basis");
  }
  r.matrix = Eigen::MatrixXd::Constant(1, 1, value);
  return r;
}

CrbReport crb(const FisherReport& report) {
  CrbReport c;
  c.params = report.params;
  const Eigen::Index m = report.size();
  const Eigen::MatrixXd F = 0.5 * (report.matrix + report.matrix.transpose());
  c.diagonal_bound.resize(m);
  for (Eigen::Index i = 0; i < m; ++i)
    c.diagonal_bound(i) = F(i, i) > 0 ? 1.0 / F(i, i) : std::numeric_limits<double>::infinity();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(F);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  c.invertible = top > 0 && es.eigenvalues().minCoeff() > 1e-12 * top;
  if (c.invertible) {
    const Eigen::MatrixXd inv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                                es.eigenvectors().transpose();
    c.matrix_bound = inv.diagonal();
    c.coincide = ((c.matrix_bound - c.diagonal_bound).array().abs() <=
                  1e-10 * c.diagonal_bound.array().abs()).all();
  } else {
    c.matrix_bound = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::quiet_NaN());
    c.note = Error(ErrorCode::SingularFIM, "matrix bound unavailable, per-parameter bounds only").what();
  }
  return c;
}

}  // namespace rayleigh

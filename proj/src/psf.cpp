#include "rayleigh/psf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

namespace rayleigh {

namespace {

constexpr double kPi = std::numbers::pi;

// Composite Gauss-Legendre on [0, 1]; panel count grows with the oscillation rate.
const std::pair<Eigen::VectorXd, Eigen::VectorXd>& unit_rule() {
  static const auto rule = [] {
    auto [x, w] = gauss_legendre(24);
    return std::make_pair(Eigen::VectorXd((x.array() + 1.0) / 2.0), Eigen::VectorXd(w / 2.0));
  }();
  return rule;
}

// n-th derivative of sin(t)/t via ∫_0^1 u^n cos(tu + nπ/2) du.
double sinc_derivative(int n, double t) {
  const auto& [x, w] = unit_rule();
  const int panels = 1 + static_cast<int>(std::ceil(std::abs(t) / 4.0));
  const double h = 1.0 / panels;
  const double phase = n * kPi / 2.0;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double u = (p + x(i)) * h;
      acc += w(i) * h * std::pow(u, n) * std::cos(t * u + phase);
    }
  }
  return acc;
}

// Physicists' Hermite polynomial by three-term recurrence.
double hermite(int n, double u) {
  double h0 = 1.0;
  if (n == 0) return h0;
  double h1 = 2.0 * u;
  for (int k = 1; k < n; ++k) {
    const double h2 = 2.0 * u * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

Eigen::VectorXd fft_frequencies(Eigen::Index n, double h) {
  Eigen::VectorXd k(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const Eigen::Index mm = (m <= n / 2) ? m : m - n;
    k(m) = 2.0 * kPi * double(mm) / (double(n) * h);
  }
  return k;
}

// Flat to half-Nyquist, raised-cosine roll-off to zero at Nyquist.
double taper(double k, double knyq) {
  const double a = std::abs(k);
  if (a <= 0.5 * knyq) return 1.0;
  if (a >= knyq) return 0.0;
  return 0.5 * (1.0 + std::cos(kPi * (a - 0.5 * knyq) / (0.5 * knyq)));
}

void check_order(int order, int max_order) {
  if (order < 0)
    throw Error(ErrorCode::InvalidArgument, "negative derivative order");
  if (order > max_order)
    throw Error(ErrorCode::OrderTooHigh,
                "order " + std::to_string(order) + " exceeds model limit " + std::to_string(max_order));
}

}  // namespace

bool Grid::symmetric(double tol) const {
  const Eigen::Index n = size();
  const double scale = std::max(std::abs(lo()), std::abs(hi()));
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(nodes(i) + nodes(n - 1 - i)) > tol * scale) return false;
  return true;
}

Grid uniform_grid(double lo, double hi, Eigen::Index n) {
  if (n < 2 || !(hi > lo))
    throw Error(ErrorCode::InvalidArgument, "uniform grid needs n >= 2 and hi > lo");
  Grid g;
  g.nodes = Eigen::VectorXd::LinSpaced(n, lo, hi);
  const double h = (hi - lo) / double(n - 1);
  g.weights = Eigen::VectorXd::Constant(n, h);
  g.weights(0) = g.weights(n - 1) = h / 2.0;
  return g;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n) {
  // Golub-Welsch
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  Eigen::VectorXd w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
  return {es.eigenvalues(), w};
}

PsfModel PsfModel::gaussian(double sigma) {
  return gaussian(sigma, uniform_grid(-10.0 * sigma, 10.0 * sigma, 2048));
}

PsfModel PsfModel::gaussian(double sigma, Grid grid) {
  if (!(sigma > 0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  PsfModel m;
  m.kind_ = PsfKind::Gaussian;
  m.sigma_ = sigma;
  m.scale_ = std::pow(2.0 * kPi * sigma * sigma, -0.25);
  m.grid_ = std::move(grid);
  m.max_order_ = 40;
  m.even_ = true;
  return m;
}

PsfModel PsfModel::sinc(double sigma) {
  return sinc(sigma, uniform_grid(-10.0 * sigma, 10.0 * sigma, 2048));
}

PsfModel PsfModel::sinc(double sigma, Grid grid) {
  if (!(sigma > 0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  PsfModel m;
  m.kind_ = PsfKind::Sinc;
  m.sigma_ = sigma;
  m.scale_ = 1.0;
  m.grid_ = std::move(grid);
  m.max_order_ = 40;
  m.even_ = true;
  // normalized on the model grid, so the profile is effectively windowed
  m.scale_ = 1.0 / std::sqrt(norm_squared(m.grid_, m.derivative(0)));
  return m;
}

PsfModel PsfModel::sampled(Grid grid, Eigen::VectorXcd values, int max_order) {
  const Eigen::Index n = grid.size();
  if (values.size() != n)
    throw Error(ErrorCode::GridMismatch, "sample count differs from grid size");
  if (n < 8) throw Error(ErrorCode::InsufficientGrid, "sampled PSF needs at least 8 nodes");
  const double h = grid.spacing();
  for (Eigen::Index i = 1; i < n; ++i)
    if (std::abs(grid.nodes(i) - grid.nodes(i - 1) - h) > 1e-6 * h)
      throw Error(ErrorCode::InvalidArgument, "sampled PSF requires a uniform grid");

  PsfModel m;
  m.kind_ = PsfKind::Sampled;
  m.grid_ = std::move(grid);
  m.max_order_ = max_order;
  m.scale_ = 1.0;

  const double nrm = norm_squared(m.grid_, values);
  if (!(nrm > 0)) throw Error(ErrorCode::InvalidArgument, "sampled PSF is identically zero");
  values /= std::sqrt(nrm);

  // rms width stands in for σ when sizing derived grids
  const double mean = m.grid_.weights.dot(values.cwiseAbs2().cwiseProduct(m.grid_.nodes));
  const double var = m.grid_.weights.dot(
      values.cwiseAbs2().cwiseProduct((m.grid_.nodes.array() - mean).square().matrix()));
  m.sigma_ = std::sqrt(var);

  Eigen::FFT<double> fft;
  std::vector<cplx> in(values.data(), values.data() + n), out;
  fft.fwd(out, in);
  m.spectrum_ = Eigen::Map<Eigen::VectorXcd>(out.data(), n);
  m.freqs_ = fft_frequencies(n, h);

  const double knyq = kPi / h;
  double total = 0.0, high = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = std::norm(m.spectrum_(i));
    total += e;
    if (std::abs(m.freqs_(i)) > 0.5 * knyq) high += e;
    m.spectrum_(i) *= taper(m.freqs_(i), knyq);
  }
  if (high > 1e-8 * total)
    throw Error(ErrorCode::NotDifferentiable,
                "sampled PSF carries " + std::to_string(high / total) +
                    " of its energy above half-Nyquist");

  m.even_ = false;
  if (m.grid_.symmetric(1e-9)) {
    const double peak = values.cwiseAbs().maxCoeff();
    m.even_ = (values - values.reverse()).cwiseAbs().maxCoeff() <= 1e-12 * peak;
  }

  const int check = std::min(max_order - 1, 8);
  const double viol = m.parity_violation(check);
  if (viol > 1e-8)
    throw Error(ErrorCode::InvalidArgument,
                "sampled PSF violates the derivative orthogonality condition (relative " +
                    std::to_string(viol) + ")");
  return m;
}

PsfModel PsfModel::load_sampled(const std::string& path, int max_order) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::vector<double> xs;
  std::vector<cplx> vs;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::vector<double> cols;
    double v;
    while (ss >> v) cols.push_back(v);
    if (cols.empty()) continue;
    if (cols.size() < 2 || cols.size() > 3)
      throw Error(ErrorCode::IoError, "expected 2 or 3 columns in " + path);
    xs.push_back(cols[0]);
    vs.emplace_back(cols[1], cols.size() == 3 ? cols[2] : 0.0);
  }
  if (xs.size() < 2) throw Error(ErrorCode::IoError, "no samples in " + path);
  Grid g = uniform_grid(xs.front(), xs.back(), Eigen::Index(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::abs(xs[i] - g.nodes(Eigen::Index(i))) > 1e-6 * g.spacing())
      throw Error(ErrorCode::InvalidArgument, "sampled PSF requires a uniform grid");
  return sampled(std::move(g), Eigen::Map<Eigen::VectorXcd>(vs.data(), Eigen::Index(vs.size())),
                 max_order);
}

Eigen::VectorXcd PsfModel::derivative(int order, const Eigen::VectorXd& points, double shift) const {
  check_order(order, max_order_);
  const Eigen::Index n = points.size();
  Eigen::VectorXcd out(n);
  switch (kind_) {
    case PsfKind::Gaussian: {
      const double c = scale_ * std::pow(-1.0 / (2.0 * sigma_), order);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double u = (points(i) - shift) / (2.0 * sigma_);
        out(i) = c * hermite(order, u) * std::exp(-u * u);
      }
      break;
    }
    case PsfKind::Sinc: {
      const double c = scale_ * std::pow(sigma_, -order);
      for (Eigen::Index i = 0; i < n; ++i)
        out(i) = c * sinc_derivative(order, (points(i) - shift) / sigma_);
      break;
    }
    case PsfKind::Sampled:
      out = sampled_derivative(order, points, shift);
      break;
  }
  return out;
}

Eigen::VectorXcd PsfModel::sampled_derivative(int order, const Eigen::VectorXd& points,
                                              double shift) const {
  const Eigen::Index n = grid_.size();
  const double x0 = grid_.lo();
  Eigen::VectorXcd spec(n);
  for (Eigen::Index m = 0; m < n; ++m)
    spec(m) = spectrum_(m) * std::pow(cplx(0.0, freqs_(m)), order);

  const bool on_grid = points.size() == n && (points - grid_.nodes).cwiseAbs().maxCoeff() <=
                                                 1e-12 * std::max(1.0, std::abs(x0));
  if (on_grid) {
    for (Eigen::Index m = 0; m < n; ++m) spec(m) *= std::exp(cplx(0.0, -freqs_(m) * shift));
    Eigen::FFT<double> fft;
    std::vector<cplx> in(spec.data(), spec.data() + n), out;
    fft.inv(out, in);
    return Eigen::Map<Eigen::VectorXcd>(out.data(), n);
  }
  // band-limited interpolant evaluated directly
  Eigen::VectorXcd out(points.size());
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    const double x = points(i) - shift - x0;
    cplx acc = 0.0;
    for (Eigen::Index m = 0; m < n; ++m) acc += spec(m) * std::exp(cplx(0.0, freqs_(m) * x));
    out(i) = acc / double(n);
  }
  return out;
}

double PsfModel::parity_violation(int lmax) const {
  double worst = 0.0;
  Eigen::VectorXcd prev = derivative(0);
  for (int l = 0; l < lmax; ++l) {
    Eigen::VectorXcd next = derivative(l + 1);
    const cplx ip = inner_product(grid_, prev, next);
    const double denom = std::sqrt(norm_squared(grid_, prev) * norm_squared(grid_, next));
    worst = std::max(worst, std::abs(ip) / denom);
    prev = std::move(next);
  }
  return worst;
}

double delta_k(const PsfModel& psf) {
  return std::sqrt(norm_squared(psf.grid(), psf.derivative(1)));
}

DeltaK2D delta_k(const Psf2D& psf) {
  DeltaK2D d;
  d.kx = delta_k(psf.x);
  d.ky = delta_k(psf.y);
  const cplx cx = inner_product(psf.x.grid(), psf.x.derivative(1), psf.x.derivative(0));
  const cplx cy = inner_product(psf.y.grid(), psf.y.derivative(0), psf.y.derivative(1));
  d.r = std::real(cx * cy) / (d.kx * d.ky);
  return d;
}

double convergence_radius_lower_bound(const PsfModel& psf, int lmax) {
  if (lmax < 1) throw Error(ErrorCode::InvalidArgument, "lmax must be at least 1");
  check_order(lmax, psf.max_order());
  double sup = 0.0;
  double log_fact = 0.0;
  for (int l = 1; l <= lmax; ++l) {
    log_fact += std::log(double(l));
    const double nrm = std::sqrt(norm_squared(psf.grid(), psf.derivative(l)));
    sup = std::max(sup, std::exp((std::log(nrm) - log_fact) / l));
  }
  return 1.0 / sup;
}

}  // namespace rayleigh

#include "rayleigh/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace rayleigh {

double Scene::extent() const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < size(); ++i)
    for (Eigen::Index j = i + 1; j < size(); ++j) {
      const double dx = x(i) - x(j);
      const double dy = dimension == 2 ? y(i) - y(j) : 0.0;
      s = std::max(s, std::hypot(dx, dy));
    }
  return s;
}

void validate(const Scene& scene) {
  if (scene.size() == 0) throw Error(ErrorCode::EmptyScene, "scene has no points");
  if (scene.dimension != 1 && scene.dimension != 2)
    throw Error(ErrorCode::InvalidArgument, "dimension must be 1 or 2");
  if (scene.gamma.size() != scene.size() || (scene.dimension == 2 && scene.y.size() != scene.size()))
    throw Error(ErrorCode::InvalidArgument, "coordinate and weight counts differ");
  if ((scene.gamma.array() < 0).any())
    throw Error(ErrorCode::InvalidArgument, "weights must be non-negative");
  if (std::abs(scene.gamma.sum() - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "weights must sum to one");
  if (!(scene.epsilon > 0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
}

Scene make_scene(Eigen::VectorXd x, Eigen::VectorXd gamma, double epsilon) {
  if (x.size() == 0) throw Error(ErrorCode::EmptyScene, "scene has no points");
  const double total = gamma.sum();
  if (!(total > 0)) throw Error(ErrorCode::InvalidArgument, "weights must have positive sum");
  Scene s{1, std::move(x), {}, gamma / total, epsilon};
  validate(s);
  return s;
}

Scene make_scene_2d(Eigen::VectorXd x, Eigen::VectorXd y, Eigen::VectorXd gamma, double epsilon) {
  if (x.size() == 0) throw Error(ErrorCode::EmptyScene, "scene has no points");
  const double total = gamma.sum();
  if (!(total > 0)) throw Error(ErrorCode::InvalidArgument, "weights must have positive sum");
  Scene s{2, std::move(x), std::move(y), gamma / total, epsilon};
  validate(s);
  return s;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  int dim = 1;
  double eps = 0.0;
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      std::string key = line.substr(0, eq);
      key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
      const double value = std::stod(line.substr(eq + 1));
      if (key == "dimension") dim = int(value);
      else if (key == "epsilon") eps = value;
      else throw Error(ErrorCode::ConfigError, "unknown scene key '" + key + "'");
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::vector<double> cols;
    double v;
    while (ss >> v) cols.push_back(v);
    if (cols.empty()) continue;
    if (int(cols.size()) != dim + 1)
      throw Error(ErrorCode::ConfigError, "scene row has wrong column count in " + path);
    rows.push_back(cols);
  }
  const Eigen::Index n = Eigen::Index(rows.size());
  Eigen::VectorXd x(n), y(n), g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) = rows[i][0];
    if (dim == 2) y(i) = rows[i][1];
    g(i) = rows[i].back();
  }
  return dim == 2 ? make_scene_2d(x, y, g, eps) : make_scene(x, g, eps);
}

Eigen::VectorXd raw_moments(const Scene& scene, int kmax, double frame) {
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(kmax + 1);
  for (Eigen::Index j = 0; j < scene.size(); ++j) {
    const double d = scene.x(j) - frame;
    double p = scene.gamma(j);
    for (int k = 0; k <= kmax; ++k) {
      mu(k) += p;
      p *= d;
    }
  }
  return mu;
}

Eigen::MatrixXd raw_moments_2d(const Scene& scene, int kmax, double fx, double fy) {
  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(kmax + 1, kmax + 1);
  for (Eigen::Index j = 0; j < scene.size(); ++j) {
    const double dx = scene.x(j) - fx;
    const double dy = scene.dimension == 2 ? scene.y(j) - fy : 0.0;
    double px = scene.gamma(j);
    for (int k = 0; k <= kmax; ++k) {
      double p = px;
      for (int l = 0; l <= kmax; ++l) {
        mu(k, l) += p;
        p *= dy;
      }
      px *= dx;
    }
  }
  return mu;
}

MomentVector moments(const Scene& scene, int kmax) {
  if (scene.size() == 0) throw Error(ErrorCode::EmptyScene, "scene has no points");
  if (kmax < 1) throw Error(ErrorCode::InvalidArgument, "kmax must be at least 1");
  MomentVector m;
  m.kmax = kmax;
  m.xbar = scene.centroid_x();
  m.ybar = scene.centroid_y();
  m.s = scene.extent();
  m.radicand = raw_moments(scene, kmax, m.xbar);
  m.radicand(1) = 0.0;  // exact about the centroid
  m.magnitude.resize(kmax + 1);
  m.sign.resize(kmax + 1);
  m.magnitude(0) = 1.0;
  m.sign(0) = 1;
  for (int k = 1; k <= kmax; ++k) {
    m.magnitude(k) = std::pow(std::abs(m.radicand(k)), 1.0 / k);
    m.sign(k) = m.radicand(k) < 0 ? -1 : 1;
  }
  if (scene.dimension == 2) {
    m.radicand2d = raw_moments_2d(scene, kmax, m.xbar, m.ybar);
    m.radicand2d(1, 0) = m.radicand2d(0, 1) = 0.0;
    m.magnitude2d = Eigen::MatrixXd::Ones(kmax + 1, kmax + 1);
    for (int k = 0; k <= kmax; ++k)
      for (int l = 0; l <= kmax; ++l)
        if (k + l > 0) m.magnitude2d(k, l) = std::pow(std::abs(m.radicand2d(k, l)), 1.0 / (k + l));
  }
  return m;
}

SecondMoments2D second_moment_params_2d(const Scene& scene) {
  if (scene.dimension != 2) throw Error(ErrorCode::InvalidArgument, "scene is not 2D");
  const Eigen::MatrixXd mu = raw_moments_2d(scene, 2, scene.centroid_x(), scene.centroid_y());
  SecondMoments2D p;
  p.C << mu(2, 0), mu(1, 1), mu(1, 1), mu(0, 2);
  const double scale = std::max(1e-300, p.C.trace());
  if (mu(2, 0) <= 1e-14 * scale || mu(0, 2) <= 1e-14 * scale)
    throw Error(ErrorCode::DegenerateCovariance, "a second moment along an axis vanishes");
  p.X = std::sqrt(mu(2, 0));
  p.Y = std::sqrt(mu(0, 2));
  p.beta = std::clamp(mu(1, 1) / (p.X * p.Y), -1.0, 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(p.C);
  // eigenvalues ascend; Λ1 is the major axis
  p.lambda1 = std::sqrt(std::max(0.0, es.eigenvalues()(1)));
  p.lambda2 = std::sqrt(std::max(0.0, es.eigenvalues()(0)));
  const Eigen::Vector2d v = es.eigenvectors().col(1);
  p.theta = std::atan2(v(1), v(0));
  if (p.theta > M_PI / 2) p.theta -= M_PI;
  if (p.theta <= -M_PI / 2) p.theta += M_PI;
  p.theta_degenerate = es.eigenvalues()(1) - es.eigenvalues()(0) <= 1e-12 * scale;
  if (p.theta_degenerate) p.theta = 0.0;
  return p;
}

Scene scaled_family(const Scene& shape, double s) {
  if (!(s > 0)) throw Error(ErrorCode::InvalidArgument, "target size must be positive");
  const double s0 = shape.extent();
  if (!(s0 > 0)) throw Error(ErrorCode::ZeroSizeShape, "shape has zero extent");
  Scene out = shape;
  const double f = s / s0;
  const double cx = shape.centroid_x();
  out.x = (shape.x.array() - cx) * f + cx;
  if (shape.dimension == 2) {
    const double cy = shape.centroid_y();
    out.y = (shape.y.array() - cy) * f + cy;
  }
  return out;
}

}  // namespace rayleigh

#include "forms.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace rayleigh::detail {

// Length of the node cell [x - h/2, x + h/2] (clipped to the grid) inside [lo, hi].
Eigen::VectorXd pixel_weights(const Grid& grid, double lo, double hi) {
  const double h = grid.spacing();
  Eigen::VectorXd w(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double a = std::max({grid.nodes(i) - h / 2, grid.lo(), lo});
    const double b = std::min({grid.nodes(i) + h / 2, grid.hi(), hi});
    w(i) = std::max(0.0, b - a);
  }
  return w;
}

// Parity image f(-x) on a symmetric grid.
Eigen::MatrixXcd reflect(const Grid& grid, const Eigen::MatrixXcd& f) {
  if (!grid.symmetric(1e-9))
    throw Error(ErrorCode::AsymmetricGrid, "parity needs a grid symmetric about the centre");
  return f.colwise().reverse();
}

bool mode_like(const OutcomeOp& o) {
  return o.kind == OutcomeKind::Mode || o.kind == OutcomeKind::Fundamental ||
         o.kind == OutcomeKind::Vacuum;
}

// Single-photon part of an outcome whose photon dressing is ignored.
bool has_single_photon_part(const OutcomeOp& o) {
  if (o.kind == OutcomeKind::Fundamental) return o.photons == -1 || o.photons == 1;
  if (o.dressing == Dressing::PerCount) return o.photons == 0;
  return o.kind != OutcomeKind::Vacuum && o.kind != OutcomeKind::Bucket;
}

double vacuum_part(const OutcomeOp& o) {
  if (o.kind == OutcomeKind::Vacuum) return 1.0;
  if (o.kind == OutcomeKind::Fundamental && (o.photons == -1 || o.photons == 0)) return 1.0;
  return 0.0;
}

// ⟨f_i|E|f_j⟩ for the base (undressed) single-photon operator of an outcome.
Eigen::MatrixXcd base_operator_form(const DerivativeBasis& basis, const OutcomeOp& o,
                                    const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& b_f) {
  const Grid& grid = basis.grid();
  const Eigen::VectorXd& w = grid.weights;
  switch (o.kind) {
    case OutcomeKind::Mode: {
      const Eigen::VectorXcd amp = o.coeffs.adjoint() * b_f;  // ⟨v, f_i⟩
      return amp.conjugate() * amp.transpose();
    }
    case OutcomeKind::Fundamental: {
      const Eigen::VectorXcd amp = b_f.row(0).transpose();
      return amp.conjugate() * amp.transpose();
    }
    case OutcomeKind::Parity: {
      const Eigen::MatrixXcd pf = reflect(grid, f);
      Eigen::MatrixXcd g = 0.5 * f.adjoint() * w.asDiagonal() * (f + double(o.parity_x) * pf);
      if (o.without_fundamental) {
        const Eigen::VectorXcd amp = b_f.row(0).transpose();
        g -= amp.conjugate() * amp.transpose();
      }
      return g;
    }
    case OutcomeKind::Pixel: {
      const Eigen::VectorXd pw = pixel_weights(grid, o.lo, o.hi);
      return f.adjoint() * pw.asDiagonal() * f;
    }
    default:
      return Eigen::MatrixXcd::Zero(f.cols(), f.cols());
  }
}

void check_frame(const Scene& scene, const Povm& povm, double sigma) {
  if (povm.reference_frame) return;
  if (std::abs(scene.centroid_x() - povm.frame) > 1e-9 * sigma ||
      (povm.dimension == 2 && std::abs(scene.centroid_y() - povm.frame_y) > 1e-9 * sigma))
    throw Error(ErrorCode::CentroidFrameMismatch,
                fmt::format("scene centroid {} differs from POVM frame {}", scene.centroid_x(), povm.frame));
}

}  // namespace rayleigh::detail

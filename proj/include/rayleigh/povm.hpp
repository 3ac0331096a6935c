#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rayleigh/basis.hpp"

namespace rayleigh {

enum class OutcomeKind {
  Vacuum,       // nothing detected
  Mode,         // one photon in Σ a_m b_m
  Parity,       // one photon in a parity sector of the grid
  Pixel,        // one photon inside a position cell
  Fundamental,  // every photon in b_0, vacuum included
  Bucket,       // whatever the listed outcomes leave out
};

enum class Dressing { None, Summed, PerCount };

/// One measurement outcome.
///
/// Mode coefficients run over the 1D modes b_0..b_lmax, or over the
/// flattened 2D modes b_{kl}. A dressed outcome additionally detects k
/// photons in the fundamental mode, either a fixed k (`photons`) or any k.
/// For Fundamental outcomes `photons` is the total count, or -1 for any count.
struct OutcomeOp {
  OutcomeKind kind = OutcomeKind::Bucket;
  Eigen::VectorXcd coeffs;
  int parity_x = 0;  // +1 even, -1 odd, 0 unresolved
  int parity_y = 0;
  bool without_fundamental = false;  // sector minus its b_0 component
  double lo = 0.0;
  double hi = 0.0;
  Dressing dressing = Dressing::None;
  int photons = 0;
  std::string label;
};

/// A finite catalog of outcomes, expressed about a reference frame.
///
/// The basis and grids are centred on the origin; `frame` is the object-plane
/// point the origin stands for. `reference_frame` marks POVMs meant to be
/// used off-centroid, which disables the centroid consistency check.
struct Povm {
  std::string label;
  int dimension = 1;
  double frame = 0.0;
  double frame_y = 0.0;
  bool reference_frame = false;
  std::vector<OutcomeOp> outcomes;

  Eigen::Index size() const { return Eigen::Index(outcomes.size()); }
  bool dressed() const;
  bool has_bucket() const { return !outcomes.empty() && outcomes.back().kind == OutcomeKind::Bucket; }
  std::vector<std::string> labels() const;
};

/// Projectors onto b_0..b_lmax plus the bucket.
Povm spade_povm(const DerivativeBasis& basis);

enum class PairParity { Even, Odd };

/// (b_l ± b_{l+1})/√2 for l of the given parity plus the bucket.
Povm interleaved_povm(const DerivativeBasis& basis, PairParity parity);

/// Parity sectors: two in 1D, four in 2D.
Povm sliver_povm(const Grid& grid, int dimension = 1);

/// Position cells of the given width, one centred on the origin.
Povm direct_imaging_povm(const Grid& grid, double pixel_width);

/// Photon-number dressing of mode or parity outcomes.
///
/// `kcut` is the number of resolved dressing counts in per-count mode; the
/// fundamental outcome is resolved into counts 0..kcut alongside.
Povm dressed_povm(const Povm& base, const DerivativeBasis& basis, Dressing mode, int kcut = 0);

enum class Family2D { B0, B1, B2, B3, B4, B5, B6 };

/// Rows of the 2D measurement table up to total degree `max_degree`.
Povm table2d_povm(const Basis2D& basis, Family2D family, int max_degree);

/// Same POVM with its centre moved to `frame`.
Povm with_frame(Povm povm, double frame, bool reference = true);

/// Unit 2-vector pair (b_l ± b_{l+1})/√2 as mode coefficients of length lmax + 1.
Eigen::VectorXcd pair_coeffs(int lmax, int l, double sign);

}  // namespace rayleigh

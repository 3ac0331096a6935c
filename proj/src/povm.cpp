#include "rayleigh/povm.hpp"

#include <cmath>

#include <fmt/format.h>

namespace rayleigh {

namespace {

OutcomeOp vacuum() {
  OutcomeOp o;
  o.kind = OutcomeKind::Vacuum;
  o.label = "vac";
  return o;
}

OutcomeOp bucket() {
  OutcomeOp o;
  o.kind = OutcomeKind::Bucket;
  o.label = "bucket";
  return o;
}

OutcomeOp mode(Eigen::VectorXcd coeffs, std::string label) {
  OutcomeOp o;
  o.kind = OutcomeKind::Mode;
  o.coeffs = std::move(coeffs);
  o.label = std::move(label);
  return o;
}

}  // namespace

bool Povm::dressed() const {
  for (const auto& o : outcomes)
    if (o.dressing != Dressing::None || o.kind == OutcomeKind::Fundamental) return true;
  return false;
}

std::vector<std::string> Povm::labels() const {
  std::vector<std::string> out;
  out.reserve(outcomes.size());
  for (const auto& o : outcomes) out.push_back(o.label);
  return out;
}

Eigen::VectorXcd pair_coeffs(int lmax, int l, double sign) {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(lmax + 1);
  a(l) = 1.0 / std::sqrt(2.0);
  a(l + 1) = sign / std::sqrt(2.0);
  return a;
}

Povm spade_povm(const DerivativeBasis& basis) {
  Povm p;
  p.label = "spade";
  p.outcomes.push_back(vacuum());
  for (int l = 0; l <= basis.lmax; ++l)
    p.outcomes.push_back(mode(Eigen::VectorXcd::Unit(basis.lmax + 1, l), fmt::format("b{}", l)));
  p.outcomes.push_back(bucket());
  return p;
}

Povm interleaved_povm(const DerivativeBasis& basis, PairParity parity) {
  if (basis.lmax < 1) throw Error(ErrorCode::InvalidArgument, "interleaved pairs need lmax >= 1");
  Povm p;
  p.label = parity == PairParity::Even ? "interleaved-even" : "interleaved-odd";
  p.outcomes.push_back(vacuum());
  for (int l = parity == PairParity::Even ? 0 : 1; l + 1 <= basis.lmax; l += 2) {
    p.outcomes.push_back(mode(pair_coeffs(basis.lmax, l, 1.0), fmt::format("b{}+b{}", l, l + 1)));
    p.outcomes.push_back(mode(pair_coeffs(basis.lmax, l, -1.0), fmt::format("b{}-b{}", l, l + 1)));
  }
  p.outcomes.push_back(bucket());
  return p;
}

Povm sliver_povm(const Grid& grid, int dimension) {
  if (!grid.symmetric(1e-9))
    throw Error(ErrorCode::AsymmetricGrid, "parity sorting needs a grid symmetric about the centre");
  Povm p;
  p.label = "sliver";
  p.dimension = dimension;
  p.outcomes.push_back(vacuum());
  if (dimension == 1) {
    for (int s : {-1, 1}) {
      OutcomeOp o;
      o.kind = OutcomeKind::Parity;
      o.parity_x = s;
      o.label = s < 0 ? "odd" : "even";
      p.outcomes.push_back(o);
    }
  } else if (dimension == 2) {
    for (int sx : {-1, 1})
      for (int sy : {-1, 1}) {
        OutcomeOp o;
        o.kind = OutcomeKind::Parity;
        o.parity_x = sx;
        o.parity_y = sy;
        o.label = fmt::format("{}{}", sx < 0 ? "odd" : "even", sy < 0 ? "-odd" : "-even");
        p.outcomes.push_back(o);
      }
  } else {
    throw Error(ErrorCode::InvalidArgument, "dimension must be 1 or 2");
  }
  return p;
}

Povm direct_imaging_povm(const Grid& grid, double pixel_width) {
  if (!(pixel_width >= grid.spacing() * (1 - 1e-12)))
    throw Error(ErrorCode::PixelTooSmall,
                fmt::format("pixel width {} is below the grid spacing {}", pixel_width, grid.spacing()));
  Povm p;
  p.label = fmt::format("direct:{}", pixel_width);
  p.outcomes.push_back(vacuum());
  const long cmin = long(std::floor(grid.lo() / pixel_width + 0.5));
  const long cmax = long(std::floor(grid.hi() / pixel_width + 0.5));
  for (long c = cmin; c <= cmax; ++c) {
    OutcomeOp o;
    o.kind = OutcomeKind::Pixel;
    o.lo = (double(c) - 0.5) * pixel_width;
    o.hi = (double(c) + 0.5) * pixel_width;
    o.label = fmt::format("pix{}", c);
    p.outcomes.push_back(o);
  }
  return p;
}

Povm dressed_povm(const Povm& base, const DerivativeBasis& basis, Dressing mode, int kcut) {
  if (base.dimension != 1) throw Error(ErrorCode::UnsupportedBase, "dressing is implemented in 1D");
  if (mode == Dressing::None) throw Error(ErrorCode::InvalidArgument, "dressing mode is None");
  if (mode == Dressing::PerCount && kcut < 1)
    throw Error(ErrorCode::InvalidArgument, "per-count dressing needs kcut >= 1");

  std::vector<OutcomeOp> dressable;
  for (const auto& o : base.outcomes) {
    switch (o.kind) {
      case OutcomeKind::Vacuum:
      case OutcomeKind::Bucket:
        break;
      case OutcomeKind::Mode: {
        const double a0 = std::abs(o.coeffs(0));
        if (std::abs(a0 - 1.0) < 1e-12) break;  // b_0 itself becomes the fundamental outcome
        if (a0 > 1e-12)
          throw Error(ErrorCode::UnsupportedBase,
                      "outcome " + o.label + " mixes the fundamental mode with others");
        dressable.push_back(o);
        break;
      }
      case OutcomeKind::Parity: {
        if (o.dressing != Dressing::None || o.parity_y != 0 || !basis.psf.is_even())
          throw Error(ErrorCode::UnsupportedBase, "parity dressing needs a 1D even PSF");
        OutcomeOp d = o;
        d.without_fundamental = o.parity_x > 0;
        dressable.push_back(d);
        break;
      }
      default:
        throw Error(ErrorCode::UnsupportedBase, "outcome " + o.label + " cannot be dressed");
    }
  }

  Povm p;
  p.label = fmt::format("dressed-{}:{}", mode == Dressing::Summed ? "summed" : "count", base.label);
  p.frame = base.frame;
  p.reference_frame = base.reference_frame;
  if (mode == Dressing::Summed) {
    OutcomeOp f;
    f.kind = OutcomeKind::Fundamental;
    f.photons = -1;
    f.label = "fund";
    p.outcomes.push_back(f);
    for (auto d : dressable) {
      d.dressing = Dressing::Summed;
      d.label += "+k";
      p.outcomes.push_back(d);
    }
  } else {
    for (int n = 0; n <= kcut; ++n) {
      OutcomeOp f;
      f.kind = OutcomeKind::Fundamental;
      f.photons = n;
      f.label = fmt::format("fund{}", n);
      p.outcomes.push_back(f);
    }
    for (const auto& base_op : dressable)
      for (int k = 0; k <= kcut; ++k) {
        OutcomeOp d = base_op;
        d.dressing = Dressing::PerCount;
        d.photons = k;
        d.label = fmt::format("{}+k{}", base_op.label, k);
        p.outcomes.push_back(d);
      }
  }
  p.outcomes.push_back(bucket());
  return p;
}

Povm table2d_povm(const Basis2D& basis, Family2D family, int max_degree) {
  const int lx = basis.lx(), ly = basis.ly();
  Povm p;
  p.dimension = 2;
  p.label = fmt::format("b{}w", int(family));
  p.outcomes.push_back(vacuum());
  auto fits = [&](int k, int l) { return k >= 0 && l >= 0 && k <= lx && l <= ly; };
  auto single = [&](int k, int l) {
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(basis.size());
    a(basis.index(k, l)) = 1.0;
    p.outcomes.push_back(mode(a, fmt::format("b{}{}", k, l)));
  };
  auto pair = [&](int k1, int l1, int k2, int l2) {
    if (!fits(k1, l1) || !fits(k2, l2)) return;
    for (double s : {1.0, -1.0}) {
      Eigen::VectorXcd a = Eigen::VectorXcd::Zero(basis.size());
      a(basis.index(k1, l1)) = 1.0 / std::sqrt(2.0);
      a(basis.index(k2, l2)) = s / std::sqrt(2.0);
      p.outcomes.push_back(
          mode(a, fmt::format("b{}{}{}b{}{}", k1, l1, s > 0 ? "+" : "-", k2, l2)));
    }
  };
  for (int K = 0; K <= max_degree; ++K)
    for (int L = 0; L <= K; ++L) {
      const bool even = L % 2 == 0;
      switch (family) {
        case Family2D::B0:
          if (fits(L, K - L)) single(L, K - L);
          break;
        case Family2D::B1:
        case Family2D::B2:
          if (L <= K - 1 && even == (family == Family2D::B1)) pair(L, K - L, L + 1, K - L - 1);
          break;
        case Family2D::B3:
        case Family2D::B4:
          if (even == (family == Family2D::B3)) pair(L, K - L, L + 1, K - L);
          break;
        case Family2D::B5:
        case Family2D::B6:
          if (even == (family == Family2D::B5)) pair(K - L, L, K - L, L + 1);
          break;
      }
    }
  p.outcomes.push_back(bucket());
  return p;
}

Povm with_frame(Povm povm, double frame, bool reference) {
  povm.frame = frame;
  povm.reference_frame = reference;
  return povm;
}

}  // namespace rayleigh

#pragma once

// Outcome operator helpers shared by the probability code paths.

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "rayleigh/basis.hpp"
#include "rayleigh/povm.hpp"
#include "rayleigh/scene.hpp"

namespace rayleigh::detail {

Eigen::VectorXd pixel_weights(const Grid& grid, double lo, double hi);
Eigen::MatrixXcd reflect(const Grid& grid, const Eigen::MatrixXcd& f);
bool mode_like(const OutcomeOp& o);
bool has_single_photon_part(const OutcomeOp& o);
double vacuum_part(const OutcomeOp& o);

/// ⟨f_i|E|f_j⟩ for the undressed single-photon operator of `o`; `b_f` holds ⟨b_m, f_i⟩.
Eigen::MatrixXcd base_operator_form(const DerivativeBasis& basis, const OutcomeOp& o,
                                    const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& b_f);

void check_frame(const Scene& scene, const Povm& povm, double sigma);

/// Independent stream for block `block` of a run seeded with `seed`.
inline std::mt19937_64 block_stream(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(block),
                    std::uint32_t(block >> 32), 0x5eedu};
  return std::mt19937_64(seq);
}

/// Neumaier compensated sum.
struct Neumaier {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) c += (sum - t) + x;
    else c += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

}  // namespace rayleigh::detail

#pragma once

#include <span>
#include <vector>

#include "tunneltime/constants.hpp"

namespace tunnel {

/// What to do when the spectral support reaches the barrier top.
enum class OverBarrierPolicy {
  Exclude,  // clip the support below k_c
  Error,    // refuse with OverBarrierComponent
};

/// Gaussian spectral weight G(k - k_bar) = C exp[-(k - k_bar)^2 / (2 dk)^2],
/// centred at x0 = 0, t0 = 0 (G real).
struct PacketSpec {
  double k_bar = 0.0;  // 1/A
  double dk = 0.0;     // 1/A
  double x0 = 0.0;
  double t0 = 0.0;
  OverBarrierPolicy over_barrier = OverBarrierPolicy::Exclude;

  static PacketSpec from_energy(double mean_energy_ev, double dk,
                                OverBarrierPolicy policy = OverBarrierPolicy::Exclude);

  /// Throws DomainError unless k_bar > 0 and dk > 0.
  void validate() const;

  double mean_energy() const { return energy_of(k_bar); }
  double mean_velocity() const { return group_velocity(k_bar); }
};

/// Quadrature over the (truncated) spectral support.
struct KGrid {
  std::vector<double> nodes;    // strictly increasing, 1/A
  std::vector<double> weights;  // positive, 1/A
  double c_norm = 0.0;          // normalisation constant C of G
  double k_lo = 0.0;
  double k_hi = 0.0;
  std::size_t panels = 0;
  /// Fraction of the untruncated |G|^2 mass lying outside [k_lo, k_hi].
  double excluded_mass = 0.0;

  std::size_t size() const { return nodes.size(); }
};

/// Half-width of the k support: five standard deviations of G itself.
/// |G|^2 has standard deviation dk, so G has sqrt(2) dk.
inline double support_half_width(double dk) { return 5.0 * std::numbers::sqrt2 * dk; }

double gaussian_weight(double k, const PacketSpec& packet, double c_norm);

/// C for the untruncated Gaussian: (2 pi)^{-3/4} dk^{-1/2}.
double analytic_normalization(double dk);

/// C such that 2 pi * sum_j w_j |G(k_j)|^2 = 1 on the given nodes, i.e. the
/// truncated incident packet has unit norm. Throws DomainError on an empty grid.
double normalization(std::span<const double> nodes, std::span<const double> weights, const PacketSpec& packet);

}  // namespace tunnel

#include "tunneltime/packet.hpp"

#include <cmath>
#include <string>

#include "tunneltime/errors.hpp"

namespace tunnel {

PacketSpec PacketSpec::from_energy(double mean_energy_ev, double dk, OverBarrierPolicy policy) {
  if (!(mean_energy_ev > 0.0)) throw DomainError("mean energy must be positive");
  PacketSpec p;
  p.k_bar = wavenumber_of(mean_energy_ev);
  p.dk = dk;
  p.over_barrier = policy;
  p.validate();
  return p;
}

void PacketSpec::validate() const {
  if (!(k_bar > 0.0) || !std::isfinite(k_bar)) throw DomainError("k_bar must be positive, got " + std::to_string(k_bar));
  if (!(dk > 0.0) || !std::isfinite(dk)) throw DomainError("dk must be positive, got " + std::to_string(dk));
}

double gaussian_weight(double k, const PacketSpec& packet, double c_norm) {
  const double u = (k - packet.k_bar) / (2.0 * packet.dk);
  return c_norm * std::exp(-u * u);
}

double analytic_normalization(double dk) { return std::pow(kTwoPi, -0.75) / std::sqrt(dk); }

double normalization(std::span<const double> nodes, std::span<const double> weights, const PacketSpec& packet) {
  if (nodes.empty() || nodes.size() != weights.size()) throw DomainError("normalization needs a non-empty grid");
  double mass = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double g = gaussian_weight(nodes[j], packet, 1.0);
    mass += weights[j] * g * g;
  }
  if (!(mass > 0.0)) throw DomainError("spectral mass vanishes on the grid");
  return 1.0 / std::sqrt(kTwoPi * mass);
}

}  // namespace tunnel

#pragma once

#include <span>
#include <vector>

#include "tunneltime/packet.hpp"
#include "tunneltime/quadrature.hpp"
#include "tunneltime/scatter.hpp"

namespace tunnel {

/// Which part of each stationary state enters the packet sum.
enum class Component {
  Full,      // complete scattering state
  Incident,  // e^{ikx} alone, extended over all x (r := 0)
};

struct FieldSample {
  Complex psi;
  Complex dpsi_dx;
  Complex dpsi_dt;    // analytic: sum of (-i E/hbar) * integrand
  Complex d2psi_dx2;  // analytic, from the stationary equation per region

  double density() const { return std::norm(psi); }
  /// J = Re[(i hbar/m) psi dpsi*/dx] = (hbar/m) Im[psi* dpsi/dx].
  double flux() const { return hbar_over_m() * (std::conj(psi) * dpsi_dx).imag(); }
  double density_rate() const { return 2.0 * (std::conj(psi) * dpsi_dt).real(); }
  double flux_gradient() const {
    // Im|dpsi/dx|^2 vanishes, leaving the curvature term.
    return hbar_over_m() * (std::conj(psi) * d2psi_dx2).imag();
  }
};

/// Gaussian packet synthesised as a k-quadrature over stationary scattering
/// states: Psi(x,t) = sum_j w_j G(k_j) psi_{k_j}(x) e^{-i E_j t / hbar}.
/// Immutable after construction; all evaluations are const and thread-safe.
class WavePacket {
 public:
  WavePacket(const BarrierSpec& barrier, const PacketSpec& packet, KGrid grid);

  const BarrierSpec& barrier() const { return barrier_; }
  const PacketSpec& packet() const { return packet_; }
  const KGrid& grid() const { return grid_; }
  const std::vector<ScatteringAmplitudes>& amplitudes() const { return amps_; }

  FieldSample evaluate(double x, double t, Component component = Component::Full) const;
  double density(double x, double t) const { return evaluate(x, t).density(); }
  double flux(double x, double t, Component component = Component::Full) const {
    return evaluate(x, t, component).flux();
  }

  /// J(x, t_i) on the time grid for each position; result[ix][i].
  std::vector<std::vector<double>> flux_series(std::span<const double> xs, const TimeGrid& times,
                                               Component component = Component::Full) const;

  /// sum_m wx_m rho(x_m, t_i) for each time node: a spatial quadrature of
  /// the density, evaluated along the time grid.
  std::vector<double> density_integral(std::span<const double> xs, std::span<const double> wx,
                                       const TimeGrid& times) const;

  /// 2 pi sum_j w_j |G_j|^2: the incident norm actually summed (1 by construction).
  double spectral_norm() const;
  /// 2 pi sum_j w_j |G_j|^2 |t_j|^2.
  double transmission_probability() const;

 private:
  template <class Sink>
  void sweep(std::span<const double> xs, const TimeGrid& times, Component component, bool need_gradient,
             Sink&& sink) const;

  BarrierSpec barrier_;
  PacketSpec packet_;
  KGrid grid_;
  std::vector<ScatteringAmplitudes> amps_;
  std::vector<double> coeff_;  // w_j G(k_j)
  std::vector<double> omega_;  // E_j / hbar
};

}  // namespace tunnel

#pragma once

#include <cmath>
#include <numbers>

namespace tunnel {

// Units throughout: energies in eV, lengths in Angstrom, times in seconds.
struct PhysicalConstants {
  double hbar = 6.582119569e-16;      // eV s
  double hbar2_over_2m = 3.8099821;   // eV A^2, electron
};

inline constexpr PhysicalConstants kElectron{};

inline constexpr double energy_of(double k) { return kElectron.hbar2_over_2m * k * k; }

inline double wavenumber_of(double energy) { return std::sqrt(energy / kElectron.hbar2_over_2m); }

/// hbar/m in A^2/s.
inline constexpr double hbar_over_m() { return 2.0 * kElectron.hbar2_over_2m / kElectron.hbar; }

/// Group velocity hbar k / m in A/s.
inline constexpr double group_velocity(double k) { return hbar_over_m() * k; }

/// Angular frequency E/hbar in 1/s.
inline constexpr double angular_frequency(double k) { return energy_of(k) / kElectron.hbar; }

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace tunnel

#pragma once

// Reference formulas typed out independently of the library.

#include <cmath>
#include <complex>
#include <numbers>

namespace oracle {

inline constexpr double kHbar = 6.582119569e-16;  // eV s
inline constexpr double kC = 3.8099821;           // hbar^2 / 2m, eV A^2

inline double k_of(double e) { return std::sqrt(e / kC); }
inline double velocity(double k) { return 2.0 * kC * k / kHbar; }

/// [1 + V0^2 sinh^2(kappa a) / (4 E (V0 - E))]^-1
inline double transmission(double e, double v0, double a) {
  const double kappa = std::sqrt((v0 - e) / kC);
  const double s = std::sinh(kappa * a);
  return 1.0 / (1.0 + v0 * v0 * s * s / (4.0 * e * (v0 - e)));
}

/// E -> V0 limit of the above: [1 + V0 a^2 / (4 C)]^-1
inline double transmission_at_top(double v0, double a) { return 1.0 / (1.0 + v0 * a * a / (4.0 * kC)); }

inline double gaussian_norm(double dk) {
  return std::pow(2.0 * std::numbers::pi, -0.75) / std::sqrt(dk);
}

/// 2m / (hbar k kappa): opaque-barrier phase time.
inline double opaque_phase_time(double e, double v0) {
  const double k = k_of(e), kappa = std::sqrt((v0 - e) / kC);
  return 2.0 / (2.0 * kC / kHbar * k * kappa);
}

}  // namespace oracle

#pragma once

#include <complex>

#include "tunneltime/constants.hpp"

namespace tunnel {

using Complex = std::complex<double>;

/// Rectangular barrier V(x) = v0 on (0, a), zero elsewhere.
/// Region I is x < 0, region II is 0 < x < a, region III is x > a.
/// A width of zero means "no barrier": every component is fully transmitted.
struct BarrierSpec {
  double v0 = 0.0;  // eV
  double a = 0.0;   // A

  /// Throws DomainError unless v0 > 0 and a >= 0.
  void validate() const;

  /// Highest sub-barrier wavenumber, sqrt(v0 / (hbar^2/2m)).
  double critical_wavenumber() const;

  double potential(double x) const { return (x > 0.0 && x < a) ? v0 : 0.0; }
};

/// Coefficients of the stationary state
///   psi(x) = e^{ikx} + r e^{-ikx}            x < 0
///          = alpha e^{-kappa x} + beta e^{kappa x}   0 < x < a
///          = t e^{ikx}                      x > a
struct ScatteringAmplitudes {
  double k = 0.0;
  double kappa = 0.0;
  double width = 0.0;
  Complex r;
  Complex alpha;
  Complex beta;
  Complex t;
};

struct StationaryField {
  Complex psi;
  Complex dpsi;   // d psi / dx
  Complex d2psi;  // d^2 psi / dx^2, from the Schroedinger equation
};

/// Decay constant inside the barrier. Throws OverBarrierComponent when E(k) >= v0.
double inside_wavenumber(double k, const BarrierSpec& barrier);

/// Solves the value/derivative matching conditions at x = 0 and x = a.
/// Throws DomainError for k <= 0 and OverBarrierComponent when E(k) >= v0.
ScatteringAmplitudes scattering_amplitudes(double k, const BarrierSpec& barrier);

/// Piecewise evaluation of the stationary state. At the interfaces the
/// region-II expression is used; matching makes the choice immaterial.
StationaryField stationary_field(double x, const ScatteringAmplitudes& amps);

/// Textbook closed form of the transmission amplitude t(k), valid for any
/// E != v0 (complex kappa above the barrier). Used for the phase time and
/// as an oracle for the matching solver.
Complex transmission_closed_form(double k, const BarrierSpec& barrier);

/// |t|^2 = [1 + v0^2 sinh^2(kappa a) / (4 E (v0 - E))]^{-1}, E < v0.
double transmission_probability_closed_form(double k, const BarrierSpec& barrier);

}  // namespace tunnel

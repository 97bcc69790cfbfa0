#include "tunneltime/scatter.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "tunneltime/errors.hpp"

namespace tunnel {

void BarrierSpec::validate() const {
  if (!(v0 > 0.0) || !std::isfinite(v0)) throw DomainError("barrier height must be positive, got " + std::to_string(v0));
  if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("barrier width must be non-negative, got " + std::to_string(a));
}

double BarrierSpec::critical_wavenumber() const { return wavenumber_of(v0); }

double inside_wavenumber(double k, const BarrierSpec& barrier) {
  const double e = energy_of(k);
  if (e >= barrier.v0) {
    throw OverBarrierComponent("component with E = " + std::to_string(e) + " eV is not below V0 = " +
                               std::to_string(barrier.v0) + " eV");
  }
  return std::sqrt((barrier.v0 - e) / kElectron.hbar2_over_2m);
}

ScatteringAmplitudes scattering_amplitudes(double k, const BarrierSpec& barrier) {
  barrier.validate();
  if (!(k > 0.0)) throw DomainError("wavenumber must be positive");
  const double kappa = inside_wavenumber(k, barrier);
  const double a = barrier.a;
  const Complex ik(0.0, k);

  // Unknowns: r, alpha, b = beta e^{kappa a}, s = t e^{ika}.
  // The scaled pair keeps every matrix entry O(1) for opaque barriers.
  const double decay = std::exp(-kappa * a);
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  Eigen::Vector4cd rhs = Eigen::Vector4cd::Zero();

  // psi(0): 1 + r = alpha + b e^{-kappa a}
  m(0, 0) = -1.0;
  m(0, 1) = 1.0;
  m(0, 2) = decay;
  rhs(0) = 1.0;
  // psi'(0): ik (1 - r) = -kappa alpha + kappa b e^{-kappa a}
  m(1, 0) = ik;
  m(1, 1) = -kappa;
  m(1, 2) = kappa * decay;
  rhs(1) = ik;
  // psi(a): alpha e^{-kappa a} + b = s
  m(2, 1) = decay;
  m(2, 2) = 1.0;
  m(2, 3) = -1.0;
  // psi'(a): -kappa alpha e^{-kappa a} + kappa b = ik s
  m(3, 1) = -kappa * decay;
  m(3, 2) = kappa;
  m(3, 3) = -ik;

  const Eigen::Vector4cd sol = m.partialPivLu().solve(rhs);

  ScatteringAmplitudes amps;
  amps.k = k;
  amps.kappa = kappa;
  amps.width = a;
  amps.r = sol(0);
  amps.alpha = sol(1);
  amps.beta = sol(2) * decay;
  amps.t = sol(3) * std::polar(1.0, -k * a);
  return amps;
}

StationaryField stationary_field(double x, const ScatteringAmplitudes& amps) {
  const double k = amps.k;
  const Complex ik(0.0, k);
  StationaryField f;
  if (x < 0.0) {
    const Complex fwd = std::polar(1.0, k * x);
    const Complex bwd = amps.r * std::conj(fwd);
    f.psi = fwd + bwd;
    f.dpsi = ik * (fwd - bwd);
    f.d2psi = -k * k * f.psi;
  } else if (x <= amps.width) {
    const double kappa = amps.kappa;
    const Complex down = amps.alpha * std::exp(-kappa * x);
    const Complex up = amps.beta * std::exp(kappa * x);
    f.psi = down + up;
    f.dpsi = kappa * (up - down);
    f.d2psi = kappa * kappa * f.psi;
  } else {
    f.psi = amps.t * std::polar(1.0, k * x);
    f.dpsi = ik * f.psi;
    f.d2psi = -k * k * f.psi;
  }
  return f;
}

Complex transmission_closed_form(double k, const BarrierSpec& barrier) {
  if (!(k > 0.0)) throw DomainError("wavenumber must be positive");
  const double e = energy_of(k);
  const double a = barrier.a;
  // kappa^2 = (v0 - E)/(hbar^2/2m); complex above the barrier.
  const Complex kappa = std::sqrt(Complex((barrier.v0 - e) / kElectron.hbar2_over_2m, 0.0));
  if (std::abs(kappa) == 0.0) throw DomainError("closed form undefined at E = V0");
  const Complex ka = kappa * a;
  const Complex denom =
      std::cosh(ka) + Complex(0.0, 1.0) * (kappa * kappa - k * k) / (2.0 * k * kappa) * std::sinh(ka);
  return std::polar(1.0, -k * a) / denom;
}

double transmission_probability_closed_form(double k, const BarrierSpec& barrier) {
  const double e = energy_of(k);
  const double kappa = inside_wavenumber(k, barrier);
  const double s = std::sinh(kappa * barrier.a);
  return 1.0 / (1.0 + barrier.v0 * barrier.v0 * s * s / (4.0 * e * (barrier.v0 - e)));
}

}  // namespace tunnel

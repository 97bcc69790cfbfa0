#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tunneltime/errors.hpp"
#include "tunneltime/scatter.hpp"

using namespace tunnel;

TEST_CASE("inside wavenumber") {
  const BarrierSpec b{10.0, 5.0};
  SUBCASE("half height gives kappa = k") {
    const double k = 1.14558;
    CHECK(inside_wavenumber(k, b) == doctest::Approx(std::sqrt((10.0 - oracle::kC * k * k) / oracle::kC)).epsilon(1e-14));
    CHECK(inside_wavenumber(k, b) == doctest::Approx(1.14558).epsilon(1e-4));
  }
  SUBCASE("bottom of the well") { CHECK(inside_wavenumber(1e-9, b) == doctest::Approx(1.6201).epsilon(1e-4)); }
  SUBCASE("just below the top") {
    const double k = oracle::k_of(10.0 * (1.0 - 1e-10));
    const double kappa = inside_wavenumber(k, b);
    CHECK(kappa > 0.0);
    CHECK(kappa < 1e-4);
  }
  SUBCASE("at or above the top") {
    CHECK_THROWS_AS(inside_wavenumber(oracle::k_of(10.0) * (1.0 + 1e-12), b), OverBarrierComponent);
    CHECK_THROWS_AS(inside_wavenumber(oracle::k_of(12.0), b), OverBarrierComponent);
  }
}

TEST_CASE("transmission probability against the sinh^2 formula") {
  const BarrierSpec b{10.0, 5.0};
  const auto amps = scattering_amplitudes(oracle::k_of(5.0), b);
  CHECK(std::norm(amps.t) == doctest::Approx(4.24e-5).epsilon(5e-3));
  CHECK(std::norm(amps.t) == doctest::Approx(oracle::transmission(5.0, 10.0, 5.0)).epsilon(1e-12));

  for (double e : {0.5, 1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5, 8.5, 9.5}) {
    for (double a : {1.0, 2.5, 5.0, 7.5, 10.0}) {
      const double solved = std::norm(scattering_amplitudes(oracle::k_of(e), {10.0, a}).t);
      CHECK(solved == doctest::Approx(oracle::transmission(e, 10.0, a)).epsilon(1e-12));
      CHECK(transmission_probability_closed_form(oracle::k_of(e), {10.0, a}) ==
            doctest::Approx(oracle::transmission(e, 10.0, a)).epsilon(1e-12));
    }
  }
}

TEST_CASE("no barrier") {
  const auto amps = scattering_amplitudes(1.2, {10.0, 0.0});
  CHECK(std::abs(amps.t - Complex(1.0, 0.0)) < 1e-14);
  CHECK(std::abs(amps.r) < 1e-14);
  for (double x : {-7.0, 0.0, 3.3}) {
    const auto f = stationary_field(x, amps);
    CHECK(std::abs(f.psi - std::exp(Complex(0.0, 1.2 * x))) < 1e-13);
  }
}

TEST_CASE("top-of-barrier limit follows the kappa -> 0 series") {
  for (double a : {1.0, 3.0, 5.0}) {
    const double k = oracle::k_of(10.0 * (1.0 - 1e-9));
    const double solved = std::norm(scattering_amplitudes(k, {10.0, a}).t);
    CHECK(solved == doctest::Approx(oracle::transmission_at_top(10.0, a)).epsilon(1e-6));
  }
}

TEST_CASE("unitarity on random sub-barrier samples") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> v0(0.5, 20.0), a(0.1, 15.0), frac(1e-3, 1.0 - 1e-3);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const BarrierSpec b{v0(rng), a(rng)};
    const auto amps = scattering_amplitudes(oracle::k_of(frac(rng) * b.v0), b);
    worst = std::max(worst, std::abs(std::norm(amps.r) + std::norm(amps.t) - 1.0));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("matching at the barrier edges") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> a(0.5, 10.0), frac(0.05, 0.95);
  for (int i = 0; i < 200; ++i) {
    const BarrierSpec b{10.0, a(rng)};
    const double k = oracle::k_of(frac(rng) * b.v0);
    const auto amps = scattering_amplitudes(k, b);
    const double kappa = amps.kappa;
    // Region formulas written out here, evaluated on both sides of each edge.
    auto region1 = [&](double x) { return std::exp(Complex(0, k * x)) + amps.r * std::exp(Complex(0, -k * x)); };
    auto region1d = [&](double x) {
      return Complex(0, k) * (std::exp(Complex(0, k * x)) - amps.r * std::exp(Complex(0, -k * x)));
    };
    auto region2 = [&](double x) { return amps.alpha * std::exp(-kappa * x) + amps.beta * std::exp(kappa * x); };
    auto region2d = [&](double x) {
      return kappa * (-amps.alpha * std::exp(-kappa * x) + amps.beta * std::exp(kappa * x));
    };
    auto region3 = [&](double x) { return amps.t * std::exp(Complex(0, k * x)); };
    auto region3d = [&](double x) { return Complex(0, k) * amps.t * std::exp(Complex(0, k * x)); };

    auto rel = [](Complex u, Complex v) { return std::abs(u - v) / std::max(std::abs(u), std::abs(v)); };
    CHECK(rel(region1(0.0), region2(0.0)) < 1e-10);
    CHECK(rel(region1d(0.0), region2d(0.0)) < 1e-10);
    CHECK(rel(region2(b.a), region3(b.a)) < 1e-10);
    CHECK(rel(region2d(b.a), region3d(b.a)) < 1e-10);

    const auto left = stationary_field(-1e-300, amps), right = stationary_field(0.0, amps);
    CHECK(rel(left.psi, right.psi) < 1e-10);
    CHECK(rel(left.dpsi, right.dpsi) < 1e-10);
    const auto in = stationary_field(b.a, amps), out = stationary_field(std::nextafter(b.a, 1e9), amps);
    CHECK(rel(in.psi, out.psi) < 1e-10);
    CHECK(rel(in.dpsi, out.dpsi) < 1e-10);
  }
}

TEST_CASE("stationary flux is the same in every region") {
  for (double a : {0.5, 1.5, 3.0}) {
    for (double e : {1.0, 5.0, 9.0}) {
      const double k = oracle::k_of(e);
      const auto amps = scattering_amplitudes(k, {10.0, a});
      const double reference = oracle::velocity(k) * std::norm(amps.t);
      for (double x : {-4.0, 0.25 * a, 0.8 * a, a + 3.0, a + 50.0}) {
        const auto f = stationary_field(x, amps);
        const double j = 2.0 * oracle::kC / oracle::kHbar * (std::conj(f.psi) * f.dpsi).imag();
        CHECK(j == doctest::Approx(reference).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("far side has constant modulus |t|") {
  const auto amps = scattering_amplitudes(oracle::k_of(4.0), {10.0, 3.0});
  for (double x : {4.0, 40.0, 400.0}) {
    CHECK(std::abs(stationary_field(x, amps).psi) == doctest::Approx(std::abs(amps.t)).epsilon(1e-12));
  }
}

TEST_CASE("second derivative obeys the stationary equation") {
  const BarrierSpec b{10.0, 4.0};
  const double k = oracle::k_of(3.0);
  const auto amps = scattering_amplitudes(k, b);
  for (double x : {-2.0, 1.0, 3.0, 6.0}) {
    const auto f = stationary_field(x, amps);
    const double v = (x > 0.0 && x < b.a) ? b.v0 : 0.0;
    // -C psi'' + V psi = E psi
    const Complex lhs = -oracle::kC * f.d2psi + v * f.psi;
    CHECK(std::abs(lhs - 3.0 * f.psi) < 1e-10 * std::max(1.0, std::abs(f.psi)));
  }
}

TEST_CASE("half-height symmetry") {
  for (double v0 : {2.0, 10.0, 15.0}) {
    const double k = oracle::k_of(0.5 * v0);
    const auto amps = scattering_amplitudes(k, {v0, 2.0});
    CHECK(amps.kappa == doctest::Approx(k).epsilon(1e-15));
  }
}

TEST_CASE("rejected inputs") {
  CHECK_THROWS_AS(scattering_amplitudes(0.0, {10.0, 5.0}), DomainError);
  CHECK_THROWS_AS(scattering_amplitudes(-1.0, {10.0, 5.0}), DomainError);
  CHECK_THROWS_AS(scattering_amplitudes(oracle::k_of(10.0) * (1.0 + 1e-12), {10.0, 5.0}), OverBarrierComponent);
  CHECK_THROWS_AS((BarrierSpec{0.0, 5.0}.validate()), DomainError);
  CHECK_THROWS_AS((BarrierSpec{10.0, -1.0}.validate()), DomainError);
}

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "tunneltime/chronostats.hpp"
#include "tunneltime/errors.hpp"

using namespace tunnel;

namespace {

TimeGrid unit_grid(std::size_t n, double t_min, double t_max) {
  return {t_min, t_max, n, (t_max - t_min) / static_cast<double>(n - 1)};
}

FluxSeries series_of(const TimeGrid& g, double (*f)(double)) {
  std::vector<double> j(g.n);
  for (std::size_t i = 0; i < g.n; ++i) j[i] = f(g.at(i));
  return split_flux(0.0, g, std::move(j));
}

struct Setup {
  BarrierSpec barrier;
  PacketSpec packet;
  TimeGrid times;
  WavePacket wp;

  Setup(double v0, double a, double ebar, double dk, double x_extent)
      : barrier{v0, a},
        packet(PacketSpec::from_energy(ebar, dk)),
        times(build_time_grid(packet)),
        wp(barrier, packet,
           build_k_grid(packet, barrier, default_k_panels(packet, barrier, 0.5 * times.window(), x_extent))) {}

  std::vector<PointMoments> moments(std::vector<double> xs) const {
    auto series = wp.flux_series(xs, times);
    std::vector<PointMoments> out;
    for (std::size_t i = 0; i < xs.size(); ++i) out.push_back(point_moments(split_flux(xs[i], times, std::move(series[i]))));
    return out;
  }
};

}  // namespace

TEST_CASE("flux split") {
  const TimeGrid g = unit_grid(101, -1.0, 1.0);
  const FluxSeries pos = series_of(g, [](double t) { return std::exp(-t * t * 50.0); });
  for (double v : pos.j_minus) CHECK(v == 0.0);
  const FluxSeries alt = series_of(g, [](double t) { return std::sin(9.0 * t); });
  for (std::size_t i = 0; i < g.n; ++i) {
    CHECK(alt.j_plus[i] + alt.j_minus[i] == alt.j[i]);
    CHECK(alt.j_plus[i] >= 0.0);
    CHECK(alt.j_minus[i] <= 0.0);
  }
}

TEST_CASE("time moments of simple pulses") {
  SUBCASE("symmetric pulse") {
    const TimeGrid g = unit_grid(2001, -1.0, 1.0);
    const auto m = time_moments(series_of(g, [](double t) { return std::exp(-(t - 0.125) * (t - 0.125) * 400.0); }),
                                FluxPart::Plus);
    CHECK(m.mean == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(m.variance == doctest::Approx(1.0 / 800.0).epsilon(1e-9));
    CHECK(m.reliable);
  }
  SUBCASE("rectangular pulse") {
    const TimeGrid g = unit_grid(20001, -1.0, 1.0);
    const auto m = time_moments(series_of(g, [](double t) { return (t > -0.3 && t < 0.3) ? 1.0 : 0.0; }),
                                FluxPart::Plus);
    CHECK(m.variance == doctest::Approx(0.6 * 0.6 / 12.0).epsilon(1e-3));
    CHECK(std::abs(m.mean) < 1e-4);
  }
  SUBCASE("flux still present at the window edge") {
    const TimeGrid g = unit_grid(201, -1.0, 1.0);
    CHECK_THROWS_AS(time_moments(series_of(g, [](double t) { return std::exp(-t * t); }), FluxPart::Plus),
                    WindowTooNarrow);
  }
  SUBCASE("absent part") {
    const TimeGrid g = unit_grid(201, -1.0, 1.0);
    const auto m = time_moments(series_of(g, [](double t) { return std::exp(-t * t * 100.0); }), FluxPart::Minus);
    CHECK_FALSE(m.reliable);
    CHECK(m.norm == 0.0);
  }
  SUBCASE("weights integrate to one") {
    const TimeGrid g = unit_grid(401, -1.0, 1.0);
    const FluxSeries f = series_of(g, [](double t) { return std::exp(-t * t * 80.0) * std::cos(12.0 * t); });
    for (auto [part, sp] : {std::pair{FluxPart::Plus, SignedPart::Positive}, std::pair{FluxPart::Minus, SignedPart::Negative}}) {
      const auto w = flux_weights(f, part);
      const double norm = part_moments(f.j, g.t_min, g.step, sp, 0.0)[0];
      std::vector<double> scaled(f.j);
      for (double& v : scaled) v /= norm;
      CHECK(part_moments(scaled, g.t_min, g.step, SignedPart::Positive, 0.0)[0] == doctest::Approx(1.0).epsilon(1e-12));
      for (std::size_t i = 0; i < g.n; ++i) CHECK(w[i] >= 0.0);
    }
  }
}

TEST_CASE("presence probabilities") {
  const TimeGrid g = unit_grid(801, -1.0, 1.0);
  const FluxSeries f = series_of(g, [](double t) { return std::exp(-t * t * 80.0) * std::cos(12.0 * t); });
  const auto right = presence_probability(f, PresenceSide::Right);
  const auto left = presence_probability(f, PresenceSide::Left);
  CHECK(right.front() == 0.0);
  CHECK(left.front() == 0.0);
  for (std::size_t i = 1; i < g.n; ++i) {
    CHECK(right[i] >= right[i - 1]);
    CHECK(left[i] >= left[i - 1]);
  }
  // dN>/dt = J+ away from sign changes.
  for (std::size_t i = 1; i + 1 < g.n; i += 40) {
    if (f.j[i - 1] > 0.0 && f.j[i + 1] > 0.0) {
      CHECK((right[i + 1] - right[i - 1]) / (2.0 * g.step) == doctest::Approx(f.j[i]).epsilon(1e-3));
    }
  }
}

TEST_CASE("free packet kinematics") {
  const double v = oracle::velocity(oracle::k_of(5.0));
  const Setup s(10.0, 0.0, 5.0, 0.02, 25.0);
  const auto m = s.moments({0.0, 5.0, 10.0, 20.0});
  CHECK(m[2].plus.mean == doctest::Approx(10.0 / v).epsilon(0.01));
  CHECK(m[2].plus.mean == doctest::Approx(7.54e-16).epsilon(0.01));
  double previous = 0.0;
  for (std::size_t i = 1; i < m.size(); ++i) {
    const double x = i == 1 ? 5.0 : (i == 2 ? 10.0 : 20.0);
    CHECK(m[i].plus.mean - m[0].plus.mean == doctest::Approx(x / v).epsilon(0.01));
    CHECK(std::abs(m[i].minus.norm) < 1e-6);
    const double spread = m[i].plus.variance + m[0].plus.variance;
    CHECK(spread > previous);
    previous = spread;
  }
}

TEST_CASE("composite durations") {
  PointMoments at0, atx;
  at0.plus = {0.9, 1.0e-15, 4.0e-30, true};
  at0.minus = {-0.1, 6.0e-15, 9.0e-30, true};
  atx.plus = {0.1, 3.0e-15, 5.0e-30, true};
  atx.minus = {-1e-9, 3.5e-15, 2.0e-30, false};
  const double a = 5.0;

  CHECK(compose_duration(DurationKind::Penetration, 0.0, 0.0, at0, at0, a).mean == 0.0);
  const auto tun = compose_duration(DurationKind::Tunnelling, 0.0, a, at0, atx, a);
  CHECK(tun.mean == doctest::Approx(2.0e-15));
  CHECK(tun.variance == doctest::Approx(9.0e-30));
  CHECK(tun.reliable);
  const auto refl = compose_duration(DurationKind::Reflection, 0.0, 0.0, at0, at0, a);
  CHECK(refl.mean == doctest::Approx(5.0e-15));
  CHECK(refl.variance == doctest::Approx(13.0e-30));  // D t- + D t+, not 2 D t-
  const auto ret = compose_duration(DurationKind::Return, 2.0, 2.0, atx, atx, a);
  CHECK_FALSE(ret.reliable);
  CHECK(duration_mean(DurationKind::Transmission, -1.0, 6.0, at0, atx, a) == doctest::Approx(2.0e-15));
  CHECK(duration_variance(DurationKind::Transmission, -1.0, 6.0, at0, atx, a) == doctest::Approx(9.0e-30));

  PointMoments zero;
  zero.plus.reliable = zero.minus.reliable = true;
  CHECK(compose_duration(DurationKind::Tunnelling, 0.0, a, zero, zero, a).variance == 0.0);

  CHECK_THROWS_AS(compose_duration(DurationKind::Tunnelling, 0.0, 4.0, at0, atx, a), DomainError);
  CHECK_THROWS_AS(compose_duration(DurationKind::Transmission, 0.0, 6.0, at0, atx, a), DomainError);
  CHECK_THROWS_AS(compose_duration(DurationKind::Transmission, -1.0, 4.0, at0, atx, a), DomainError);
  CHECK_THROWS_AS(compose_duration(DurationKind::Penetration, 0.0, 6.0, at0, atx, a), DomainError);
  CHECK_THROWS_AS(compose_duration(DurationKind::Penetration, 1.0, 3.0, at0, atx, a), DomainError);
  CHECK_THROWS_AS(compose_duration(DurationKind::Return, 1.0, 2.0, at0, atx, a), DomainError);
  CHECK_THROWS_AS(compose_duration(DurationKind::Return, 6.0, 6.0, at0, atx, a), DomainError);
  CHECK_THROWS_AS(compose_duration(DurationKind::Reflection, 1.0, 1.0, at0, atx, a), DomainError);
  CHECK_NOTHROW(compose_duration(DurationKind::Reflection, -3.0, -3.0, at0, at0, a));
}

TEST_CASE("tunnelling durations on the reference barrier") {
  const Setup s(10.0, 5.0, 5.0, 0.02, 5.0);
  const auto m = s.moments({0.0, 5.0});
  const auto tun = compose_duration(DurationKind::Tunnelling, 0.0, 5.0, m[0], m[1], 5.0);
  CHECK(tun.variance == doctest::Approx(m[0].plus.variance + m[1].plus.variance).epsilon(1e-15));
  const auto refl = compose_duration(DurationKind::Reflection, 0.0, 0.0, m[0], m[0], 5.0);
  CHECK(refl.mean >= tun.mean);
  CHECK(tun.mean > 0.0);
}

TEST_CASE("dwell time") {
  SUBCASE("free packet") {
    const Setup s(10.0, 0.0, 5.0, 0.02, 20.0);
    const double v = oracle::velocity(oracle::k_of(5.0));
    const double flux_form = dwell_time_flux(s.wp, -10.0, 20.0, s.times);
    const double density_form = dwell_time_density(s.wp, -10.0, 20.0, s.times);
    CHECK(flux_form == doctest::Approx(30.0 / v).epsilon(0.01));
    CHECK(density_form == doctest::Approx(flux_form).epsilon(1e-3));
  }
  SUBCASE("two forms agree on a barrier") {
    const Setup s(10.0, 5.0, 5.0, 0.02, 10.0);
    const double flux_form = dwell_time_flux(s.wp, -5.0, 10.0, s.times);
    const double density_form = dwell_time_density(s.wp, -5.0, 10.0, s.times);
    CHECK(density_form == doctest::Approx(flux_form).epsilon(1e-3));
    CHECK(flux_form > 0.0);
  }
  SUBCASE("opaque barrier, inner edge close to the entrance") {
    const Setup s(10.0, 10.0, 5.0, 0.02, 12.0);
    const double d = dwell_time_flux(s.wp, -0.5, 10.5, s.times);
    CHECK(d > 0.0);
    CHECK(d < 1e-15);
  }
  SUBCASE("domain") {
    const Setup s(10.0, 5.0, 5.0, 0.02, 10.0);
    CHECK_THROWS_AS(dwell_time_flux(s.wp, 0.0, 10.0, s.times), DomainError);
    CHECK_THROWS_AS(dwell_time_density(s.wp, -1.0, 4.0, s.times), DomainError);
    DwellOptions strict;
    strict.norm_floor = 2.0;
    CHECK_THROWS_AS(dwell_time_flux(s.wp, -5.0, 10.0, s.times, strict), UnreliableStatistic);
  }
}

TEST_CASE("phase time") {
  const double k = oracle::k_of(5.0);
  const double opaque = oracle::opaque_phase_time(5.0, 10.0);
  CHECK(opaque == doctest::Approx(1.32e-16).epsilon(0.01));
  const double p5 = phase_time(k, {10.0, 5.0}, 0.0, 5.0);
  const double p10 = phase_time(k, {10.0, 10.0}, 0.0, 10.0);
  CHECK(p5 == doctest::Approx(opaque).epsilon(0.05));
  CHECK(p10 == doctest::Approx(p5).epsilon(0.02));
  // Outside points add free flight on both sides.
  const double v = oracle::velocity(k);
  CHECK(phase_time(k, {10.0, 5.0}, -2.0, 8.0) == doctest::Approx(p5 + 5.0 / v).epsilon(1e-6));
  // Vanishing barrier: free flight over the width.
  const double free_delay = group_delay(k, 0.0, 5.0, [](double q) { return transmission_closed_form(q, {1e-9, 5.0}); });
  CHECK(free_delay == doctest::Approx(5.0 / v).epsilon(1e-6));
  CHECK_THROWS_AS(phase_time(oracle::k_of(10.0 * (1.0 - 1e-7)), {10.0, 5.0}, 0.0, 5.0), DomainError);
  CHECK_THROWS_AS(phase_time(k, {10.0, 5.0}, 1.0, 5.0), DomainError);
}

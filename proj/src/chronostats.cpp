#include "tunneltime/chronostats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tunneltime/errors.hpp"

namespace tunnel {

namespace {

SignedPart signed_part(FluxPart part) { return part == FluxPart::Plus ? SignedPart::Positive : SignedPart::Negative; }

void check_window(const FluxSeries& flux, double tolerance) {
  double peak = 0.0;
  for (double v : flux.j) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return;
  const double edge = std::max(std::abs(flux.j.front()), std::abs(flux.j.back()));
  if (edge > tolerance * peak) {
    throw WindowTooNarrow("flux at x = " + std::to_string(flux.x) + " A has not decayed at the window ends (" +
                          std::to_string(edge / peak) + " of peak)");
  }
}

double simpson(std::span<const double> f, double h) {
  const auto w = simpson_weights(f.size(), h);
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * f[i];
  return acc;
}

double simpson_first_moment(std::span<const double> f, const TimeGrid& grid) {
  const auto w = simpson_weights(f.size(), grid.step);
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * grid.at(i) * f[i];
  return acc;
}

double incident_norm(const WavePacket& packet, double x_i, const TimeGrid& times, double floor) {
  const double xs[] = {x_i};
  const auto j_in = packet.flux_series(xs, times, Component::Incident);
  const double norm = simpson(j_in[0], times.step);
  if (!(norm >= floor)) {
    throw UnreliableStatistic("incident flux integral " + std::to_string(norm) + " is below the floor");
  }
  return norm;
}

void check_dwell_domain(const WavePacket& packet, double x_i, double x_f) {
  if (!(x_i < 0.0) || !(x_f > packet.barrier().a) || !(x_f > 0.0)) {
    throw DomainError("dwell time needs x_i < 0 and x_f > a");
  }
}

}  // namespace

FluxSeries split_flux(double x, const TimeGrid& grid, std::vector<double> j) {
  if (j.size() != grid.n) throw DomainError("flux samples do not match the time grid");
  FluxSeries s;
  s.x = x;
  s.grid = grid;
  s.j_plus.resize(j.size());
  s.j_minus.resize(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    s.j_plus[i] = std::max(j[i], 0.0);
    s.j_minus[i] = std::min(j[i], 0.0);
  }
  s.j = std::move(j);
  return s;
}

TimeMoments time_moments(const FluxSeries& flux, FluxPart part, const MomentOptions& options) {
  check_window(flux, options.window_tolerance);
  const TimeGrid& g = flux.grid;
  const auto first = part_moments(flux.j, g.t_min, g.step, signed_part(part), 0.0);
  const auto other = part_moments(flux.j, g.t_min, g.step,
                                  part == FluxPart::Plus ? SignedPart::Negative : SignedPart::Positive, 0.0);
  TimeMoments m;
  m.norm = first[0];
  if (m.norm == 0.0) return m;

  const double total = std::abs(first[0]) + std::abs(other[0]);
  m.mean = first[1] / first[0];
  const auto central = part_moments(flux.j, g.t_min, g.step, signed_part(part), m.mean);
  m.variance = central[2] / central[0];
  m.reliable = std::abs(m.norm) >= options.norm_floor * total;

  if (m.variance < 0.0) {
    const double scale = std::max(m.mean * m.mean, g.step * g.step);
    if (m.reliable && m.variance < -kVarianceSlack * scale) {
      throw NumericalError("negative time variance " + std::to_string(m.variance) + " s^2 at x = " +
                           std::to_string(flux.x));
    }
    m.variance = 0.0;
  }
  return m;
}

std::vector<double> flux_weights(const FluxSeries& flux, FluxPart part) {
  const auto& src = part == FluxPart::Plus ? flux.j_plus : flux.j_minus;
  const double norm = part_moments(flux.j, flux.grid.t_min, flux.grid.step, signed_part(part), 0.0)[0];
  std::vector<double> w(src.size(), 0.0);
  if (norm == 0.0) return w;
  for (std::size_t i = 0; i < src.size(); ++i) w[i] = src[i] / norm;
  return w;
}

PointMoments point_moments(const FluxSeries& flux, const MomentOptions& options) {
  return {time_moments(flux, FluxPart::Plus, options), time_moments(flux, FluxPart::Minus, options)};
}

std::string_view to_string(DurationKind kind) {
  switch (kind) {
    case DurationKind::Transmission: return "transmission";
    case DurationKind::Tunnelling: return "tunnelling";
    case DurationKind::Penetration: return "penetration";
    case DurationKind::Return: return "return";
    case DurationKind::Reflection: return "reflection";
  }
  return "unknown";
}

DurationReport compose_duration(DurationKind kind, double x_i, double x_f, const PointMoments& at_i,
                                const PointMoments& at_f, double barrier_width) {
  const double a = barrier_width;
  bool ok = false;
  switch (kind) {
    case DurationKind::Transmission: ok = x_i < 0.0 && x_f > a; break;
    case DurationKind::Tunnelling: ok = x_i == 0.0 && x_f == a; break;
    case DurationKind::Penetration: ok = x_i == 0.0 && x_f >= 0.0 && x_f <= a; break;
    case DurationKind::Return: ok = x_i == x_f && x_i >= 0.0 && x_i <= a; break;
    case DurationKind::Reflection: ok = x_i == x_f && x_i <= 0.0; break;
  }
  if (!ok) {
    throw DomainError(std::string(to_string(kind)) + " duration is not defined for x_i = " + std::to_string(x_i) +
                      ", x_f = " + std::to_string(x_f) + " with a = " + std::to_string(a));
  }

  DurationReport r;
  r.kind = kind;
  r.x_i = x_i;
  r.x_f = x_f;
  const TimeMoments* later = nullptr;
  const TimeMoments* earlier = nullptr;
  if (kind == DurationKind::Return || kind == DurationKind::Reflection) {
    later = &at_f.minus;
    earlier = &at_i.plus;
  } else {
    later = &at_f.plus;
    earlier = &at_i.plus;
  }
  r.mean = later->mean - earlier->mean;
  r.variance = later->variance + earlier->variance;
  r.reliable = later->reliable && earlier->reliable;
  return r;
}

double duration_mean(DurationKind kind, double x_i, double x_f, const PointMoments& at_i, const PointMoments& at_f,
                     double barrier_width) {
  return compose_duration(kind, x_i, x_f, at_i, at_f, barrier_width).mean;
}

double duration_variance(DurationKind kind, double x_i, double x_f, const PointMoments& at_i,
                         const PointMoments& at_f, double barrier_width) {
  return compose_duration(kind, x_i, x_f, at_i, at_f, barrier_width).variance;
}

std::vector<double> presence_probability(const FluxSeries& flux, PresenceSide side) {
  if (side == PresenceSide::Right) return cumulative_part(flux.j, flux.grid.step, SignedPart::Positive);
  auto n = cumulative_part(flux.j, flux.grid.step, SignedPart::Negative);
  for (double& v : n) v = -v;
  return n;
}

double dwell_time_flux(const WavePacket& packet, double x_i, double x_f, const TimeGrid& times,
                       const DwellOptions& options) {
  check_dwell_domain(packet, x_i, x_f);
  const double xs[] = {x_i, x_f};
  const auto j = packet.flux_series(xs, times, Component::Full);
  const double numerator = simpson_first_moment(j[1], times) - simpson_first_moment(j[0], times);
  return numerator / incident_norm(packet, x_i, times, options.norm_floor);
}

double dwell_time_density(const WavePacket& packet, double x_i, double x_f, const TimeGrid& times,
                          const DwellOptions& options) {
  check_dwell_domain(packet, x_i, x_f);
  if (!(options.x_step > 0.0)) throw DomainError("x_step must be positive");
  const double a = packet.barrier().a;

  std::vector<double> xs, wx;
  auto add_region = [&](double lo, double hi) {
    if (!(hi > lo)) return;
    auto intervals = static_cast<std::size_t>(std::ceil((hi - lo) / options.x_step));
    intervals = std::max<std::size_t>(2, intervals + intervals % 2);
    const double h = (hi - lo) / static_cast<double>(intervals);
    const auto w = simpson_weights(intervals + 1, h);
    for (std::size_t i = 0; i <= intervals; ++i) {
      xs.push_back(i == intervals ? hi : lo + static_cast<double>(i) * h);
      wx.push_back(w[i]);
    }
  };
  add_region(x_i, 0.0);
  add_region(0.0, a);
  add_region(a, x_f);

  const auto presence = packet.density_integral(xs, wx, times);
  return simpson(presence, times.step) / incident_norm(packet, x_i, times, options.norm_floor);
}

double group_delay(double k_bar, double x_i, double x_f, const std::function<Complex(double)>& transmission) {
  const double e = energy_of(k_bar);
  const double h = 1e-5 * e;
  const double k_up = wavenumber_of(e + h);
  const double k_down = wavenumber_of(e - h);
  const double dphase = std::arg(transmission(k_up) / transmission(k_down));
  return kElectron.hbar * (dphase + (k_up - k_down) * (x_f - x_i)) / (2.0 * h);
}

double phase_time(double k_bar, const BarrierSpec& barrier, double x_i, double x_f) {
  barrier.validate();
  if (!(k_bar > 0.0)) throw DomainError("mean wavenumber must be positive");
  if (!(x_i <= 0.0) || !(x_f >= barrier.a)) throw DomainError("phase time needs x_i <= 0 and x_f >= a");
  const double e = energy_of(k_bar);
  if (!(e * (1.0 + 1e-5) < barrier.v0)) {
    throw DomainError("mean energy " + std::to_string(e) + " eV is too close to V0 for the difference stencil");
  }
  return group_delay(k_bar, x_i, x_f, [&](double k) { return transmission_closed_form(k, barrier); });
}

}  // namespace tunnel

#include "tunneltime/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>

#include "tunneltime/errors.hpp"

namespace tunnel {

namespace {

// Full, ascending node/weight set of an order-N Gauss-Legendre rule on [-1, 1].
template <std::size_t N>
struct LegendreRule {
  std::array<double, N> x{};
  std::array<double, N> w{};

  LegendreRule() {
    using Gauss = boost::math::quadrature::gauss<double, N>;
    const auto& abscissa = Gauss::abscissa();
    const auto& weights = Gauss::weights();
    // Boost stores the non-negative half, smallest first.
    constexpr std::size_t half = N / 2;
    static_assert(N % 2 == 0);
    for (std::size_t i = 0; i < half; ++i) {
      x[half - 1 - i] = -abscissa[i];
      w[half - 1 - i] = weights[i];
      x[half + i] = abscissa[i];
      w[half + i] = weights[i];
    }
  }
};

const LegendreRule<kGaussOrder>& panel_rule() {
  static const LegendreRule<kGaussOrder> rule;
  return rule;
}

const LegendreRule<4>& piece_rule() {
  static const LegendreRule<4> rule;
  return rule;
}

bool in_part(double v, SignedPart part) { return part == SignedPart::Positive ? v > 0.0 : v < 0.0; }

double part_of(double v, SignedPart part) { return part == SignedPart::Positive ? std::max(v, 0.0) : std::min(v, 0.0); }

// Lagrange interpolant through q <= 4 consecutive samples starting at `first`,
// in the local coordinate u = (t - t_first) / h.
struct LocalInterpolant {
  std::array<double, 4> y{};
  std::size_t q = 0;

  double operator()(double u) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      double basis = 1.0;
      for (std::size_t m = 0; m < q; ++m) {
        if (m != i) basis *= (u - static_cast<double>(m)) / static_cast<double>(static_cast<int>(i) - static_cast<int>(m));
      }
      sum += y[i] * basis;
    }
    return sum;
  }
};

void accumulate_kink_cell(std::span<const double> f, std::size_t cell, double t0, double h, SignedPart part,
                          double center, std::array<double, 3>& acc) {
  const std::size_t n = f.size();
  LocalInterpolant p;
  p.q = std::min<std::size_t>(4, n);
  const std::size_t first =
      std::min(cell > 0 ? cell - 1 : 0, n - p.q);
  for (std::size_t i = 0; i < p.q; ++i) p.y[i] = f[first + i];

  const double u0 = static_cast<double>(cell - first);
  const double u1 = u0 + 1.0;

  // Breakpoints: cell ends plus interpolant roots inside the cell.
  constexpr int kScan = 16;
  std::array<double, kScan + 2> breaks{};
  std::size_t nb = 0;
  breaks[nb++] = u0;
  double prev_u = u0;
  double prev_v = p(u0);
  for (int s = 1; s <= kScan; ++s) {
    const double u = u0 + static_cast<double>(s) / kScan;
    const double v = p(u);
    if ((prev_v < 0.0 && v > 0.0) || (prev_v > 0.0 && v < 0.0)) {
      double lo = prev_u, hi = u, vlo = prev_v;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double vm = p(mid);
        if ((vm < 0.0) == (vlo < 0.0)) {
          lo = mid;
          vlo = vm;
        } else {
          hi = mid;
        }
      }
      breaks[nb++] = 0.5 * (lo + hi);
    }
    prev_u = u;
    prev_v = v;
  }
  breaks[nb++] = u1;

  const auto& rule = piece_rule();
  const double t_first = t0 + static_cast<double>(first) * h;
  for (std::size_t b = 0; b + 1 < nb; ++b) {
    const double lo = breaks[b], hi = breaks[b + 1];
    if (!(hi > lo)) continue;
    if (!in_part(p(0.5 * (lo + hi)), part)) continue;
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t g = 0; g < rule.x.size(); ++g) {
      const double u = mid + half * rule.x[g];
      const double wv = rule.w[g] * half * h * p(u);
      const double dt = t_first + u * h - center;
      acc[0] += wv;
      acc[1] += wv * dt;
      acc[2] += wv * dt * dt;
    }
  }
}

}  // namespace

std::vector<double> TimeGrid::times() const {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = at(i);
  return out;
}

double packet_extension(const PacketSpec& packet) {
  packet.validate();
  return 1.0 / (packet.mean_velocity() * packet.dk);
}

TimeGrid build_time_grid(const PacketSpec& packet, const TimeGridOverrides& overrides) {
  const double extension = packet_extension(packet);
  double window = std::max(kDefaultTimeWindow, kDefaultWindowExtensions * extension);
  if (overrides.window) {
    window = *overrides.window;
    if (!(window >= kMinWindowExtensions * extension) || !std::isfinite(window)) {
      throw ConfigError("t_window_s", 0,
                        "time window " + std::to_string(window) + " s is narrower than ten packet extensions (" +
                            std::to_string(kMinWindowExtensions * extension) + " s)");
    }
  }
  std::size_t n = 0;
  if (overrides.n) {
    n = *overrides.n;
    if (n < 3) throw ConfigError("t_nodes", 0, "time grid needs at least 3 nodes");
  } else {
    auto intervals = static_cast<std::size_t>(std::ceil(window * kStepsPerExtension / extension));
    intervals += intervals % 2;
    n = intervals + 1;
  }
  TimeGrid grid;
  grid.t_min = packet.t0 - 0.5 * window;
  grid.t_max = packet.t0 + 0.5 * window;
  grid.n = n;
  grid.step = window / static_cast<double>(n - 1);
  return grid;
}

TimeGrid with_nodes(const TimeGrid& grid, std::size_t n) {
  if (n < 3) throw DomainError("time grid needs at least 3 nodes");
  TimeGrid out = grid;
  out.n = n;
  out.step = grid.window() / static_cast<double>(n - 1);
  return out;
}

KGrid build_k_grid(const PacketSpec& packet, const BarrierSpec& barrier, std::size_t panels) {
  packet.validate();
  barrier.validate();
  if (panels == 0) throw DomainError("k grid needs at least one panel");

  const double k_c = barrier.critical_wavenumber();
  const double ceiling = k_c - kGuardWavenumber;
  if (!(packet.k_bar < ceiling)) {
    throw OverBarrierComponent("mean wavenumber " + std::to_string(packet.k_bar) + " is not below k_c = " +
                               std::to_string(k_c));
  }
  const double half_width = support_half_width(packet.dk);
  double lo = packet.k_bar - half_width;
  double hi = packet.k_bar + half_width;
  if (hi > ceiling) {
    if (packet.over_barrier == OverBarrierPolicy::Error) {
      throw OverBarrierComponent("spectral support reaches " + std::to_string(hi) + " >= k_c = " + std::to_string(k_c));
    }
    hi = ceiling;
  }
  lo = std::max(lo, kFloorWavenumber);

  KGrid grid;
  grid.k_lo = lo;
  grid.k_hi = hi;
  grid.panels = panels;
  grid.nodes.reserve(panels * kGaussOrder);
  grid.weights.reserve(panels * kGaussOrder);
  const auto& rule = panel_rule();
  const double width = (hi - lo) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = lo + static_cast<double>(p) * width;
    const double mid = a + 0.5 * width;
    for (std::size_t g = 0; g < kGaussOrder; ++g) {
      grid.nodes.push_back(mid + 0.5 * width * rule.x[g]);
      grid.weights.push_back(0.5 * width * rule.w[g]);
    }
  }
  grid.c_norm = normalization(grid.nodes, grid.weights, packet);

  // |G|^2 is a normal density of standard deviation dk.
  const double s = std::numbers::sqrt2 * packet.dk;
  const double inside = 0.5 * (std::erf((hi - packet.k_bar) / s) - std::erf((lo - packet.k_bar) / s));
  grid.excluded_mass = std::max(0.0, 1.0 - inside);
  return grid;
}

std::size_t default_k_panels(const PacketSpec& packet, const BarrierSpec& barrier, double t_half, double x_extent) {
  const double k_c = barrier.critical_wavenumber();
  const double hw = support_half_width(packet.dk);
  const double lo = std::max(packet.k_bar - hw, kFloorWavenumber);
  const double hi = std::min(packet.k_bar + hw, k_c - kGuardWavenumber);
  const double phase_span = (hi - lo) * std::abs(x_extent) +
                            (kElectron.hbar2_over_2m / kElectron.hbar) * (hi * hi - lo * lo) * std::abs(t_half);
  const auto cycles = static_cast<std::size_t>(std::ceil(phase_span / kTwoPi));
  return std::max<std::size_t>(4, cycles);
}

std::vector<double> build_x_profile(const BarrierSpec& barrier, std::size_t n_x) {
  if (n_x < 2) throw DomainError("x profile needs at least two points");
  std::vector<double> xs(n_x);
  const double step = barrier.a / static_cast<double>(n_x - 1);
  for (std::size_t i = 0; i < n_x; ++i) xs[i] = static_cast<double>(i) * step;
  xs.back() = barrier.a;
  return xs;
}

std::vector<double> simpson_weights(std::size_t n, double h) {
  if (n < 2) throw DomainError("integration needs at least two nodes");
  std::vector<double> w(n, 0.0);
  const std::size_t intervals = n - 1;
  if (intervals == 1) {
    w[0] = w[1] = 0.5 * h;
    return w;
  }
  const std::size_t simpson_end = (intervals % 2 == 0) ? intervals : intervals - 3;
  for (std::size_t i = 0; i < simpson_end; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (simpson_end != intervals) {
    const std::size_t i = simpson_end;
    w[i] += 3.0 * h / 8.0;
    w[i + 1] += 9.0 * h / 8.0;
    w[i + 2] += 9.0 * h / 8.0;
    w[i + 3] += 3.0 * h / 8.0;
  }
  return w;
}

std::array<double, 3> part_moments(std::span<const double> f, double t0, double h, SignedPart part, double center) {
  const std::size_t n = f.size();
  if (n < 2) throw DomainError("integration needs at least two nodes");
  std::array<double, 3> acc{0.0, 0.0, 0.0};
  const std::size_t intervals = n - 1;
  const std::size_t simpson_end = intervals == 1 ? 0 : ((intervals % 2 == 0) ? intervals : intervals - 3);

  auto add_rule = [&](std::size_t first, std::span<const double> coeffs) {
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      const double wv = coeffs[i] * h * f[first + i];
      const double dt = t0 + static_cast<double>(first + i) * h - center;
      acc[0] += wv;
      acc[1] += wv * dt;
      acc[2] += wv * dt * dt;
    }
  };
  auto segment = [&](std::size_t first, std::span<const double> coeffs) {
    const std::size_t len = coeffs.size() - 1;
    bool any_in = false, any_out = false;
    for (std::size_t i = first; i <= first + len; ++i) {
      any_in = any_in || in_part(f[i], part);
      any_out = any_out || in_part(-f[i], part);
    }
    if (!any_in) return;
    if (!any_out) {
      add_rule(first, coeffs);
      return;
    }
    for (std::size_t c = first; c < first + len; ++c) accumulate_kink_cell(f, c, t0, h, part, center, acc);
  };

  static constexpr std::array<double, 2> kTrapezoid{0.5, 0.5};
  static constexpr std::array<double, 3> kSimpson{1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0};
  static constexpr std::array<double, 4> kThreeEighths{3.0 / 8.0, 9.0 / 8.0, 9.0 / 8.0, 3.0 / 8.0};
  if (intervals == 1) {
    segment(0, kTrapezoid);
    return acc;
  }
  for (std::size_t i = 0; i < simpson_end; i += 2) segment(i, kSimpson);
  if (simpson_end != intervals) segment(simpson_end, kThreeEighths);
  return acc;
}

std::vector<double> cumulative_part(std::span<const double> f, double h, SignedPart part) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i) {
    out[i] = out[i - 1] + 0.5 * h * (part_of(f[i - 1], part) + part_of(f[i], part));
  }
  return out;
}

Resolution Resolution::refined() const {
  Resolution r = *this;
  r.level += 1;
  r.k_panels *= 2;
  r.t_nodes *= 2;
  r.x_intervals *= 2;
  return r;
}

const RefinementLevel& RefinementReport::final_level() const {
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    if (!it->failed) return *it;
  }
  throw NumericalError("no refinement level produced a result");
}

RefinementReport refine_until_stable(const RefinementTask& task, const Resolution& base, const RefineOptions& options) {
  if (options.max_levels < 1) throw DomainError("max_levels must be at least 1");
  if (!(options.tol >= 0.0)) throw DomainError("tolerance must be non-negative");

  RefinementReport report;
  report.final_rel_change = std::numeric_limits<double>::infinity();
  Resolution res = base;
  res.level = 1;
  std::optional<std::size_t> previous;

  for (int level = 1; level <= options.max_levels; ++level, res = res.refined()) {
    RefinementLevel entry;
    entry.resolution = res;
    entry.rel_change = std::numeric_limits<double>::infinity();
    try {
      LevelResult out = task(res);
      entry.values = std::move(out.values);
      entry.tracked = std::move(out.tracked);
      entry.tracked.resize(entry.values.size(), true);
    } catch (const WindowTooNarrow& e) {
      entry.failed = true;
      entry.failure = e.what();
    }
    if (!entry.failed) {
      for (std::size_t i = 0; i < entry.values.size(); ++i) {
        if (entry.tracked[i] && !std::isfinite(entry.values[i])) {
          throw NumericalError("refinement task produced a non-finite value at level " + std::to_string(level));
        }
      }
    }
    report.levels.push_back(std::move(entry));
    RefinementLevel& cur = report.levels.back();
    if (cur.failed) {
      previous.reset();
      continue;
    }
    if (previous && report.levels[*previous].values.size() == cur.values.size()) {
      const RefinementLevel& before_level = report.levels[*previous];
      double worst = 0.0;
      bool stable = true;
      for (std::size_t i = 0; i < cur.values.size(); ++i) {
        if (!cur.tracked[i] || !before_level.tracked[i]) continue;
        const double now = cur.values[i], before = before_level.values[i];
        if ((now > 0.0) != (before > 0.0) || (now < 0.0) != (before < 0.0)) stable = false;
        if (now == before) continue;
        const double rel = now == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(now - before) / std::abs(now);
        worst = std::max(worst, rel);
      }
      cur.rel_change = worst;
      cur.signs_stable = stable;
      report.final_rel_change = worst;
      if (stable && worst < options.tol) {
        report.converged = true;
        return report;
      }
    }
    previous = report.levels.size() - 1;
  }
  return report;
}

}  // namespace tunnel

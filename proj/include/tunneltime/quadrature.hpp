#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tunneltime/packet.hpp"
#include "tunneltime/scatter.hpp"

namespace tunnel {

// ---------------------------------------------------------------------------
// Grids

/// Uniform time grid t_i = t_min + i * step, i = 0 .. n-1.
struct TimeGrid {
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t n = 0;
  double step = 0.0;

  double at(std::size_t i) const { return t_min + static_cast<double>(i) * step; }
  double window() const { return t_max - t_min; }
  std::vector<double> times() const;
};

inline constexpr double kDefaultTimeWindow = 2e-13;     // s, symmetric about t0 = 0
inline constexpr double kMinWindowExtensions = 10.0;    // override floor
inline constexpr double kDefaultWindowExtensions = 20.0;
inline constexpr double kStepsPerExtension = 50.0;

struct TimeGridOverrides {
  std::optional<double> window;  // full width, s
  std::optional<std::size_t> n;  // node count
};

/// Temporal extension 1/(v_bar dk) of the packet.
double packet_extension(const PacketSpec& packet);

/// Window [-W/2, W/2] with W = max(2e-13 s, 20 extensions) unless overridden;
/// step at most extension/50. An override narrower than ten extensions is a
/// ConfigError.
TimeGrid build_time_grid(const PacketSpec& packet, const TimeGridOverrides& overrides = {});

/// Same window with `n` nodes.
TimeGrid with_nodes(const TimeGrid& grid, std::size_t n);

inline constexpr std::size_t kGaussOrder = 20;
inline constexpr double kFloorWavenumber = 1e-6;  // 1/A
inline constexpr double kGuardWavenumber = 1e-6;  // 1/A below k_c

/// Composite Gauss-Legendre grid over [k_bar - h, k_bar + h] (h = 5 sqrt2 dk)
/// intersected with (k_floor, k_c - k_guard), `panels` equal panels of
/// kGaussOrder nodes, normalised on the truncated support.
KGrid build_k_grid(const PacketSpec& packet, const BarrierSpec& barrier, std::size_t panels);

/// Panel count resolving the phase k x - E t / hbar across the support for
/// |x| <= x_extent and |t| <= t_half, one panel per 2*pi of phase.
std::size_t default_k_panels(const PacketSpec& packet, const BarrierSpec& barrier, double t_half, double x_extent);

/// n_x uniform positions on [0, a], endpoints included.
std::vector<double> build_x_profile(const BarrierSpec& barrier, std::size_t n_x);

// ---------------------------------------------------------------------------
// Uniform-grid integration

/// Composite Simpson weights for n uniformly spaced nodes; an odd number of
/// intervals closes with the 3/8 rule, a single interval is a trapezoid.
std::vector<double> simpson_weights(std::size_t n, double h);

enum class SignedPart { Positive, Negative };

/// Integrals of f_s(t) (t - c)^p, p = 0, 1, 2, where f_s is the positive part
/// max(f, 0) or the negative part min(f, 0) of a sampled smooth f. Segments
/// whose samples all share a sign use the Simpson rule on f directly; those
/// containing a sign change are integrated on a local cubic interpolant split
/// at its roots, so the kink of the part costs O(h^4) rather than O(h^2).
std::array<double, 3> part_moments(std::span<const double> f, double t0, double h, SignedPart part, double center);

/// Running trapezoid integral of the chosen part, starting at zero.
std::vector<double> cumulative_part(std::span<const double> f, double h, SignedPart part);

// ---------------------------------------------------------------------------
// Refine-until-stable

struct Resolution {
  int level = 1;                 // 1-based
  std::size_t k_panels = 0;
  std::size_t t_nodes = 0;
  std::size_t x_intervals = 0;   // per unit of the task's own x-grid, 0 if unused

  Resolution refined() const;    // every count doubled, level + 1
};

struct LevelResult {
  std::vector<double> values;
  std::vector<bool> tracked;     // entries that take part in the stability test
};

struct RefinementLevel {
  Resolution resolution;
  std::vector<double> values;
  std::vector<bool> tracked;
  bool failed = false;           // the task refused this resolution (e.g. window check)
  std::string failure;
  double rel_change = 0.0;       // vs the previous successful level; +inf if n/a
  bool signs_stable = false;
};

struct RefinementReport {
  std::vector<RefinementLevel> levels;
  bool converged = false;
  double final_rel_change = 0.0;

  /// Last successful level. Throws NumericalError when every level failed.
  const RefinementLevel& final_level() const;
};

struct RefineOptions {
  double tol = 1e-3;
  int max_levels = 8;
};

using RefinementTask = std::function<LevelResult(const Resolution&)>;

/// Runs the task at base, 2x base, 4x base, ... until every tracked value
/// changes by less than tol (relative) with unchanged sign between two
/// consecutive levels, or max_levels is exhausted. A level that throws
/// WindowTooNarrow is recorded as failed and refinement continues; non-finite
/// tracked values raise NumericalError.
RefinementReport refine_until_stable(const RefinementTask& task, const Resolution& base,
                                     const RefineOptions& options = {});

}  // namespace tunnel

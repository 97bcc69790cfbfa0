#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "tunneltime/field.hpp"
#include "tunneltime/quadrature.hpp"
#include "tunneltime/scatter.hpp"

namespace tunnel {

/// J(x, t) sampled on a uniform time grid at fixed x, with its pointwise
/// positive and negative parts (j = j_plus + j_minus).
struct FluxSeries {
  double x = 0.0;
  TimeGrid grid;
  std::vector<double> j;
  std::vector<double> j_plus;
  std::vector<double> j_minus;
};

FluxSeries split_flux(double x, const TimeGrid& grid, std::vector<double> j);

enum class FluxPart { Plus, Minus };

inline constexpr double kNormFloor = 1e-6;
inline constexpr double kWindowTolerance = 1e-6;
inline constexpr double kVarianceSlack = 1e-3;

struct MomentOptions {
  /// A part is reliable when |int J_part dt| >= norm_floor * int |J| dt.
  double norm_floor = kNormFloor;
  /// Endpoint |J| must stay below this fraction of the peak |J|.
  double window_tolerance = kWindowTolerance;
};

/// Zeroth, first and second time moments of J+ or J- at one position.
struct TimeMoments {
  double norm = 0.0;      // int J_part dt (negative for J-)
  double mean = 0.0;      // <t_part(x)>, s
  double variance = 0.0;  // D t_part(x), s^2
  bool reliable = false;
};

/// Throws WindowTooNarrow if the flux has not decayed at both window ends.
/// Zero-norm parts come back with mean = variance = 0 and reliable = false.
TimeMoments time_moments(const FluxSeries& flux, FluxPart part, const MomentOptions& options = {});

/// w_part(x, t_i) = J_part / int J_part dt on the grid nodes.
std::vector<double> flux_weights(const FluxSeries& flux, FluxPart part);

struct PointMoments {
  TimeMoments plus;
  TimeMoments minus;
};

PointMoments point_moments(const FluxSeries& flux, const MomentOptions& options = {});

enum class DurationKind { Transmission, Tunnelling, Penetration, Return, Reflection };

std::string_view to_string(DurationKind kind);

struct DurationReport {
  DurationKind kind = DurationKind::Tunnelling;
  double x_i = 0.0;
  double x_f = 0.0;
  double mean = 0.0;      // s
  double variance = 0.0;  // s^2
  bool reliable = false;
};

/// Mean and variance of a process duration from the endpoint moments.
///   Transmission (x_i < 0, x_f > a), Tunnelling (0, a), Penetration (0, x_f <= a):
///       <t+(x_f)> - <t+(x_i)>,  D t+(x_f) + D t+(x_i)
///   Return (x_i = x_f in [0, a]), Reflection (x_i = x_f <= 0):
///       <t-(x)> - <t+(x)>,      D t-(x) + D t+(x)
/// Reflection uses D t- + D t+, not 2 D t-.
/// Throws DomainError when the positions do not fit the kind.
DurationReport compose_duration(DurationKind kind, double x_i, double x_f, const PointMoments& at_i,
                                const PointMoments& at_f, double barrier_width);

double duration_mean(DurationKind kind, double x_i, double x_f, const PointMoments& at_i, const PointMoments& at_f,
                     double barrier_width);
double duration_variance(DurationKind kind, double x_i, double x_f, const PointMoments& at_i,
                         const PointMoments& at_f, double barrier_width);

enum class PresenceSide {
  Right,  // N>(x, inf; t) = int_{-inf}^t J+ dt'
  Left,   // N<(-inf, x; t) = -int_{-inf}^t J- dt'
};

/// Running presence probability on the flux grid, zero at the window start.
std::vector<double> presence_probability(const FluxSeries& flux, PresenceSide side);

struct DwellOptions {
  double norm_floor = kNormFloor;
  double x_step = 0.25;  // target spacing of the uniform x grid, A
};

/// [int t J(x_f,t) dt - int t J(x_i,t) dt] / int J_in(x_i,t) dt, with J_in
/// the flux of the incident plane-wave part alone.
double dwell_time_flux(const WavePacket& packet, double x_i, double x_f, const TimeGrid& times,
                       const DwellOptions& options = {});

/// int dt int_{x_i}^{x_f} dx rho / int J_in(x_i,t) dt. The x integral is a
/// Simpson rule per region on a grid that has x = 0 and x = a as nodes.
double dwell_time_density(const WavePacket& packet, double x_i, double x_f, const TimeGrid& times,
                          const DwellOptions& options = {});

/// hbar d/dE [arg T(E) + k (x_f - x_i)] at the mean energy, where T is a
/// transmission amplitude and the derivative is a central difference with
/// relative step 1e-5.
double group_delay(double k_bar, double x_i, double x_f, const std::function<Complex(double)>& transmission);

/// Stationary-phase time from x_i <= 0 to x_f >= a on the closed-form t(E).
/// Throws DomainError when E(1 + 1e-5) reaches V0.
double phase_time(double k_bar, const BarrierSpec& barrier, double x_i, double x_f);

}  // namespace tunnel

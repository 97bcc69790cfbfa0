#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tunneltime/chronostats.hpp"
#include "tunneltime/quadrature.hpp"

namespace tunnel {

/// One barrier + packet scenario, read from `key = value` text.
struct ScenarioConfig {
  double v0_ev = 0.0;
  double a_angstrom = 0.0;
  double ebar_ev = 0.0;
  double dk_inv_angstrom = 0.0;
  std::optional<double> t_window_s;  // full width; default from build_time_grid
  double tol = 1e-3;
  std::size_t n_x = 11;
  std::string output_path;

  BarrierSpec barrier() const { return {v0_ev, a_angstrom}; }
  PacketSpec packet() const { return PacketSpec::from_energy(ebar_ev, dk_inv_angstrom); }

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Recognised keys: v0_ev, a_angstrom, ebar_ev, dk_inv_angstrom (required),
/// t_window_s, tol, n_x, output_path. '#' starts a comment. Unknown or
/// repeated keys and malformed values are ConfigErrors.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

struct RunOptions {
  std::optional<double> tol;  // overrides the config value
  int max_levels = 8;
  unsigned jobs = 1;
  /// Starting resolution; defaults to the heuristic grids.
  std::optional<Resolution> base;
};

/// Heuristic starting resolution for a scenario whose positions reach x_extent.
Resolution default_resolution(const ScenarioConfig& config, double x_extent);

/// Packet, time grid and spectral diagnostics at one resolution.
struct Discretization {
  WavePacket packet;
  TimeGrid times;
};

Discretization discretize(const ScenarioConfig& config, const Resolution& res);

/// Endpoint moments at each position, at one resolution.
std::vector<PointMoments> moments_at(const Discretization& d, std::span<const double> xs,
                                     const MomentOptions& options = {});

// ---------------------------------------------------------------------------

struct SingleSummary {
  DurationReport tunnelling;
  DurationReport reflection;  // tau_R(0, 0)
  double dwell_x_i = 0.0;
  double dwell_x_f = 0.0;
  double dwell_flux = 0.0;
  double dwell_density = 0.0;
  double phase_time = 0.0;
  double transmission = 0.0;
  double spectral_mass_excluded = 0.0;
  bool converged = false;
  int refinement_level = 0;
  RefinementReport refinement;
};

/// Tunnelling and reflection durations, both dwell-time forms (x_i = -a,
/// x_f = 2a), phase time over (0, a) and the transmission probability.
SingleSummary run_single(const ScenarioConfig& config, const RunOptions& options = {});

struct ProfileRow {
  double x_angstrom = 0.0;
  double tau_pen_s = 0.0;
  double dtau_pen_s2 = 0.0;
  double tau_ret_s = 0.0;
  double dtau_ret_s2 = 0.0;
  bool reliable_ret = false;
  int refinement_level = 0;

  bool operator==(const ProfileRow&) const = default;
};

struct Profile {
  std::vector<ProfileRow> rows;
  std::vector<bool> reliable_pen;
  bool converged = false;
  double spectral_mass_excluded = 0.0;
  RefinementReport refinement;
};

/// tau_Pen(0, x) and tau_Ret(x, x) on n_x uniform depths in [0, a]; one
/// refinement shared by all rows.
Profile run_profile(const ScenarioConfig& config, const RunOptions& options = {});

// ---------------------------------------------------------------------------

struct CurveSpec {
  int figure = 0;
  int curve = 0;
  double a_angstrom = 0.0;
  double ebar_ev = 0.0;
  double dk_inv_angstrom = 0.0;
};

/// Parameter lattice of the five figure bundles (V0 = 10 eV). Figure 5
/// curves 4-6 use dk = 0.04 at a = 5; curves 7-8 use a = 10.
std::vector<CurveSpec> figure_lattice();

struct FiguresConfig {
  double v0_ev = 10.0;
  std::optional<double> t_window_s;
  double tol = 1e-3;
  std::size_t n_x = 11;
  std::vector<int> figures{1, 2, 3, 4, 5};
};

/// Keys: v0_ev, t_window_s, tol, n_x, figures (comma-separated subset of 1-5).
FiguresConfig parse_figures_config(std::string_view text);

struct CurveResult {
  CurveSpec spec;
  Profile profile;
};

std::vector<CurveResult> run_figures(const FiguresConfig& config, const RunOptions& options = {});

/// Writes fig<N>.csv for each requested figure plus figures_manifest.csv.
/// Returns the written paths.
std::vector<std::filesystem::path> write_figures(const std::vector<CurveResult>& curves,
                                                 const std::filesystem::path& out_dir);

// ---------------------------------------------------------------------------
// CSV: comma separated, '.' decimal point, 9 significant digits.

std::string format_number(double v);
std::string profile_csv(const std::vector<ProfileRow>& rows);
std::vector<ProfileRow> parse_profile_csv(std::string_view text);
std::string single_csv(const ScenarioConfig& config, const SingleSummary& summary);

// ---------------------------------------------------------------------------

/// Runs `fn(i)` for i in [0, n) on up to `jobs` threads; results keep index order.
template <class Fn>
auto parallel_map(std::size_t n, unsigned jobs, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))>;

}  // namespace tunnel

#include "tunneltime/detail/parallel.hpp"

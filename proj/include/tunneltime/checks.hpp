#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tunneltime/scenario.hpp"

namespace tunnel {

enum class CheckStatus { Pass, Fail, NotConverged };

std::string_view to_string(CheckStatus status);

struct CheckResult {
  std::string module;
  std::string id;
  std::string detail;      // what was measured, in words
  double measured = 0.0;
  double bound = 0.0;
  CheckStatus status = CheckStatus::Pass;
};

struct CheckOptions {
  FiguresConfig lattice;   // physics invariants run on these figures' curves
  RunOptions run;
  std::uint64_t seed = 20240611;
};

struct CheckReport {
  std::vector<CheckResult> results;

  bool all_passed() const;
  bool any_failed() const;
  bool any_not_converged() const;
  /// 0 all pass, 4 any failure, 3 non-converged entries without failures.
  int exit_code() const;
};

/// Runs every module invariant at desk scale.
CheckReport run_checks(const CheckOptions& options);

std::string report_json(const CheckReport& report);
std::string report_text(const CheckReport& report);

// Individual invariants, shared with the acceptance harness.

/// max | |r|^2 + |t|^2 - 1 | over random sub-barrier (k, V0, a).
double unitarity_defect(std::size_t samples, std::uint64_t seed);

/// max |rho_t + J_x| / max(|rho_t|, scale) over random (x, t) in and around
/// the barrier, scale being the largest |rho_t| in the sample.
double continuity_residual(const WavePacket& packet, double t_spread, std::size_t samples, std::uint64_t seed);

/// Relative error of <t+(x)> - <t+(0)> against x / v for a free packet.
std::vector<double> free_arrival_errors(double ebar_ev, double dk, const std::vector<double>& xs,
                                        const RunOptions& run = {});

/// Relative variation (max - min) / min of reliable tau_Ret rows on [0, 0.6 a].
double return_plateau_variation(const Profile& profile, double a);

/// Mean slope of tau_Pen over the last quarter of (0, a) divided by the
/// mean slope over the first quarter.
double saturation_ratio(const Profile& profile);

/// Largest decrease between neighbouring tau_Pen rows, relative to the
/// largest |tau_Pen|, and the most negative tau_Pen (both <= 0 when fine).
struct MonotoneDefect {
  double worst_drop = 0.0;
  double most_negative = 0.0;
};
MonotoneDefect penetration_defect(const Profile& profile);

}  // namespace tunnel

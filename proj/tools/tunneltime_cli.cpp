// Command-line front end: single, profile, figures, check.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tunneltime/checks.hpp"
#include "tunneltime/errors.hpp"
#include "tunneltime/scenario.hpp"

namespace fs = std::filesystem;
using namespace tunnel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitInvariant = 4;

struct Flags {
  std::string config;
  std::string out;
  std::optional<double> tol;
  int max_levels = 8;
  unsigned jobs = 1;
};

RunOptions run_options(const Flags& f) {
  RunOptions o;
  o.tol = f.tol;
  o.max_levels = f.max_levels;
  o.jobs = f.jobs;
  return o;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::optional<fs::path> output_file(const Flags& f, const ScenarioConfig& c, const char* name) {
  if (!f.out.empty()) return fs::path(f.out) / name;
  if (!c.output_path.empty()) return fs::path(c.output_path);
  return std::nullopt;
}

void print_levels(const RefinementReport& report) {
  for (const auto& l : report.levels) {
    std::fprintf(stderr, "  level %d: k_panels=%zu t_nodes=%zu%s", l.resolution.level, l.resolution.k_panels,
                 l.resolution.t_nodes, l.failed ? " failed (" : "");
    if (l.failed) {
      std::fprintf(stderr, "%s)\n", l.failure.c_str());
    } else {
      std::fprintf(stderr, " rel_change=%.3g\n", l.rel_change);
    }
  }
}

int cmd_single(const Flags& f) {
  const ScenarioConfig c = parse_config(read_file(f.config));
  const SingleSummary s = run_single(c, run_options(f));
  const std::string csv = single_csv(c, s);
  std::cout << csv;
  if (auto path = output_file(f, c, "single.csv")) write_file(*path, csv);
  if (!s.converged) {
    std::fprintf(stderr, "not converged after %zu levels\n", s.refinement.levels.size());
    print_levels(s.refinement);
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_profile(const Flags& f) {
  const ScenarioConfig c = parse_config(read_file(f.config));
  const Profile p = run_profile(c, run_options(f));
  const std::string csv = profile_csv(p.rows);
  std::cout << csv;
  if (auto path = output_file(f, c, "profile.csv")) write_file(*path, csv);
  std::fprintf(stderr, "spectral mass excluded: %.3e\n", p.spectral_mass_excluded);
  if (!p.converged) {
    std::fprintf(stderr, "not converged after %zu levels\n", p.refinement.levels.size());
    print_levels(p.refinement);
    return kExitNotConverged;
  }
  return kExitOk;
}

FiguresConfig figures_config(const Flags& f) {
  return f.config.empty() ? FiguresConfig{} : parse_figures_config(read_file(f.config));
}

int cmd_figures(const Flags& f) {
  const FiguresConfig c = figures_config(f);
  const auto curves = run_figures(c, run_options(f));
  const auto written = write_figures(curves, f.out.empty() ? fs::path("figures") : fs::path(f.out));
  for (const auto& p : written) std::cout << p.string() << '\n';
  int status = kExitOk;
  for (const auto& curve : curves) {
    if (!curve.profile.converged) {
      std::fprintf(stderr, "figure %d curve %d did not converge\n", curve.spec.figure, curve.spec.curve);
      status = kExitNotConverged;
    }
  }
  return status;
}

int cmd_check(const Flags& f) {
  CheckOptions options;
  options.lattice = figures_config(f);
  options.run = run_options(f);
  const CheckReport report = run_checks(options);
  std::cout << report_text(report);
  if (!f.out.empty()) write_file(fs::path(f.out) / "check_report.json", report_json(report));
  return report.exit_code() == 4 ? kExitInvariant : report.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tunnelling-time statistics for Gaussian packets on a rectangular barrier"};
  app.require_subcommand(1);
  Flags flags;
  double tol = 0.0;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", flags.config, "key = value config file");
    if (config_required) opt->required();
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--tol", tol, "relative refinement tolerance (> 0)");
    sub->add_option("--max-levels", flags.max_levels, "maximum refinement levels")->check(CLI::Range(1, 30));
    sub->add_option("--jobs", flags.jobs, "worker threads for sweeps")->check(CLI::Range(1u, 256u));
  };
  auto* single = app.add_subcommand("single", "tunnelling, reflection, dwell and phase times for one scenario");
  auto* profile = app.add_subcommand("profile", "penetration and return durations over x in [0, a]");
  auto* figures = app.add_subcommand("figures", "CSV bundle for the figure parameter lattice");
  auto* check = app.add_subcommand("check", "run the invariant suite");
  add_common(single, true);
  add_common(profile, true);
  add_common(figures, false);
  add_common(check, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  for (auto* sub : {single, profile, figures, check}) {
    if (sub->parsed() && sub->count("--tol") > 0) {
      if (!(tol > 0.0)) {
        std::fprintf(stderr, "config error [--tol]: must be positive\n");
        return kExitConfig;
      }
      flags.tol = tol;
    }
  }

  try {
    if (single->parsed()) return cmd_single(flags);
    if (profile->parsed()) return cmd_profile(flags);
    if (figures->parsed()) return cmd_figures(flags);
    return cmd_check(flags);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitConfig;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNotConverged;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

#include "tunneltime/checks.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"

#include "tunneltime/errors.hpp"

namespace tunnel {

namespace {

struct Recorder {
  CheckReport report;

  void add(std::string module, std::string id, std::string detail, double measured, double bound, bool ok) {
    report.results.push_back({std::move(module), std::move(id), std::move(detail), measured, bound,
                              ok ? CheckStatus::Pass : CheckStatus::Fail});
  }
  void skip(std::string module, std::string id, std::string detail, double bound) {
    report.results.push_back({std::move(module), std::move(id), std::move(detail), NAN, bound,
                              CheckStatus::NotConverged});
  }
};

std::string curve_label(const CurveSpec& c) {
  std::ostringstream s;
  s << "a=" << c.a_angstrom << " E=" << c.ebar_ev << " dk=" << c.dk_inv_angstrom;
  return s.str();
}

ScenarioConfig scenario(double v0, double a, double ebar, double dk) {
  ScenarioConfig c;
  c.v0_ev = v0;
  c.a_angstrom = a;
  c.ebar_ev = ebar;
  c.dk_inv_angstrom = dk;
  return c;
}

double interpolate(const std::vector<ProfileRow>& rows, double x) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (x <= rows[i].x_angstrom) {
      const double x0 = rows[i - 1].x_angstrom, x1 = rows[i].x_angstrom;
      const double f = (x - x0) / (x1 - x0);
      return rows[i - 1].tau_pen_s + f * (rows[i].tau_pen_s - rows[i - 1].tau_pen_s);
    }
  }
  return rows.back().tau_pen_s;
}

bool same_files(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return fa && fb && sa.str() == sb.str();
}

}  // namespace

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotConverged: return "not_converged";
  }
  return "?";
}

bool CheckReport::any_failed() const {
  return std::any_of(results.begin(), results.end(), [](const auto& r) { return r.status == CheckStatus::Fail; });
}

bool CheckReport::any_not_converged() const {
  return std::any_of(results.begin(), results.end(),
                     [](const auto& r) { return r.status == CheckStatus::NotConverged; });
}

bool CheckReport::all_passed() const { return !any_failed() && !any_not_converged(); }

int CheckReport::exit_code() const {
  if (any_failed()) return 4;
  if (any_not_converged()) return 3;
  return 0;
}

// ---------------------------------------------------------------------------

double unitarity_defect(std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> v0_dist(0.5, 20.0), a_dist(0.1, 15.0), frac(1e-3, 1.0 - 1e-3);
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const BarrierSpec b{v0_dist(rng), a_dist(rng)};
    const auto amps = scattering_amplitudes(wavenumber_of(frac(rng) * b.v0), b);
    worst = std::max(worst, std::abs(std::norm(amps.r) + std::norm(amps.t) - 1.0));
  }
  return worst;
}

double continuity_residual(const WavePacket& packet, double t_spread, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double a = packet.barrier().a;
  const double v = packet.packet().mean_velocity();
  std::uniform_real_distribution<double> x_dist(-a, 2.0 * a), t_dist(-t_spread, t_spread);
  std::vector<double> rate, gradient;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = x_dist(rng);
    const double t = x / v + t_dist(rng);
    const FieldSample s = packet.evaluate(x, t);
    rate.push_back(s.density_rate());
    gradient.push_back(s.flux_gradient());
  }
  double scale = 0.0;
  for (double r : rate) scale = std::max(scale, std::abs(r));
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    worst = std::max(worst, std::abs(rate[i] + gradient[i]) / std::max(std::abs(rate[i]), scale));
  }
  return worst;
}

std::vector<double> free_arrival_errors(double ebar_ev, double dk, const std::vector<double>& xs,
                                        const RunOptions& run) {
  // a = 0 is the no-barrier configuration.
  ScenarioConfig c = scenario(2.0 * ebar_ev, 0.0, ebar_ev, dk);
  std::vector<double> positions{0.0};
  positions.insert(positions.end(), xs.begin(), xs.end());
  const double extent = *std::max_element(positions.begin(), positions.end());
  const double v = c.packet().mean_velocity();

  const PacketSpec packet = c.packet();
  const BarrierSpec barrier = c.barrier();
  auto task = [&](const Resolution& res) {
    const TimeGrid times = with_nodes(build_time_grid(packet, {c.t_window_s, std::nullopt}), res.t_nodes);
    const WavePacket wp(barrier, packet, build_k_grid(packet, barrier, res.k_panels));
    auto series = wp.flux_series(positions, times);
    LevelResult out;
    const auto origin = point_moments(split_flux(0.0, times, std::move(series[0])));
    for (std::size_t i = 1; i < positions.size(); ++i) {
      const auto m = point_moments(split_flux(positions[i], times, std::move(series[i])));
      out.values.push_back(m.plus.mean - origin.plus.mean);
    }
    return out;
  };
  const TimeGrid base_times = build_time_grid(packet);
  Resolution base = run.base.value_or(
      Resolution{1, default_k_panels(packet, barrier, 0.5 * base_times.window(), extent), base_times.n, 0});
  const auto report = refine_until_stable(task, base, {run.tol.value_or(1e-3), run.max_levels});
  const auto& values = report.final_level().values;
  std::vector<double> errors;
  for (std::size_t i = 0; i < xs.size(); ++i) errors.push_back(std::abs(values[i] - xs[i] / v) / (xs[i] / v));
  return errors;
}

double return_plateau_variation(const Profile& profile, double a) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& row : profile.rows) {
    if (row.x_angstrom > 0.6 * a * (1.0 + 1e-12) || !row.reliable_ret) continue;
    lo = std::min(lo, row.tau_ret_s);
    hi = std::max(hi, row.tau_ret_s);
  }
  if (!(lo <= hi)) return NAN;
  return (hi - lo) / std::abs(lo);
}

double saturation_ratio(const Profile& profile) {
  const auto& rows = profile.rows;
  const double a = rows.back().x_angstrom;
  const double first = (interpolate(rows, 0.25 * a) - rows.front().tau_pen_s) / (0.25 * a);
  const double last = (rows.back().tau_pen_s - interpolate(rows, 0.75 * a)) / (0.25 * a);
  return last / first;
}

MonotoneDefect penetration_defect(const Profile& profile) {
  MonotoneDefect d;
  double scale = 0.0;
  for (const auto& row : profile.rows) scale = std::max(scale, std::abs(row.tau_pen_s));
  for (std::size_t i = 0; i < profile.rows.size(); ++i) {
    d.most_negative = std::min(d.most_negative, profile.rows[i].tau_pen_s);
    if (i > 0) {
      const double drop = profile.rows[i - 1].tau_pen_s - profile.rows[i].tau_pen_s;
      if (scale > 0.0) d.worst_drop = std::max(d.worst_drop, drop / scale);
    }
  }
  return d;
}

// ---------------------------------------------------------------------------

CheckReport run_checks(const CheckOptions& options) {
  Recorder rec;
  const RunOptions& run = options.run;
  const double tol = run.tol.value_or(options.lattice.tol);

  // scatter_core --------------------------------------------------------------
  {
    const double defect = unitarity_defect(1000, options.seed);
    rec.add("scatter_core", "unitarity", "max ||r|^2+|t|^2-1| over 1000 random sub-barrier samples", defect, 1e-12,
            defect <= 1e-12);

    std::mt19937_64 rng(options.seed + 1);
    // Region I carries J as a difference 1 - |r|^2, so relative agreement at
    // 1e-10 needs |t|^2 well above machine epsilon: widths stay below 3 A.
    std::uniform_real_distribution<double> frac(0.02, 0.98), width(0.2, 3.0);
    double worst_flux = 0.0;
    for (int i = 0; i < 200; ++i) {
      const BarrierSpec b{10.0, width(rng)};
      const double k = wavenumber_of(frac(rng) * b.v0);
      const auto amps = scattering_amplitudes(k, b);
      const double reference = hbar_over_m() * k * std::norm(amps.t);
      for (double x : {-3.0, 0.3 * b.a, 0.7 * b.a, b.a + 2.0}) {
        const auto f = stationary_field(x, amps);
        const double j = hbar_over_m() * (std::conj(f.psi) * f.dpsi).imag();
        worst_flux = std::max(worst_flux, std::abs(j - reference) / reference);
      }
    }
    rec.add("scatter_core", "flux_constancy", "max relative spread of stationary J across regions I/II/III",
            worst_flux, 1e-10, worst_flux <= 1e-10);

    double worst_closed = 0.0;
    for (double e : {0.5, 1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5, 8.5, 9.5}) {
      for (double a : {1.0, 2.5, 5.0, 7.5, 10.0}) {
        const BarrierSpec b{10.0, a};
        const double k = wavenumber_of(e);
        const double solved = std::norm(scattering_amplitudes(k, b).t);
        const double closed = transmission_probability_closed_form(k, b);
        worst_closed = std::max(worst_closed, std::abs(solved - closed) / closed);
      }
    }
    rec.add("scatter_core", "closed_form", "max relative |t|^2 error vs sinh^2 formula, 50-point (E, a) lattice",
            worst_closed, 1e-12, worst_closed <= 1e-12);

    double worst_sym = 0.0;
    for (double v0 : {1.0, 4.0, 10.0, 17.0}) {
      const double k = std::sqrt(0.5 * v0 / kElectron.hbar2_over_2m);
      const double kappa = inside_wavenumber(k, {v0, 1.0});
      worst_sym = std::max(worst_sym, std::abs(kappa - k) / k);
    }
    rec.add("scatter_core", "half_height_symmetry", "max |kappa-k|/k at E = V0/2", worst_sym, 1e-15,
            worst_sym <= 1e-15);
  }

  // packet_field --------------------------------------------------------------
  {
    const ScenarioConfig c = scenario(10.0, 5.0, 5.0, 0.02);
    const Resolution res = default_resolution(c, 2.0 * c.a_angstrom);
    const Discretization d = discretize(c, res);
    const double ext = packet_extension(c.packet());
    const double residual = continuity_residual(d.packet, 3.0 * ext, 200, options.seed + 2);
    rec.add("packet_field", "continuity", "max |rho_t + J_x| / max(|rho_t|, scale) over 200 random (x, t)",
            residual, 1e-6, residual <= 1e-6);

    double imag = 0.0;
    std::mt19937_64 rng(options.seed + 3);
    std::uniform_real_distribution<double> xs(-5.0, 10.0), ts(-3.0 * ext, 3.0 * ext);
    bool identical = true;
    const Discretization twin = discretize(c, res);
    for (int i = 0; i < 100; ++i) {
      const double x = xs(rng), t = ts(rng);
      const FieldSample s = d.packet.evaluate(x, t);
      const Complex rho = std::conj(s.psi) * s.psi;
      const Complex j = Complex(0.0, hbar_over_m() / 2.0) * (s.psi * std::conj(s.dpsi_dx) - std::conj(s.psi) * s.dpsi_dx);
      imag = std::max(imag, std::abs(rho.imag()) / std::max(std::abs(rho), 1e-300));
      imag = std::max(imag, std::abs(j.imag()) / std::max(std::abs(j), 1e-300));
      const FieldSample u = twin.packet.evaluate(x, t);
      identical = identical && s.psi == u.psi && s.dpsi_dx == u.dpsi_dx && s.dpsi_dt == u.dpsi_dt;
    }
    rec.add("packet_field", "reality", "max imaginary residue of rho and J relative to magnitude", imag, 1e-14,
            imag <= 1e-14);
    rec.add("packet_field", "determinism", "bitwise equality of two independently built packets (0 = equal)",
            identical ? 0.0 : 1.0, 0.0, identical);

    const double norm_defect = std::abs(d.packet.spectral_norm() - 1.0);
    rec.add("packet_field", "normalization", "|2 pi sum w |G|^2 - 1| on the truncated grid", norm_defect, 1e-12,
            norm_defect <= 1e-12);

    // Direct x-integral of rho at t = 0 over +-10 packet widths.
    const double half = 10.0 / c.dk_inv_angstrom;
    const std::size_t n = 2 * static_cast<std::size_t>(std::ceil(half / 0.05)) + 1;
    const double h = 2.0 * half / static_cast<double>(n - 1);
    const auto w = simpson_weights(n, h);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += w[i] * d.packet.density(-half + static_cast<double>(i) * h, 0.0);
    rec.add("packet_field", "density_integral", "|int rho(x, 0) dx - 1|", std::abs(total - 1.0), 1e-3,
            std::abs(total - 1.0) <= 1e-3);
  }

  // quadrature_ctl ------------------------------------------------------------
  {
    const ScenarioConfig c = scenario(10.0, 5.0, 5.0, 0.02);
    const Resolution r1 = default_resolution(c, 5.0), r2 = default_resolution(c, 5.0);
    const auto g1 = build_k_grid(c.packet(), c.barrier(), r1.k_panels);
    const auto g2 = build_k_grid(c.packet(), c.barrier(), r2.k_panels);
    const auto t1 = build_time_grid(c.packet()), t2 = build_time_grid(c.packet());
    const bool same = r1.k_panels == r2.k_panels && r1.t_nodes == r2.t_nodes && g1.nodes == g2.nodes &&
                      g1.weights == g2.weights && g1.c_norm == g2.c_norm && t1.n == t2.n && t1.step == t2.step &&
                      t1.t_min == t2.t_min;
    rec.add("quadrature_ctl", "grid_determinism", "identical grids from identical configs (0 = equal)",
            same ? 0.0 : 1.0, 0.0, same);

    const Profile p = run_profile(c, run);
    bool doubling = true;
    const auto& levels = p.refinement.levels;
    for (std::size_t i = 1; i < levels.size(); ++i) {
      doubling = doubling && levels[i].resolution.k_panels == 2 * levels[i - 1].resolution.k_panels &&
                 levels[i].resolution.t_nodes == 2 * levels[i - 1].resolution.t_nodes;
    }
    rec.add("quadrature_ctl", "refinement_cost", "node counts double per level (0 = yes)", doubling ? 0.0 : 1.0, 0.0,
            doubling);

    if (!p.converged) {
      rec.skip("quadrature_ctl", "converged_invariance", "profile did not converge", tol);
    } else {
      RunOptions again = run;
      again.base = levels.back().resolution.refined();
      again.max_levels = 1;
      const Profile q = run_profile(c, again);
      double worst = 0.0;
      const auto& fin = levels.back();
      const auto& next = q.refinement.levels.back();
      for (std::size_t i = 0; i < fin.values.size(); ++i) {
        if (!fin.tracked[i] || !next.tracked[i] || fin.values[i] == next.values[i]) continue;
        worst = std::max(worst, std::abs(next.values[i] - fin.values[i]) / std::abs(next.values[i]));
      }
      rec.add("quadrature_ctl", "converged_invariance",
              "max relative change of a converged profile under one more level", worst, tol, worst <= tol);
    }
  }

  // chronostats: lattice profiles ----------------------------------------------
  std::vector<CurveResult> curves = run_figures(options.lattice, run);
  {
    std::map<std::string, const CurveResult*> unique;
    for (const auto& c : curves) unique.emplace(curve_label(c.spec), &c);

    for (const auto& [label, curve] : unique) {
      const Profile& p = curve->profile;
      if (!p.converged) {
        rec.skip("chronostats", "penetration_monotone[" + label + "]", "profile did not converge", 0.0);
        rec.skip("chronostats", "saturation[" + label + "]", "profile did not converge", 0.25);
        rec.skip("chronostats", "mean_ordering[" + label + "]", "profile did not converge", 0.0);
        continue;
      }
      const auto defect = penetration_defect(p);
      rec.add("chronostats", "penetration_monotone[" + label + "]",
              "largest relative decrease of tau_Pen between neighbouring depths", defect.worst_drop, 0.0,
              defect.worst_drop <= 0.0 && defect.most_negative >= 0.0);
      const double ratio = saturation_ratio(p);
      rec.add("chronostats", "saturation[" + label + "]", "last-quarter / first-quarter mean slope of tau_Pen", ratio,
              0.25, ratio <= 0.25);
      double most_negative = 0.0;
      for (const auto& row : p.rows) {
        if (row.reliable_ret) most_negative = std::min(most_negative, row.tau_ret_s);
      }
      rec.add("chronostats", "mean_ordering[" + label + "]", "most negative reliable <t->-<t+> inside the barrier (s)",
              most_negative, 0.0, most_negative >= 0.0);
    }

    for (const auto& c : curves) {
      if (c.spec.figure != 5) continue;
      const std::string id = "return_plateau[" + curve_label(c.spec) + "]";
      if (!c.profile.converged) {
        rec.skip("chronostats", id, "profile did not converge", 0.25);
        continue;
      }
      const double var = return_plateau_variation(c.profile, c.spec.a_angstrom);
      rec.add("chronostats", id, "(max-min)/min of reliable tau_Ret over [0, 0.6a]", var, 0.25, var <= 0.25);
    }
  }

  // chronostats: w normalisation on a barrier point
  {
    const ScenarioConfig c = scenario(10.0, 5.0, 5.0, 0.02);
    const Discretization d = discretize(c, default_resolution(c, 5.0));
    const double xs[] = {0.0, 2.5};
    auto series = d.packet.flux_series(xs, d.times);
    double worst = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      const FluxSeries f = split_flux(xs[i], d.times, std::move(series[i]));
      // w = J / int J_part dt; its positive part is w+ (or w- when the norm is negative).
      for (auto part : {SignedPart::Positive, SignedPart::Negative}) {
        const double norm = part_moments(f.j, d.times.t_min, d.times.step, part, 0.0)[0];
        if (norm == 0.0) continue;
        std::vector<double> w(f.j.size());
        for (std::size_t n = 0; n < w.size(); ++n) w[n] = f.j[n] / norm;
        const double integral = part_moments(w, d.times.t_min, d.times.step, SignedPart::Positive, 0.0)[0];
        worst = std::max(worst, std::abs(integral - 1.0));
      }
    }
    rec.add("chronostats", "weight_normalization", "max |int w dt - 1| for w+ and w- at x = 0, a/2", worst, 1e-12,
            worst <= 1e-12);
  }

  // chronostats: dwell equivalence and phase-time limits
  {
    std::vector<ScenarioConfig> grid;
    for (double e : {2.5, 5.0, 7.5}) {
      for (double dk : {0.01, 0.02, 0.04}) grid.push_back(scenario(10.0, 5.0, e, dk));
    }
    RunOptions inner = run;
    inner.jobs = 1;
    const auto singles =
        parallel_map(grid.size(), run.jobs, [&](std::size_t i) { return run_single(grid[i], inner); });
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::ostringstream id;
      id << "dwell_equivalence[E=" << grid[i].ebar_ev << " dk=" << grid[i].dk_inv_angstrom << "]";
      if (!singles[i].converged) {
        rec.skip("chronostats", id.str(), "run did not converge", 1e-3);
        continue;
      }
      const double rel = std::abs(singles[i].dwell_flux - singles[i].dwell_density) / std::abs(singles[i].dwell_density);
      rec.add("chronostats", id.str(), "|flux form - density form| / density form", rel, 1e-3, rel <= 1e-3);
    }

    const ScenarioConfig narrow = scenario(10.0, 5.0, 5.0, 0.005);
    const SingleSummary s = run_single(narrow, run);
    const double rel = std::abs(s.tunnelling.mean - s.phase_time) / s.phase_time;
    if (!s.converged) {
      rec.skip("chronostats", "quasi_monochromatic", "run did not converge", 0.05);
    } else {
      rec.add("chronostats", "quasi_monochromatic", "|tau_Tun - phase time| / phase time at dk = 0.005", rel, 0.05,
              rel <= 0.05);
    }

    const double k = narrow.packet().k_bar;
    const double kappa = inside_wavenumber(k, narrow.barrier());
    const double opaque = 2.0 / (hbar_over_m() * k * kappa);
    const double rel_opaque = std::abs(s.phase_time - opaque) / opaque;
    rec.add("chronostats", "phase_time_opaque", "|phase time - 2m/(hbar k kappa)| / asymptote", rel_opaque, 0.05,
            rel_opaque <= 0.05);
    const double p5 = phase_time(k, {10.0, 5.0}, 0.0, 5.0), p10 = phase_time(k, {10.0, 10.0}, 0.0, 10.0);
    const double rel_width = std::abs(p10 - p5) / p5;
    rec.add("chronostats", "phase_time_width", "|phase time(a=10) - phase time(a=5)| / phase time(a=5)", rel_width,
            0.02, rel_width <= 0.02);
  }

  // cli_runner ----------------------------------------------------------------
  {
    std::vector<ProfileRow> rows;
    for (const auto& c : curves) rows.insert(rows.end(), c.profile.rows.begin(), c.profile.rows.end());
    const auto once = parse_profile_csv(profile_csv(rows));
    const bool exact = parse_profile_csv(profile_csv(once)) == once && profile_csv(once) == profile_csv(rows);
    double quantization = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (auto [u, v] : {std::pair{rows[i].tau_pen_s, once[i].tau_pen_s}, std::pair{rows[i].tau_ret_s, once[i].tau_ret_s},
                          std::pair{rows[i].dtau_pen_s2, once[i].dtau_pen_s2}}) {
        if (u != 0.0) quantization = std::max(quantization, std::abs(u - v) / std::abs(u));
      }
    }
    rec.add("cli_runner", "csv_round_trip", "relative quantisation of one write/parse; later round trips exact",
            quantization, 5e-9, exact && quantization <= 5e-9 * (1.0 + 1e-9));

    const std::vector<std::pair<std::string, std::string>> bad = {
        {"a_angstrom = 5\nebar_ev = 5\ndk_inv_angstrom = 0.02\n", "v0_ev"},
        {"v0_ev = 10\na_angstrom = 5\nebar_ev = 5\ndk_inv_angstrom = 0.02\ncolour = red\n", "colour"},
        {"v0_ev = 10\nv0_ev = 11\na_angstrom = 5\nebar_ev = 5\ndk_inv_angstrom = 0.02\n", "v0_ev"},
        {"v0_ev = ten\na_angstrom = 5\nebar_ev = 5\ndk_inv_angstrom = 0.02\n", "v0_ev"},
        {"v0_ev = 10\na_angstrom = -5\nebar_ev = 5\ndk_inv_angstrom = 0.02\n", "a_angstrom"},
        {"v0_ev = 10\na_angstrom = 5\nebar_ev = 12\ndk_inv_angstrom = 0.02\n", "ebar_ev"},
        {"v0_ev = 0\na_angstrom = 5\nebar_ev = 5\ndk_inv_angstrom = 0.02\n", "v0_ev"},
        {"v0_ev = 10\na_angstrom = 5\nebar_ev = 5\ndk_inv_angstrom = 0\n", "dk_inv_angstrom"},
        {"v0_ev = 10\na_angstrom = 5\nebar_ev = 5\ndk_inv_angstrom = 0.02\nn_x = 1\n", "n_x"},
        {"v0_ev = 10\na_angstrom = 5\nebar_ev = 5\ndk_inv_angstrom = 0.02\nn_x = 3.5\n", "n_x"},
        {"v0_ev = 10\na_angstrom = 5\nebar_ev = 5\ndk_inv_angstrom = 0.02\ntol = 0\n", "tol"},
        {"v0_ev = 10\na_angstrom = 5\nebar_ev = 5\ndk_inv_angstrom = 0.02\nt_window_s = 1e-15\n", "t_window_s"},
        {"v0_ev = 10\na_angstrom = 5\nebar_ev 5\ndk_inv_angstrom = 0.02\n", ""},
    };
    int misses = 0;
    for (const auto& [text, key] : bad) {
      try {
        parse_config(text);
        ++misses;
      } catch (const ConfigError& e) {
        if (e.key() != key) ++misses;
      }
    }
    rec.add("cli_runner", "config_rejection", "malformed configs not rejected with the right key",
            static_cast<double>(misses), 0.0, misses == 0);

    const auto root = std::filesystem::temp_directory_path() /
                      ("tunneltime-check-" + std::to_string(std::random_device{}()));
    FiguresConfig small = options.lattice;
    small.figures = {1};
    const auto first = write_figures(run_figures(small, run), root / "a");
    const auto second = write_figures(run_figures(small, run), root / "b");
    bool identical = first.size() == second.size();
    for (std::size_t i = 0; identical && i < first.size(); ++i) identical = same_files(first[i], second[i]);
    std::filesystem::remove_all(root);
    rec.add("cli_runner", "output_determinism", "figure CSVs byte-identical across two runs (0 = yes)",
            identical ? 0.0 : 1.0, 0.0, identical);
  }

  return rec.report;
}

std::string report_json(const CheckReport& report) {
  nlohmann::ordered_json root;
  root["passed"] = report.all_passed();
  root["exit_code"] = report.exit_code();
  auto& list = root["checks"] = nlohmann::ordered_json::array();
  for (const auto& r : report.results) {
    nlohmann::ordered_json item;
    item["module"] = r.module;
    item["id"] = r.id;
    item["status"] = std::string(to_string(r.status));
    item["measured"] = std::isfinite(r.measured) ? nlohmann::ordered_json(r.measured) : nlohmann::ordered_json();
    item["bound"] = r.bound;
    item["detail"] = r.detail;
    list.push_back(std::move(item));
  }
  return root.dump(2) + "\n";
}

std::string report_text(const CheckReport& report) {
  std::ostringstream out;
  for (const auto& r : report.results) {
    char line[512];
    std::snprintf(line, sizeof line, "%-13s %-15s %-52s measured=%-14.6g bound=%.3g\n", std::string(to_string(r.status)).c_str(),
                  r.module.c_str(), r.id.c_str(), r.measured, r.bound);
    out << line;
  }
  return out.str();
}

}  // namespace tunnel

#include "tunneltime/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "tunneltime/errors.hpp"

namespace tunnel {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::map<std::string, Entry> parse_key_values(std::string_view text, const std::set<std::string>& allowed) {
  std::map<std::string, Entry> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("", line_no, "expected 'key = value', got '" + std::string(line) + "'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("", line_no, "missing key before '='");
    if (!allowed.contains(key)) throw ConfigError(key, line_no, "unknown key");
    if (value.empty()) throw ConfigError(key, line_no, "missing value");
    if (out.contains(key)) throw ConfigError(key, line_no, "key given twice (first at line " + std::to_string(out[key].line) + ")");
    out.emplace(key, Entry{value, line_no});
  }
  return out;
}

double to_double(const std::string& key, const Entry& e) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ConfigError(key, e.line, "'" + e.value + "' is not a finite number");
  }
  return v;
}

std::size_t to_count(const std::string& key, const Entry& e) {
  unsigned long long v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError(key, e.line, "'" + e.value + "' is not a non-negative integer");
  return static_cast<std::size_t>(v);
}

double positive(const std::string& key, const Entry& e) {
  const double v = to_double(key, e);
  if (!(v > 0.0)) throw ConfigError(key, e.line, "must be positive, got " + e.value);
  return v;
}

const std::set<std::string> kScenarioKeys{"v0_ev", "a_angstrom", "ebar_ev", "dk_inv_angstrom",
                                          "t_window_s", "tol", "n_x", "output_path"};

struct ParamKey {
  double a, ebar, dk;
  auto operator<=>(const ParamKey&) const = default;
};

MomentOptions default_moments() { return {}; }

std::string bool_field(bool b) { return b ? "1" : "0"; }

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void ScenarioConfig::validate() const {
  auto require_positive = [](const char* key, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, 0, "must be positive");
  };
  require_positive("v0_ev", v0_ev);
  require_positive("a_angstrom", a_angstrom);
  require_positive("ebar_ev", ebar_ev);
  require_positive("dk_inv_angstrom", dk_inv_angstrom);
  if (t_window_s) require_positive("t_window_s", *t_window_s);
  require_positive("tol", tol);
  if (n_x < 2) throw ConfigError("n_x", 0, "needs at least 2 positions");
  if (!(ebar_ev < v0_ev)) throw ConfigError("ebar_ev", 0, "mean energy must lie below v0_ev (sub-barrier packets only)");
  if (!(wavenumber_of(ebar_ev) < wavenumber_of(v0_ev) - kGuardWavenumber)) {
    throw ConfigError("ebar_ev", 0, "mean energy is too close to v0_ev");
  }
}

ScenarioConfig parse_config(std::string_view text) {
  const auto kv = parse_key_values(text, kScenarioKeys);
  for (const char* key : {"v0_ev", "a_angstrom", "ebar_ev", "dk_inv_angstrom"}) {
    if (!kv.contains(key)) throw ConfigError(key, 0, "required key is missing");
  }
  ScenarioConfig c;
  c.v0_ev = positive("v0_ev", kv.at("v0_ev"));
  c.a_angstrom = positive("a_angstrom", kv.at("a_angstrom"));
  c.ebar_ev = positive("ebar_ev", kv.at("ebar_ev"));
  c.dk_inv_angstrom = positive("dk_inv_angstrom", kv.at("dk_inv_angstrom"));
  if (auto it = kv.find("t_window_s"); it != kv.end()) c.t_window_s = positive(it->first, it->second);
  if (auto it = kv.find("tol"); it != kv.end()) c.tol = positive(it->first, it->second);
  if (auto it = kv.find("n_x"); it != kv.end()) {
    c.n_x = to_count(it->first, it->second);
    if (c.n_x < 2) throw ConfigError("n_x", it->second.line, "needs at least 2 positions");
  }
  if (auto it = kv.find("output_path"); it != kv.end()) c.output_path = it->second.value;
  if (!(c.ebar_ev < c.v0_ev)) {
    throw ConfigError("ebar_ev", kv.at("ebar_ev").line, "mean energy must lie below v0_ev (sub-barrier packets only)");
  }
  c.validate();
  // The time window has to cover the packet; surface that as a config error too.
  if (c.t_window_s) {
    try {
      build_time_grid(c.packet(), {c.t_window_s, std::nullopt});
    } catch (const ConfigError& e) {
      throw ConfigError("t_window_s", kv.at("t_window_s").line, e.what());
    }
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

FiguresConfig parse_figures_config(std::string_view text) {
  const auto kv = parse_key_values(text, {"v0_ev", "t_window_s", "tol", "n_x", "figures"});
  FiguresConfig c;
  if (auto it = kv.find("v0_ev"); it != kv.end()) c.v0_ev = positive(it->first, it->second);
  if (auto it = kv.find("t_window_s"); it != kv.end()) c.t_window_s = positive(it->first, it->second);
  if (auto it = kv.find("tol"); it != kv.end()) c.tol = positive(it->first, it->second);
  if (auto it = kv.find("n_x"); it != kv.end()) {
    c.n_x = to_count(it->first, it->second);
    if (c.n_x < 2) throw ConfigError("n_x", it->second.line, "needs at least 2 positions");
  }
  if (auto it = kv.find("figures"); it != kv.end()) {
    c.figures.clear();
    std::string_view rest = it->second.value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      const Entry e{std::string(item), it->second.line};
      const auto fig = to_count("figures", e);
      if (fig < 1 || fig > 5) throw ConfigError("figures", e.line, "figure numbers run from 1 to 5");
      c.figures.push_back(static_cast<int>(fig));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    std::sort(c.figures.begin(), c.figures.end());
    c.figures.erase(std::unique(c.figures.begin(), c.figures.end()), c.figures.end());
    if (c.figures.empty()) throw ConfigError("figures", it->second.line, "no figures selected");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Discretisation

Resolution default_resolution(const ScenarioConfig& config, double x_extent) {
  const PacketSpec packet = config.packet();
  const BarrierSpec barrier = config.barrier();
  const TimeGrid times = build_time_grid(packet, {config.t_window_s, std::nullopt});
  Resolution r;
  r.level = 1;
  r.k_panels = default_k_panels(packet, barrier, 0.5 * times.window(), x_extent);
  r.t_nodes = times.n;
  r.x_intervals = 0;
  return r;
}

Discretization discretize(const ScenarioConfig& config, const Resolution& res) {
  const PacketSpec packet = config.packet();
  const BarrierSpec barrier = config.barrier();
  const TimeGrid base = build_time_grid(packet, {config.t_window_s, std::nullopt});
  return {WavePacket(barrier, packet, build_k_grid(packet, barrier, res.k_panels)), with_nodes(base, res.t_nodes)};
}

std::vector<PointMoments> moments_at(const Discretization& d, std::span<const double> xs,
                                     const MomentOptions& options) {
  auto series = d.packet.flux_series(xs, d.times);
  std::vector<PointMoments> out;
  out.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out.push_back(point_moments(split_flux(xs[i], d.times, std::move(series[i])), options));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands

SingleSummary run_single(const ScenarioConfig& config, const RunOptions& options) {
  config.validate();
  const double a = config.a_angstrom;
  const double x_i = -a, x_f = 2.0 * a;
  Resolution base = options.base.value_or(default_resolution(config, x_f));
  if (base.x_intervals == 0) base.x_intervals = static_cast<std::size_t>(std::ceil((x_f - x_i) / 0.25));

  const double positions[] = {0.0, a};
  auto task = [&](const Resolution& res) {
    const Discretization d = discretize(config, res);
    const auto m = moments_at(d, positions, default_moments());
    const auto tun = compose_duration(DurationKind::Tunnelling, 0.0, a, m[0], m[1], a);
    const auto refl = compose_duration(DurationKind::Reflection, 0.0, 0.0, m[0], m[0], a);
    DwellOptions dwell;
    dwell.x_step = (x_f - x_i) / static_cast<double>(res.x_intervals);
    const double by_flux = dwell_time_flux(d.packet, x_i, x_f, d.times, dwell);
    const double by_density = dwell_time_density(d.packet, x_i, x_f, d.times, dwell);
    LevelResult out;
    out.values = {tun.mean, tun.variance, refl.mean, refl.variance, by_flux, by_density,
                  d.packet.transmission_probability(), d.packet.grid().excluded_mass,
                  tun.reliable ? 1.0 : 0.0, refl.reliable ? 1.0 : 0.0};
    out.tracked = {tun.reliable, tun.reliable, refl.reliable, refl.reliable, true, true, false, false, false, false};
    return out;
  };

  SingleSummary s;
  s.refinement = refine_until_stable(task, base, {options.tol.value_or(config.tol), options.max_levels});
  const RefinementLevel& fin = s.refinement.final_level();
  const auto& v = fin.values;
  s.tunnelling = {DurationKind::Tunnelling, 0.0, a, v[0], v[1], v[8] != 0.0};
  s.reflection = {DurationKind::Reflection, 0.0, 0.0, v[2], v[3], v[9] != 0.0};
  s.dwell_x_i = x_i;
  s.dwell_x_f = x_f;
  s.dwell_flux = v[4];
  s.dwell_density = v[5];
  s.transmission = v[6];
  s.spectral_mass_excluded = v[7];
  s.phase_time = phase_time(config.packet().k_bar, config.barrier(), 0.0, a);
  s.converged = s.refinement.converged;
  s.refinement_level = fin.resolution.level;
  return s;
}

Profile run_profile(const ScenarioConfig& config, const RunOptions& options) {
  config.validate();
  const double a = config.a_angstrom;
  const auto xs = build_x_profile(config.barrier(), config.n_x);
  const Resolution base = options.base.value_or(default_resolution(config, a));

  auto task = [&](const Resolution& res) {
    const Discretization d = discretize(config, res);
    const auto m = moments_at(d, xs, default_moments());
    LevelResult out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto pen = compose_duration(DurationKind::Penetration, 0.0, xs[i], m[0], m[i], a);
      const auto ret = compose_duration(DurationKind::Return, xs[i], xs[i], m[i], m[i], a);
      out.values.insert(out.values.end(), {pen.mean, pen.variance, ret.mean, ret.variance});
      out.tracked.insert(out.tracked.end(), {pen.reliable, pen.reliable, ret.reliable, ret.reliable});
    }
    out.values.push_back(d.packet.grid().excluded_mass);
    out.tracked.push_back(false);
    return out;
  };

  Profile p;
  p.refinement = refine_until_stable(task, base, {options.tol.value_or(config.tol), options.max_levels});
  const RefinementLevel& fin = p.refinement.final_level();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ProfileRow row;
    row.x_angstrom = xs[i];
    row.tau_pen_s = fin.values[4 * i];
    row.dtau_pen_s2 = fin.values[4 * i + 1];
    row.tau_ret_s = fin.values[4 * i + 2];
    row.dtau_ret_s2 = fin.values[4 * i + 3];
    row.reliable_ret = fin.tracked[4 * i + 2];
    row.refinement_level = fin.resolution.level;
    p.rows.push_back(row);
    p.reliable_pen.push_back(fin.tracked[4 * i]);
  }
  p.spectral_mass_excluded = fin.values.back();
  p.converged = p.refinement.converged;
  return p;
}

std::vector<CurveSpec> figure_lattice() {
  return {
      {1, 1, 5.0, 5.0, 0.02},  {1, 2, 5.0, 5.0, 0.01},
      {2, 1, 10.0, 5.0, 0.01},
      {3, 1, 5.0, 2.5, 0.02},  {3, 2, 5.0, 5.0, 0.02},  {3, 3, 5.0, 7.5, 0.02},  {3, 4, 5.0, 5.0, 0.04},
      {4, 1, 5.0, 5.0, 0.02},  {4, 2, 5.0, 5.0, 0.04},  {4, 3, 10.0, 5.0, 0.02}, {4, 4, 10.0, 5.0, 0.04},
      {5, 1, 5.0, 2.5, 0.02},  {5, 2, 5.0, 5.0, 0.02},  {5, 3, 5.0, 7.5, 0.02},
      {5, 4, 5.0, 2.5, 0.04},  {5, 5, 5.0, 5.0, 0.04},  {5, 6, 5.0, 7.5, 0.04},
      {5, 7, 10.0, 5.0, 0.02}, {5, 8, 10.0, 5.0, 0.04},
  };
}

std::vector<CurveResult> run_figures(const FiguresConfig& config, const RunOptions& options) {
  std::vector<CurveSpec> curves;
  for (const auto& c : figure_lattice()) {
    if (std::find(config.figures.begin(), config.figures.end(), c.figure) != config.figures.end()) curves.push_back(c);
  }
  // Several figures share parameter sets; compute each set once.
  std::vector<ParamKey> unique;
  for (const auto& c : curves) {
    const ParamKey key{c.a_angstrom, c.ebar_ev, c.dk_inv_angstrom};
    if (std::find(unique.begin(), unique.end(), key) == unique.end()) unique.push_back(key);
  }
  RunOptions inner = options;
  inner.jobs = 1;
  const auto profiles = parallel_map(unique.size(), options.jobs, [&](std::size_t i) {
    ScenarioConfig sc;
    sc.v0_ev = config.v0_ev;
    sc.a_angstrom = unique[i].a;
    sc.ebar_ev = unique[i].ebar;
    sc.dk_inv_angstrom = unique[i].dk;
    sc.t_window_s = config.t_window_s;
    sc.tol = config.tol;
    sc.n_x = config.n_x;
    return run_profile(sc, inner);
  });
  std::vector<CurveResult> out;
  for (const auto& c : curves) {
    const ParamKey key{c.a_angstrom, c.ebar_ev, c.dk_inv_angstrom};
    const auto idx = static_cast<std::size_t>(std::find(unique.begin(), unique.end(), key) - unique.begin());
    out.push_back({c, profiles[idx]});
  }
  return out;
}

std::vector<std::filesystem::path> write_figures(const std::vector<CurveResult>& curves,
                                                 const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  std::set<int> figures;
  for (const auto& c : curves) figures.insert(c.spec.figure);

  for (int fig : figures) {
    std::vector<const CurveResult*> members;
    for (const auto& c : curves) {
      if (c.spec.figure == fig) members.push_back(&c);
    }
    const bool returns = fig == 5;
    std::ostringstream csv;
    bool first = true;
    for (const auto* c : members) {
      const std::string p = "c" + std::to_string(c->spec.curve) + "_";
      if (!first) csv << ',';
      first = false;
      csv << p << "x_angstrom,";
      if (returns) {
        csv << p << "tau_ret_s," << p << "dtau_ret_s2," << p << "reliable_ret,";
      } else {
        csv << p << "tau_pen_s," << p << "dtau_pen_s2,";
      }
      csv << p << "refinement_level";
    }
    csv << '\n';
    std::size_t n_rows = 0;
    for (const auto* c : members) n_rows = std::max(n_rows, c->profile.rows.size());
    for (std::size_t r = 0; r < n_rows; ++r) {
      first = true;
      for (const auto* c : members) {
        if (!first) csv << ',';
        first = false;
        if (r >= c->profile.rows.size()) {
          csv << (returns ? ",,,," : ",,,");
          continue;
        }
        const ProfileRow& row = c->profile.rows[r];
        csv << format_number(row.x_angstrom) << ',';
        if (returns) {
          csv << format_number(row.tau_ret_s) << ',' << format_number(row.dtau_ret_s2) << ','
              << bool_field(row.reliable_ret) << ',';
        } else {
          csv << format_number(row.tau_pen_s) << ',' << format_number(row.dtau_pen_s2) << ',';
        }
        csv << row.refinement_level;
      }
      csv << '\n';
    }
    const auto path = out_dir / ("fig" + std::to_string(fig) + ".csv");
    std::ofstream(path, std::ios::binary) << csv.str();
    written.push_back(path);
  }

  std::ostringstream manifest;
  manifest << "figure,curve,a_angstrom,ebar_ev,dk_inv_angstrom,converged,refinement_level,spectral_mass_excluded\n";
  for (const auto& c : curves) {
    const int level = c.profile.rows.empty() ? 0 : c.profile.rows.front().refinement_level;
    manifest << c.spec.figure << ',' << c.spec.curve << ',' << format_number(c.spec.a_angstrom) << ','
             << format_number(c.spec.ebar_ev) << ',' << format_number(c.spec.dk_inv_angstrom) << ','
             << bool_field(c.profile.converged) << ',' << level << ',' << format_number(c.profile.spectral_mass_excluded)
             << '\n';
  }
  const auto path = out_dir / "figures_manifest.csv";
  std::ofstream(path, std::ios::binary) << manifest.str();
  written.push_back(path);
  return written;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

namespace {
constexpr std::string_view kProfileHeader =
    "x_angstrom,tau_pen_s,dtau_pen_s2,tau_ret_s,dtau_ret_s2,reliable_ret,refinement_level";
}

std::string profile_csv(const std::vector<ProfileRow>& rows) {
  std::string out(kProfileHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += format_number(r.x_angstrom) + ',' + format_number(r.tau_pen_s) + ',' + format_number(r.dtau_pen_s2) + ',' +
           format_number(r.tau_ret_s) + ',' + format_number(r.dtau_ret_s2) + ',' + bool_field(r.reliable_ret) + ',' +
           std::to_string(r.refinement_level) + '\n';
  }
  return out;
}

std::vector<ProfileRow> parse_profile_csv(std::string_view text) {
  std::vector<ProfileRow> rows;
  std::size_t pos = 0;
  int line_no = 0;
  auto next_line = [&]() -> std::optional<std::string_view> {
    if (pos >= text.size()) return std::nullopt;
    const auto end = std::min(text.find('\n', pos), text.size());
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };
  const auto header = next_line();
  if (!header || *header != kProfileHeader) throw DomainError("profile CSV: unexpected header");
  while (auto line = next_line()) {
    if (line->empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line->find(',', start);
      fields.push_back(line->substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 7) throw DomainError("profile CSV line " + std::to_string(line_no) + ": expected 7 fields");
    auto number = [&](std::string_view f) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw DomainError("profile CSV line " + std::to_string(line_no) + ": bad number '" + std::string(f) + "'");
      }
      return v;
    };
    auto integer = [&](std::string_view f) {
      int v = 0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw DomainError("profile CSV line " + std::to_string(line_no) + ": bad integer '" + std::string(f) + "'");
      }
      return v;
    };
    ProfileRow r;
    r.x_angstrom = number(fields[0]);
    r.tau_pen_s = number(fields[1]);
    r.dtau_pen_s2 = number(fields[2]);
    r.tau_ret_s = number(fields[3]);
    r.dtau_ret_s2 = number(fields[4]);
    const int flag = integer(fields[5]);
    if (flag != 0 && flag != 1) throw DomainError("profile CSV: reliable_ret must be 0 or 1");
    r.reliable_ret = flag == 1;
    r.refinement_level = integer(fields[6]);
    rows.push_back(r);
  }
  return rows;
}

std::string single_csv(const ScenarioConfig& c, const SingleSummary& s) {
  std::string out =
      "v0_ev,a_angstrom,ebar_ev,dk_inv_angstrom,tau_tun_s,dtau_tun_s2,tau_r_s,dtau_r_s2,dwell_flux_s,"
      "dwell_density_s,phase_time_s,transmission,spectral_mass_excluded,reliable_tun,reliable_r,converged,"
      "refinement_level\n";
  const double values[] = {c.v0_ev,
                           c.a_angstrom,
                           c.ebar_ev,
                           c.dk_inv_angstrom,
                           s.tunnelling.mean,
                           s.tunnelling.variance,
                           s.reflection.mean,
                           s.reflection.variance,
                           s.dwell_flux,
                           s.dwell_density,
                           s.phase_time,
                           s.transmission,
                           s.spectral_mass_excluded};
  for (double v : values) out += format_number(v) + ',';
  out += bool_field(s.tunnelling.reliable) + ',' + bool_field(s.reflection.reliable) + ',' + bool_field(s.converged) +
         ',' + std::to_string(s.refinement_level) + '\n';
  return out;
}

}  // namespace tunnel

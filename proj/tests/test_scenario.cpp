#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "tunneltime/detail/parallel.hpp"
#include "tunneltime/errors.hpp"
#include "tunneltime/scenario.hpp"

using namespace tunnel;

namespace {

const char* kGood = "# reference barrier\nv0_ev = 10\na_angstrom = 5   # width\nebar_ev = 5\ndk_inv_angstrom = 0.02\n";

std::string rejected_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("config parsing") {
  const ScenarioConfig c = parse_config(kGood);
  CHECK(c.v0_ev == 10.0);
  CHECK(c.a_angstrom == 5.0);
  CHECK(c.ebar_ev == 5.0);
  CHECK(c.dk_inv_angstrom == 0.02);
  CHECK(c.tol == 1e-3);
  CHECK(c.n_x == 11);
  CHECK_FALSE(c.t_window_s.has_value());

  const ScenarioConfig d = parse_config(std::string(kGood) + "tol = 1e-4\nn_x = 21\nt_window_s = 3e-13\noutput_path = out.csv\n");
  CHECK(d.tol == 1e-4);
  CHECK(d.n_x == 21);
  CHECK(*d.t_window_s == 3e-13);
  CHECK(d.output_path == "out.csv");
}

TEST_CASE("config rejection names the key") {
  const std::string base = kGood;
  CHECK(rejected_key("a_angstrom = 5\nebar_ev = 5\ndk_inv_angstrom = 0.02\n") == "v0_ev");
  CHECK(rejected_key(base + "colour = red\n") == "colour");
  CHECK(rejected_key(base + "v0_ev = 11\n") == "v0_ev");
  CHECK(rejected_key("v0_ev = ten\na_angstrom = 5\nebar_ev = 5\ndk_inv_angstrom = 0.02\n") == "v0_ev");
  CHECK(rejected_key("v0_ev = 10\na_angstrom = -5\nebar_ev = 5\ndk_inv_angstrom = 0.02\n") == "a_angstrom");
  CHECK(rejected_key("v0_ev = 10\na_angstrom = 5\nebar_ev = 10\ndk_inv_angstrom = 0.02\n") == "ebar_ev");
  CHECK(rejected_key("v0_ev = 0\na_angstrom = 5\nebar_ev = 5\ndk_inv_angstrom = 0.02\n") == "v0_ev");
  CHECK(rejected_key("v0_ev = 10\na_angstrom = 5\nebar_ev = 5\ndk_inv_angstrom = nan\n") == "dk_inv_angstrom");
  CHECK(rejected_key(base + "n_x = 1\n") == "n_x");
  CHECK(rejected_key(base + "n_x = -3\n") == "n_x");
  CHECK(rejected_key(base + "tol = 0\n") == "tol");
  CHECK(rejected_key(base + "tol =\n") == "tol");
  CHECK(rejected_key(base + "t_window_s = 1e-15\n") == "t_window_s");
  CHECK(rejected_key(base + "just some words\n") == "");

  try {
    parse_config(base + "colour = red\n");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 6);
  }
}

TEST_CASE("figures config") {
  const FiguresConfig all = parse_figures_config("");
  CHECK(all.figures == std::vector<int>{1, 2, 3, 4, 5});
  const FiguresConfig some = parse_figures_config("figures = 5, 3\nn_x = 6\n");
  CHECK(some.figures == std::vector<int>{3, 5});
  CHECK(some.n_x == 6);
  CHECK_THROWS_AS(parse_figures_config("figures = 6\n"), ConfigError);
  CHECK_THROWS_AS(parse_figures_config("a_angstrom = 5\n"), ConfigError);
}

TEST_CASE("figure lattice") {
  const auto lattice = figure_lattice();
  std::map<int, int> counts;
  for (const auto& c : lattice) counts[c.figure]++;
  CHECK(counts[1] == 2);
  CHECK(counts[2] == 1);
  CHECK(counts[3] == 4);
  CHECK(counts[4] == 4);
  CHECK(counts[5] == 8);
  for (const auto& c : lattice) {
    if (c.figure == 5 && c.curve >= 7) {
      CHECK(c.a_angstrom == 10.0);
      CHECK(c.ebar_ev == 5.0);
    }
    if (c.figure == 5 && c.curve >= 4 && c.curve <= 6) CHECK(c.dk_inv_angstrom == 0.04);
  }
}

TEST_CASE("CSV") {
  std::vector<ProfileRow> rows = {{0.0, 0.0, 3.05266660123e-30, 4.72230601e-15, 3.0509772e-30, true, 2},
                                  {0.5, 4.589031901234e-18, 3.05e-30, -8.53704526e-17, 3.5e-30, false, 2}};
  const std::string text = profile_csv(rows);
  CHECK(text.rfind("x_angstrom,tau_pen_s,dtau_pen_s2,tau_ret_s,dtau_ret_s2,reliable_ret,refinement_level\n", 0) == 0);
  const auto once = parse_profile_csv(text);
  REQUIRE(once.size() == 2);
  CHECK(once[1].tau_pen_s == doctest::Approx(rows[1].tau_pen_s).epsilon(5e-9));
  CHECK(once[1].reliable_ret == false);
  CHECK(parse_profile_csv(profile_csv(once)) == once);
  CHECK(profile_csv(once) == text);
  CHECK(format_number(1.0) == "1.00000000e+00");
  CHECK(format_number(-2.5e-15) == "-2.50000000e-15");
  CHECK_THROWS(parse_profile_csv("x,y\n1,2\n"));
  CHECK_THROWS(parse_profile_csv(text + "1,2,3\n"));
}

TEST_CASE("profile on the reference barrier") {
  const ScenarioConfig c = parse_config(std::string(kGood) + "n_x = 6\n");
  const Profile p = run_profile(c);
  REQUIRE(p.rows.size() == 6);
  CHECK(p.converged);
  CHECK(p.rows[0].tau_pen_s == 0.0);
  for (std::size_t i = 1; i < p.rows.size(); ++i) {
    CHECK(p.rows[i].x_angstrom > p.rows[i - 1].x_angstrom);
    CHECK(p.rows[i].tau_pen_s >= p.rows[i - 1].tau_pen_s);
    CHECK(p.rows[i].refinement_level == p.rows[0].refinement_level);
  }
  CHECK(p.rows[0].reliable_ret);
  CHECK(p.spectral_mass_excluded < 1e-10);

  RunOptions once;
  once.max_levels = 1;
  const Profile coarse = run_profile(c, once);
  CHECK_FALSE(coarse.converged);
  CHECK(coarse.rows.size() == 6);
}

TEST_CASE("single scenario summary") {
  const ScenarioConfig c = parse_config(kGood);
  const SingleSummary s = run_single(c);
  CHECK(s.converged);
  CHECK(s.tunnelling.mean > 0.0);
  CHECK(s.reflection.mean > s.tunnelling.mean);
  CHECK(s.dwell_density == doctest::Approx(s.dwell_flux).epsilon(1e-3));
  CHECK(s.transmission == doctest::Approx(4.3e-5).epsilon(0.05));
  CHECK(s.dwell_x_i == -5.0);
  CHECK(s.dwell_x_f == 10.0);
  const std::string csv = single_csv(c, s);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("figure files") {
  FiguresConfig fc;
  fc.figures = {1};
  fc.n_x = 3;
  const auto curves = run_figures(fc);
  REQUIRE(curves.size() == 2);
  const auto dir = std::filesystem::temp_directory_path() / "tunneltime-test-figures";
  std::filesystem::remove_all(dir);
  const auto written = write_figures(curves, dir);
  REQUIRE(written.size() == 2);
  std::ifstream in(dir / "fig1.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "c1_x_angstrom,c1_tau_pen_s,c1_dtau_pen_s2,c1_refinement_level,"
        "c2_x_angstrom,c2_tau_pen_s,c2_dtau_pen_s2,c2_refinement_level");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 3);
  CHECK(std::filesystem::exists(dir / "figures_manifest.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("parallel map keeps order and forwards errors") {
  const auto squares = parallel_map(17, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < squares.size(); ++i) CHECK(squares[i] == static_cast<int>(i * i));
  CHECK_THROWS_AS(parallel_map(5, 2,
                               [](std::size_t i) {
                                 if (i == 3) throw DomainError("boom");
                                 return 0;
                               }),
                  DomainError);
}

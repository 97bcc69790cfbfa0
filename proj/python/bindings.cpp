#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tunneltime/checks.hpp"
#include "tunneltime/errors.hpp"
#include "tunneltime/scenario.hpp"

namespace py = pybind11;
using namespace tunnel;

namespace {

py::dict duration_dict(const DurationReport& d) {
  py::dict out;
  out["kind"] = std::string(to_string(d.kind));
  out["x_i"] = d.x_i;
  out["x_f"] = d.x_f;
  out["mean"] = d.mean;
  out["variance"] = d.variance;
  out["reliable"] = d.reliable;
  return out;
}

py::dict summary_dict(const SingleSummary& s) {
  py::dict out;
  out["tunnelling"] = duration_dict(s.tunnelling);
  out["reflection"] = duration_dict(s.reflection);
  out["dwell_x_i"] = s.dwell_x_i;
  out["dwell_x_f"] = s.dwell_x_f;
  out["dwell_flux"] = s.dwell_flux;
  out["dwell_density"] = s.dwell_density;
  out["phase_time"] = s.phase_time;
  out["transmission"] = s.transmission;
  out["spectral_mass_excluded"] = s.spectral_mass_excluded;
  out["converged"] = s.converged;
  out["refinement_level"] = s.refinement_level;
  return out;
}

RunOptions options(std::optional<double> tol, int max_levels, unsigned jobs) {
  RunOptions o;
  o.tol = tol;
  o.max_levels = max_levels;
  o.jobs = jobs;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tunnelling-time statistics for Gaussian wave packets on a rectangular barrier";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<OverBarrierComponent>(m, "OverBarrierComponent", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<WindowTooNarrow>(m, "WindowTooNarrow", base.ptr());
  py::register_exception<UnreliableStatistic>(m, "UnreliableStatistic", base.ptr());

  m.attr("HBAR") = kElectron.hbar;
  m.attr("HBAR2_OVER_2M") = kElectron.hbar2_over_2m;
  m.def("energy_of", &energy_of, py::arg("k"));
  m.def("wavenumber_of", &wavenumber_of, py::arg("energy"));

  py::class_<BarrierSpec>(m, "BarrierSpec")
      .def(py::init([](double v0, double a) {
             BarrierSpec b{v0, a};
             b.validate();
             return b;
           }),
           py::arg("v0"), py::arg("a"))
      .def_readonly("v0", &BarrierSpec::v0)
      .def_readonly("a", &BarrierSpec::a)
      .def_property_readonly("critical_wavenumber", &BarrierSpec::critical_wavenumber);

  py::class_<ScatteringAmplitudes>(m, "ScatteringAmplitudes")
      .def_readonly("k", &ScatteringAmplitudes::k)
      .def_readonly("kappa", &ScatteringAmplitudes::kappa)
      .def_readonly("r", &ScatteringAmplitudes::r)
      .def_readonly("alpha", &ScatteringAmplitudes::alpha)
      .def_readonly("beta", &ScatteringAmplitudes::beta)
      .def_readonly("t", &ScatteringAmplitudes::t);

  m.def("inside_wavenumber", &inside_wavenumber, py::arg("k"), py::arg("barrier"));
  m.def("scattering_amplitudes", &scattering_amplitudes, py::arg("k"), py::arg("barrier"));
  m.def("transmission_probability", &transmission_probability_closed_form, py::arg("k"), py::arg("barrier"));
  m.def("phase_time", &phase_time, py::arg("k_bar"), py::arg("barrier"), py::arg("x_i"), py::arg("x_f"));

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init([](double v0_ev, double a_angstrom, double ebar_ev, double dk_inv_angstrom,
                       std::optional<double> t_window_s, double tol, std::size_t n_x) {
             ScenarioConfig c;
             c.v0_ev = v0_ev;
             c.a_angstrom = a_angstrom;
             c.ebar_ev = ebar_ev;
             c.dk_inv_angstrom = dk_inv_angstrom;
             c.t_window_s = t_window_s;
             c.tol = tol;
             c.n_x = n_x;
             c.validate();
             return c;
           }),
           py::arg("v0_ev"), py::arg("a_angstrom"), py::arg("ebar_ev"), py::arg("dk_inv_angstrom"),
           py::arg("t_window_s") = std::nullopt, py::arg("tol") = 1e-3, py::arg("n_x") = 11)
      .def_readonly("v0_ev", &ScenarioConfig::v0_ev)
      .def_readonly("a_angstrom", &ScenarioConfig::a_angstrom)
      .def_readonly("ebar_ev", &ScenarioConfig::ebar_ev)
      .def_readonly("dk_inv_angstrom", &ScenarioConfig::dk_inv_angstrom)
      .def_readonly("t_window_s", &ScenarioConfig::t_window_s)
      .def_readonly("tol", &ScenarioConfig::tol)
      .def_readonly("n_x", &ScenarioConfig::n_x);

  m.def("parse_config", &parse_config, py::arg("text"));

  m.def(
      "run_single",
      [](const ScenarioConfig& c, std::optional<double> tol, int max_levels) {
        SingleSummary s;
        {
          py::gil_scoped_release release;
          s = run_single(c, options(tol, max_levels, 1));
        }
        return summary_dict(s);
      },
      py::arg("config"), py::arg("tol") = std::nullopt, py::arg("max_levels") = 8);

  m.def(
      "run_profile",
      [](const ScenarioConfig& c, std::optional<double> tol, int max_levels) {
        Profile p;
        {
          py::gil_scoped_release release;
          p = run_profile(c, options(tol, max_levels, 1));
        }
        py::list rows;
        for (const auto& r : p.rows) {
          py::dict row;
          row["x_angstrom"] = r.x_angstrom;
          row["tau_pen_s"] = r.tau_pen_s;
          row["dtau_pen_s2"] = r.dtau_pen_s2;
          row["tau_ret_s"] = r.tau_ret_s;
          row["dtau_ret_s2"] = r.dtau_ret_s2;
          row["reliable_ret"] = r.reliable_ret;
          row["refinement_level"] = r.refinement_level;
          rows.append(row);
        }
        py::dict out;
        out["rows"] = rows;
        out["converged"] = p.converged;
        out["spectral_mass_excluded"] = p.spectral_mass_excluded;
        out["csv"] = profile_csv(p.rows);
        return out;
      },
      py::arg("config"), py::arg("tol") = std::nullopt, py::arg("max_levels") = 8);

  m.def("figure_lattice", []() {
    py::list out;
    for (const auto& c : figure_lattice()) {
      out.append(py::make_tuple(c.figure, c.curve, c.a_angstrom, c.ebar_ev, c.dk_inv_angstrom));
    }
    return out;
  });

  m.def(
      "write_figures",
      [](const std::filesystem::path& out_dir, std::vector<int> figures, std::size_t n_x, unsigned jobs) {
        FiguresConfig c;
        c.figures = std::move(figures);
        c.n_x = n_x;
        std::vector<std::filesystem::path> written;
        {
          py::gil_scoped_release release;
          written = write_figures(run_figures(c, options(std::nullopt, 8, jobs)), out_dir);
        }
        return written;
      },
      py::arg("out_dir"), py::arg("figures") = std::vector<int>{1, 2, 3, 4, 5}, py::arg("n_x") = 11,
      py::arg("jobs") = 1);

  m.def(
      "run_checks",
      [](unsigned jobs) {
        CheckOptions o;
        o.run.jobs = jobs;
        CheckReport r;
        {
          py::gil_scoped_release release;
          r = run_checks(o);
        }
        return report_json(r);
      },
      py::arg("jobs") = 1, "Full invariant suite; returns the JSON report.");
}

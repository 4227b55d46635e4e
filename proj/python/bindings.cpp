#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nldelta/bound_states.hpp"
#include "nldelta/config.hpp"
#include "nldelta/oracle.hpp"
#include "nldelta/scattering.hpp"
#include "nldelta/sweep.hpp"
#include "nldelta/validate.hpp"

namespace py = pybind11;
using namespace nldelta;

namespace {

// (c, z, alpha) triples
using CenterSpec = std::tuple<double, Complex, double>;

Incidence parse_incidence(const std::string& s) {
  if (s == "left") return Incidence::Left;
  if (s == "right") return Incidence::Right;
  throw ValidationError("incidence", "must be 'left' or 'right'");
}

ScatteringProblem make_problem(const std::vector<CenterSpec>& centers, double k, Complex amplitude,
                               const std::string& incidence) {
  std::vector<DeltaCenter> cs;
  for (const auto& [c, z, alpha] : centers) cs.push_back(DeltaCenter::power_law(c, z, alpha));
  return validate_and_sort(std::move(cs), k, amplitude, parse_incidence(incidence));
}

BoundProblem make_bound(const std::vector<std::tuple<double, double, double>>& centers) {
  std::vector<BoundCenter> cs;
  for (const auto& [c, omega, alpha] : centers) cs.push_back({c, omega, alpha});
  return validate_bound_problem(std::move(cs));
}

py::dict sweep_dict(const SweepResult& res) {
  std::vector<double> k, t2, r2, psi, residual;
  std::vector<int> branch;
  for (const auto& r : res.records) {
    k.push_back(r.k);
    branch.push_back(r.branch_index);
    t2.push_back(r.t_intensity);
    r2.push_back(r.r_intensity);
    psi.push_back(r.psi_cn_modulus);
    residual.push_back(r.residual);
  }
  py::dict d;
  d["k"] = k;
  d["branch"] = branch;
  d["T2"] = t2;
  d["R2"] = r2;
  d["psi_cN"] = psi;
  d["residual"] = residual;
  d["skipped_k"] = res.skipped_k;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Scattering branches and bound states of nonlinear delta-potential chains";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<NoBranchError>(m, "NoBranchError", base.ptr());
  py::register_exception<NoBoundStateError>(m, "NoBoundStateError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

  py::class_<ScatteringSolution>(m, "ScatteringSolution")
      .def_readonly("psi_at_centers", &ScatteringSolution::psi_at_centers)
      .def_readonly("reflection", &ScatteringSolution::reflection)
      .def_readonly("transmission", &ScatteringSolution::transmission)
      .def_readonly("branch_index", &ScatteringSolution::branch_index)
      .def_readonly("closure_residual", &ScatteringSolution::closure_residual)
      .def_readonly("psi_cn_modulus", &ScatteringSolution::psi_cn_modulus)
      .def_readonly("grazing", &ScatteringSolution::grazing)
      .def_property_readonly("T2", &ScatteringSolution::t_intensity)
      .def_property_readonly("R2", &ScatteringSolution::r_intensity)
      .def("__repr__", [](const ScatteringSolution& s) {
        return "<ScatteringSolution branch=" + std::to_string(s.branch_index) + " T2=" + std::to_string(s.t_intensity()) + ">";
      });

  py::class_<oracle::OracleBranch>(m, "OracleBranch")
      .def_readonly("psi_at_centers", &oracle::OracleBranch::psi_at_centers)
      .def_readonly("reflection", &oracle::OracleBranch::reflection)
      .def_readonly("transmission", &oracle::OracleBranch::transmission)
      .def_property_readonly("T2", &oracle::OracleBranch::t_intensity)
      .def_property_readonly("R2", &oracle::OracleBranch::r_intensity);

  py::class_<BoundStateSolution>(m, "BoundState")
      .def_readonly("nu", &BoundStateSolution::nu)
      .def_readonly("energy", &BoundStateSolution::energy)
      .def_readonly("psi_at_centers", &BoundStateSolution::psi_at_centers)
      .def_readonly("norm_residual", &BoundStateSolution::norm_residual)
      .def_readonly("branch_index", &BoundStateSolution::branch_index)
      .def_property_readonly("parity", [](const BoundStateSolution& s) { return to_string(s.parity); })
      .def("__repr__", [](const BoundStateSolution& s) {
        return "<BoundState nu=" + std::to_string(s.nu) + " parity=" + to_string(s.parity) + ">";
      });

  m.def(
      "solve_scattering",
      [](const std::vector<CenterSpec>& centers, double k, Complex amplitude, const std::string& incidence) {
        return solve_scattering(make_problem(centers, k, amplitude, incidence));
      },
      py::arg("centers"), py::arg("k"), py::arg("amplitude") = Complex(1.0, 0.0), py::arg("incidence") = "left",
      "All self-consistent branches. centers: list of (c, z, alpha).");

  m.def(
      "oracle_branches",
      [](const std::vector<CenterSpec>& centers, double k, Complex amplitude, const std::string& incidence) {
        return oracle::oracle_branches(make_problem(centers, k, amplitude, incidence));
      },
      py::arg("centers"), py::arg("k"), py::arg("amplitude") = Complex(1.0, 0.0), py::arg("incidence") = "left",
      "Branches from the transfer-matrix reference solver.");

  m.def(
      "single_delta_closed_form",
      [](Complex z, double alpha, double k, Complex amplitude) {
        return single_delta_closed_form(make_problem({{0.0, z, alpha}}, k, amplitude, "left"));
      },
      py::arg("z"), py::arg("alpha"), py::arg("k"), py::arg("amplitude") = Complex(1.0, 0.0));

  m.def("solve_single_bound", &solve_single_bound, py::arg("omega"), py::arg("alpha"), py::arg("c") = 0.0);
  m.def("solve_symmetric_double", &solve_symmetric_double, py::arg("omega"), py::arg("alpha"), py::arg("separation"));

  m.def(
      "solve_bound",
      [](const std::vector<std::tuple<double, double, double>>& centers) {
        const BoundReport rep = solve_bound(make_bound(centers));
        std::vector<std::string> notes;
        for (const auto& d : rep.diagnostics) notes.push_back(d.note);
        return py::make_tuple(to_string(rep.method), rep.states, notes);
      },
      py::arg("centers"), "(method, states, diagnostics). centers: list of (c, omega, alpha).");

  m.def(
      "lambert_w",
      [](double y, int branch) {
        if (branch != 0 && branch != -1) throw ValidationError("branch", "must be 0 or -1");
        return lambert_w(branch == 0 ? LambertBranch::Principal : LambertBranch::Lower, y);
      },
      py::arg("y"), py::arg("branch") = 0);

  m.def("preset_names", [] {
    std::vector<std::string> out;
    for (const auto& p : presets()) out.push_back(p.name);
    return out;
  });

  m.def(
      "sweep_preset",
      [](const std::string& name, int n, std::optional<double> k_min, std::optional<double> k_max, unsigned threads) {
        const Preset& p = find_preset(name);
        SweepSpec spec;
        spec.problem = p.config;
        spec.k_min = k_min.value_or(p.k_min);
        spec.k_max = k_max.value_or(p.k_max);
        spec.n_points = n;
        spec.validate();
        SweepResult res;
        {
          py::gil_scoped_release release;
          res = run_sweep(spec, threads);
        }
        return sweep_dict(res);
      },
      py::arg("name"), py::arg("n") = 400, py::arg("k_min") = py::none(), py::arg("k_max") = py::none(),
      py::arg("threads") = 0u, "Sweep a named preset; returns a dict of column lists.");

  m.def(
      "validate",
      [](int size, std::uint64_t seed, bool allow_singular) {
        ValidationReport rep;
        {
          py::gil_scoped_release release;
          rep = run_validation({size, seed, allow_singular});
        }
        py::dict cols;
        for (const auto& c : rep.columns) {
          py::dict d;
          d["max_deviation"] = c.max_deviation;
          d["tolerance"] = c.tolerance;
          d["failures"] = c.failures;
          cols[py::str(c.name)] = d;
        }
        py::dict out;
        out["passed"] = rep.passed();
        out["problems"] = rep.problems;
        out["columns"] = cols;
        out["failures"] = rep.failures;
        return out;
      },
      py::arg("size") = 50, py::arg("seed") = 7, py::arg("allow_singular") = false);
}

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "phaselab/config.hpp"
#include "phaselab/runner.hpp"

namespace py = pybind11;
using namespace phaselab;

namespace {

HamiltonianSpec make_spec(int dim, const std::vector<std::pair<double, Matrix>>& constant_segments,
                          const std::vector<std::pair<double, Matrix>>& pulses) {
    HamiltonianSpec spec;
    spec.dim = dim;
    for (const auto& [duration, h] : constant_segments)
        spec.segments.push_back(ConstantSegment{duration, h});
    for (const auto& [time, u] : pulses) spec.pulses.push_back(Pulse{time, u});
    return spec;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Mixed-state geometric phases of cyclic unitary evolutions";

    py::register_exception<Error>(m, "PhaseLabError");

    py::class_<SpectralDecomposition>(m, "SpectralDecomposition")
        .def_readonly("eigenvalues", &SpectralDecomposition::eigenvalues)
        .def_readonly("eigenvectors", &SpectralDecomposition::eigenvectors)
        .def_readonly("degenerate", &SpectralDecomposition::degenerate);

    py::class_<DensityOperator>(m, "DensityOperator")
        .def_readonly("matrix", &DensityOperator::matrix)
        .def_readonly("spectrum", &DensityOperator::spectrum);

    py::class_<ScalarUnitaryDistance>(m, "ScalarUnitaryDistance")
        .def_readonly("theta", &ScalarUnitaryDistance::theta)
        .def_readonly("dist", &ScalarUnitaryDistance::dist)
        .def_readonly("zero_trace", &ScalarUnitaryDistance::zero_trace);

    py::class_<TimeGrid>(m, "TimeGrid").def_readonly("nodes", &TimeGrid::nodes);

    py::class_<HamiltonianSpec>(m, "HamiltonianSpec")
        .def_readonly("dim", &HamiltonianSpec::dim)
        .def("total_duration", &HamiltonianSpec::total_duration);

    py::class_<PropagatorPath>(m, "PropagatorPath")
        .def_readonly("grid", &PropagatorPath::grid)
        .def_readonly("unitaries", &PropagatorPath::unitaries)
        .def("endpoint", &PropagatorPath::endpoint);

    py::class_<CyclicityReport>(m, "CyclicityReport")
        .def_readonly("state_residual", &CyclicityReport::state_residual)
        .def_readonly("commutator_residual", &CyclicityReport::commutator_residual)
        .def_readonly("cyclic", &CyclicityReport::cyclic);

    py::class_<GlobalCyclicityReport>(m, "GlobalCyclicityReport")
        .def_readonly("endpoint_distance", &GlobalCyclicityReport::endpoint_distance)
        .def_readonly("endpoint_global", &GlobalCyclicityReport::endpoint_global)
        .def_readonly("unwound_level_phases", &GlobalCyclicityReport::unwound_level_phases)
        .def_readonly("unwound_global", &GlobalCyclicityReport::unwound_global);

    py::class_<PhaseReport>(m, "PhaseReport")
        .def_readonly("phi_total", &PhaseReport::phi_total)
        .def_readonly("phi_total_principal", &PhaseReport::phi_total_principal)
        .def_readonly("phi_dyn", &PhaseReport::phi_dyn)
        .def_readonly("phi_geo", &PhaseReport::phi_geo)
        .def_readonly("phi_geo_oneform", &PhaseReport::phi_geo_oneform)
        .def_readonly("route_discrepancy", &PhaseReport::route_discrepancy)
        .def_readonly("cyclicity", &PhaseReport::cyclicity)
        .def_readonly("t", &PhaseReport::t)
        .def_readonly("phi_running", &PhaseReport::phi_running)
        .def_readonly("phi_dyn_running", &PhaseReport::phi_dyn_running)
        .def_readonly("beta_cumulative", &PhaseReport::beta_cumulative);

    py::enum_<BranchMode>(m, "BranchMode")
        .value("Anchored", BranchMode::Anchored)
        .value("Independent", BranchMode::Independent);

    py::class_<PerLevelPhases>(m, "PerLevelPhases")
        .def_readonly("weights", &PerLevelPhases::weights)
        .def_readonly("level_total", &PerLevelPhases::level_total)
        .def_readonly("level_dyn", &PerLevelPhases::level_dyn)
        .def_readonly("level_geo", &PerLevelPhases::level_geo)
        .def_readonly("branch_mode", &PerLevelPhases::branch_mode)
        .def_readonly("weighted_geo", &PerLevelPhases::weighted_geo)
        .def_readonly("weighted_dyn", &PerLevelPhases::weighted_dyn);

    py::enum_<GaugeKind>(m, "GaugeKind")
        .value("GlobalU1", GaugeKind::GlobalU1)
        .value("DiagonalNonAbelian", GaugeKind::DiagonalNonAbelian);

    py::enum_<ProfileShape>(m, "ProfileShape")
        .value("Linear", ProfileShape::Linear)
        .value("Smooth", ProfileShape::Smooth);

    py::class_<GaugeTransform>(m, "GaugeTransform")
        .def_readonly("alpha_profiles", &GaugeTransform::alpha_profiles)
        .def_readonly("windings", &GaugeTransform::windings)
        .def_readonly("kind", &GaugeTransform::kind);

    py::class_<GaugeClassification>(m, "GaugeClassification")
        .def_readonly("kind", &GaugeClassification::kind)
        .def_readonly("uniform_windings", &GaugeClassification::uniform_windings)
        .def_readonly("max_profile_spread", &GaugeClassification::max_profile_spread);

    py::class_<GaugeShiftReport>(m, "GaugeShiftReport")
        .def_readonly("phi_geo_before", &GaugeShiftReport::phi_geo_before)
        .def_readonly("phi_geo_after", &GaugeShiftReport::phi_geo_after)
        .def_readonly("observed_shift", &GaugeShiftReport::observed_shift)
        .def_readonly("observed_shift_mod", &GaugeShiftReport::observed_shift_mod)
        .def_readonly("predicted_shift", &GaugeShiftReport::predicted_shift)
        .def_readonly("congruence_residual", &GaugeShiftReport::congruence_residual)
        .def_readonly("endpoint_global_after", &GaugeShiftReport::endpoint_global_after)
        .def_readonly("unwound_global_after", &GaugeShiftReport::unwound_global_after);

    py::class_<PtDefect>(m, "PtDefect")
        .def_readonly("level_integrals", &PtDefect::level_integrals)
        .def_readonly("max_integral", &PtDefect::max_integral);

    py::class_<RunConfig>(m, "RunConfig")
        .def_readwrite("steps", &RunConfig::steps)
        .def_readwrite("report_path", &RunConfig::report_path)
        .def_readwrite("series_path", &RunConfig::series_path);

    m.def("validate_density", &validate_density, py::arg("matrix"), py::arg("tol") = 1e-10);
    m.def("eig_hermitian", &eig_hermitian, py::arg("matrix"), py::arg("tol") = 1e-10);
    m.def("exp_hermitian_generator", &exp_hermitian_generator, py::arg("matrix"), py::arg("dt"));
    m.def("scalar_unitary_distance", &scalar_unitary_distance, py::arg("unitary"));
    m.def(
        "unwind_phase",
        [](const std::vector<Complex>& samples, double min_mag) {
            return unwind_phase(samples, min_mag);
        },
        py::arg("samples"), py::arg("min_mag") = kUnwindMinMag);
    m.def("principal_angle", &principal_angle);

    m.def("make_spec", &make_spec, py::arg("dim"), py::arg("constant_segments"),
          py::arg("pulses") = std::vector<std::pair<double, Matrix>>{});
    m.def("build_grid", &build_grid, py::arg("spec"), py::arg("steps_per_unit_time"));
    m.def("propagate", &propagate, py::arg("spec"), py::arg("grid"));
    m.def("insert_pulse", &insert_pulse, py::arg("spec"), py::arg("time"), py::arg("pulse"));
    m.def("check_cyclic", &check_cyclic, py::arg("path"), py::arg("rho0"), py::arg("tol") = 1e-8);
    m.def("check_global_cyclic", &check_global_cyclic, py::arg("path"), py::arg("rho0"),
          py::arg("tol") = 1e-8);

    m.def(
        "total_phase",
        [](const PropagatorPath& path, const DensityOperator& rho0, double min_mag) {
            const TotalPhaseResult r = total_phase(path, rho0, min_mag);
            return py::make_tuple(r.phi, r.phi_running);
        },
        py::arg("path"), py::arg("rho0"), py::arg("min_mag") = kUnwindMinMag);
    m.def(
        "dynamical_phase",
        [](const PropagatorPath& path, const DensityOperator& rho0) {
            const DynamicalPhaseResult r = dynamical_phase(path, rho0);
            return py::make_tuple(r.phi_d, r.running);
        },
        py::arg("path"), py::arg("rho0"));
    m.def(
        "one_form",
        [](const PropagatorPath& path, const DensityOperator& rho0) {
            return one_form(path, rho0).betas;
        },
        py::arg("path"), py::arg("rho0"));
    m.def(
        "integrate_one_form",
        [](const std::vector<double>& betas) { return integrate_one_form(betas); },
        py::arg("betas"));
    m.def("geometric_phase", &geometric_phase, py::arg("path"), py::arg("rho0"),
          py::arg("tol_cyclic") = 1e-8, py::arg("allow_noncyclic") = false,
          py::arg("min_mag") = kUnwindMinMag);
    m.def("per_level_phases", &per_level_phases, py::arg("path"), py::arg("rho0"),
          py::arg("mode"), py::arg("min_mag") = kUnwindMinMag);

    m.def("build_diagonal_gauge", &build_diagonal_gauge, py::arg("basis"), py::arg("grid"),
          py::arg("windings"), py::arg("profile"));
    m.def("apply_gauge", &apply_gauge, py::arg("path"), py::arg("gauge"));
    m.def("classify_gauge", &classify_gauge, py::arg("gauge"), py::arg("tol") = 1e-9);
    m.def("gauge_shift_report", &gauge_shift_report, py::arg("path"), py::arg("rho0"),
          py::arg("gauge"));
    m.def("pt_defect", &pt_defect, py::arg("path"), py::arg("rho0"));
    m.def("parallel_transport_lift", &parallel_transport_lift, py::arg("path"), py::arg("rho0"));

    m.def("bloch_density",
          [](double r, double theta, double phi) { return bloch_density({r, theta, phi}); },
          py::arg("r"), py::arg("theta"), py::arg("phi") = 0.0);
    m.def("parse_config", &parse_config, py::arg("json_text"));
    m.def("dump_config", &dump_config, py::arg("config"));
    m.def("scenario_precession", &scenario_precession, py::arg("r"), py::arg("theta"),
          py::arg("omega"), py::arg("turns"));
    m.def("scenario_echo", &scenario_echo, py::arg("omega"), py::arg("tau"));
    m.def(
        "run",
        [](const RunConfig& config) {
            std::ostringstream err;
            const int code = run(config, err);
            return py::make_tuple(code, err.str());
        },
        py::arg("config"));
}

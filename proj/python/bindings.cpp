#include <optional>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vvc/central.hpp"
#include "vvc/control.hpp"
#include "vvc/graph_matrices.hpp"
#include "vvc/network.hpp"
#include "vvc/powerflow.hpp"
#include "vvc/scenario.hpp"
#include "vvc/stability.hpp"

namespace py = pybind11;
using namespace vvc;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Distribution-feeder volt/VAR control toolkit";

    py::register_exception<Error>(m, "VvcError", PyExc_RuntimeError);

    py::class_<Bus>(m, "Bus")
        .def(py::init<>())
        .def_readwrite("id", &Bus::id)
        .def_readwrite("p", &Bus::p)
        .def_readwrite("qc", &Bus::qc)
        .def_readwrite("q_min", &Bus::q_min)
        .def_readwrite("q_max", &Bus::q_max)
        .def_readwrite("c", &Bus::c)
        .def_readwrite("mu", &Bus::mu);

    py::class_<Line>(m, "Line")
        .def(py::init<>())
        .def_readwrite("from_bus", &Line::from)
        .def_readwrite("to_bus", &Line::to)
        .def_readwrite("r", &Line::r)
        .def_readwrite("x", &Line::x);

    py::class_<FeederNetwork>(m, "FeederNetwork")
        .def(py::init<std::vector<Bus>, std::vector<Line>, double, double, double>(),
             py::arg("buses"), py::arg("lines"), py::arg("v0") = 1.0,
             py::arg("s_base_mva") = 1.0, py::arg("v_base_kv") = 12.0)
        .def_static("from_json_file", &FeederNetwork::from_json_file)
        .def_static("from_json_text", &FeederNetwork::from_json_text)
        .def_property_readonly("n", &FeederNetwork::n)
        .def_property_readonly("n_lines", &FeederNetwork::n_lines)
        .def_property_readonly("meshed", &FeederNetwork::meshed)
        .def_property_readonly("v0", &FeederNetwork::v0)
        .def_property_readonly("s_base_mva", &FeederNetwork::s_base_mva)
        .def("injections_p", &FeederNetwork::injections_p)
        .def("loads_qc", &FeederNetwork::loads_qc)
        .def("q_lower", &FeederNetwork::q_lower)
        .def("q_upper", &FeederNetwork::q_upper)
        .def("penalties", &FeederNetwork::penalties)
        .def("targets", &FeederNetwork::targets);

    py::class_<GraphMatrices>(m, "GraphMatrices")
        .def_readonly("incidence", &GraphMatrices::incidence)
        .def_readonly("R", &GraphMatrices::R)
        .def_readonly("X", &GraphMatrices::X)
        .def_readonly("B", &GraphMatrices::B)
        .def_readonly("slack_gain", &GraphMatrices::slack_gain)
        .def_readonly("meshed", &GraphMatrices::meshed)
        .def_property_readonly("n", &GraphMatrices::n);

    m.def("graph_matrices", &graph_matrices, py::arg("net"));
    m.def("baseline_voltage", &baseline_voltage, py::arg("gm"), py::arg("p"), py::arg("qc"),
          py::arg("v0") = 1.0);
    m.def("solve_lindistflow", &solve_lindistflow, py::arg("gm"), py::arg("p"), py::arg("qc"),
          py::arg("q_g"), py::arg("v0") = 1.0);

    py::class_<AcSolution>(m, "AcSolution")
        .def_readonly("v_mag", &AcSolution::v_mag)
        .def_readonly("v_ang", &AcSolution::v_ang)
        .def_readonly("converged", &AcSolution::converged)
        .def_readonly("iterations", &AcSolution::iterations)
        .def_readonly("max_mismatch", &AcSolution::max_mismatch);

    m.def(
        "solve_acpf",
        [](const FeederNetwork& net, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
           double v0) { return solve_acpf(net, p, q, v0); },
        py::arg("net"), py::arg("p"), py::arg("q"), py::arg("v0") = 1.0);

    py::enum_<Scheme>(m, "Scheme")
        .value("GenericGP", Scheme::GenericGP)
        .value("Droop", Scheme::Droop)
        .value("Scaled", Scheme::Scaled)
        .value("Delayed", Scheme::Delayed);

    py::class_<ControlConfig>(m, "ControlConfig")
        .def_readonly("scheme", &ControlConfig::scheme)
        .def_readonly("c", &ControlConfig::c)
        .def_readonly("d", &ControlConfig::d)
        .def_readonly("epsilon", &ControlConfig::epsilon)
        .def_readonly("alpha", &ControlConfig::alpha)
        .def_readonly("q_min", &ControlConfig::q_min)
        .def_readonly("q_max", &ControlConfig::q_max)
        .def_readonly("mu", &ControlConfig::mu);

    m.def("make_droop", &make_droop);
    m.def("make_scaled", &make_scaled);
    m.def("make_delayed_droop", &make_delayed_droop);
    m.def("make_delayed_scaled", &make_delayed_scaled);
    m.def("make_generic", &make_generic);

    py::class_<ControlState>(m, "ControlState")
        .def(py::init<>())
        .def_readwrite("t", &ControlState::t)
        .def_readwrite("q", &ControlState::q)
        .def_readwrite("v", &ControlState::v);

    m.def("gradient", &gradient);
    m.def("project", &project);
    m.def("step", &step);

    py::enum_<Plant>(m, "Plant").value("Linear", Plant::Linear).value("Ac", Plant::Ac);

    py::class_<TraceRecord>(m, "TraceRecord")
        .def_readonly("tick", &TraceRecord::tick)
        .def_readonly("minute", &TraceRecord::minute)
        .def_readonly("mismatch_norm", &TraceRecord::mismatch_norm)
        .def_readonly("q", &TraceRecord::q)
        .def_readonly("v", &TraceRecord::v)
        .def_readonly("limits_hit", &TraceRecord::limits_hit);

    py::class_<LoopResult>(m, "LoopResult")
        .def_readonly("state", &LoopResult::state)
        .def_readonly("trace", &LoopResult::trace)
        .def_readonly("converged", &LoopResult::converged)
        .def_readonly("oscillating", &LoopResult::oscillating)
        .def_readonly("plant_diverged", &LoopResult::plant_diverged)
        .def_readonly("iterations", &LoopResult::iterations);

    m.def("run_closed_loop", &run_closed_loop, py::arg("net"), py::arg("gm"), py::arg("cfg"),
          py::arg("plant"), py::arg("max_iter") = 500, py::arg("tol") = 1e-8);

    py::class_<StabilityReport>(m, "StabilityReport")
        .def_readonly("scheme", &StabilityReport::scheme)
        .def_readonly("lambda_max_h", &StabilityReport::lambda_max_h)
        .def_readonly("stable", &StabilityReport::stable)
        .def_readonly("epsilon_bound", &StabilityReport::epsilon_bound)
        .def_readonly("alpha_bound", &StabilityReport::alpha_bound)
        .def_readonly("droop_pd_ok", &StabilityReport::droop_pd_ok)
        .def_readonly("alpha", &StabilityReport::alpha);

    m.def("h_matrix", &h_matrix);
    m.def("lambda_max_sym", &lambda_max_sym);
    m.def("scaled_epsilon_bound", &scaled_epsilon_bound);
    m.def("analyze", &analyze);

    py::enum_<central::Objective>(m, "Objective")
        .value("Unweighted", central::Objective::Unweighted)
        .value("Weighted", central::Objective::Weighted)
        .value("BenchmarkScaledIdentity", central::Objective::BenchmarkScaledIdentity);

    py::class_<central::QpProblem>(m, "QpProblem")
        .def_readonly("objective", &central::QpProblem::objective)
        .def_readonly("X", &central::QpProblem::X)
        .def_readonly("v_tilde", &central::QpProblem::v_tilde)
        .def_readonly("lambda_bar", &central::QpProblem::lambda_bar);

    py::class_<central::QpSolution>(m, "QpSolution")
        .def_readonly("q", &central::QpSolution::q)
        .def_readonly("iterations", &central::QpSolution::iterations)
        .def_readonly("residual", &central::QpSolution::residual);

    m.def("make_qp", &central::make_problem, py::arg("gm"), py::arg("v_tilde"), py::arg("c"),
          py::arg("q_min"), py::arg("q_max"), py::arg("objective") = central::Objective::Weighted,
          py::arg("zero_penalty") = false);
    m.def(
        "solve_qp",
        [](const central::QpProblem& prob, double tol, long max_iter,
           std::optional<Eigen::VectorXd> q0) {
            return central::solve(prob, tol, max_iter, q0 ? &*q0 : nullptr);
        },
        py::arg("prob"), py::arg("tol") = 1e-10, py::arg("max_iter") = 500000L,
        py::arg("q0") = std::nullopt);
    m.def("kkt_residual", &central::kkt_residual);
    m.def("qp_mismatch_norm", &central::mismatch_norm);

    py::class_<DailyProfile>(m, "DailyProfile")
        .def(py::init<>())
        .def_static("from_csv", &DailyProfile::from_csv)
        .def_readwrite("minutes", &DailyProfile::minutes)
        .def_readwrite("load_kw", &DailyProfile::load_kw)
        .def_readwrite("pv_kw", &DailyProfile::pv_kw)
        .def_property_readonly("size", &DailyProfile::size);

    py::class_<DynamicScenario>(m, "DynamicScenario")
        .def(py::init<>())
        .def_readwrite("profile", &DynamicScenario::profile)
        .def_readwrite("homes_per_bus", &DynamicScenario::homes_per_bus)
        .def_readwrite("pv_peak_kw", &DynamicScenario::pv_peak_kw)
        .def_readwrite("inverter_rating_factor", &DynamicScenario::inverter_rating_factor)
        .def_readwrite("control_period_s", &DynamicScenario::control_period_s)
        .def_readwrite("profile_period_s", &DynamicScenario::profile_period_s)
        .def_readwrite("load_q_ratio", &DynamicScenario::load_q_ratio);

    py::class_<DynamicControl> dctrl(m, "DynamicControl");
    py::enum_<DynamicControl::Mode>(dctrl, "Mode")
        .value("NoControl", DynamicControl::Mode::None)
        .value("Scaled", DynamicControl::Mode::Scaled)
        .value("DelayedDroop", DynamicControl::Mode::DelayedDroop);
    dctrl.def(py::init<>())
        .def_readwrite("mode", &DynamicControl::mode)
        .def_readwrite("c", &DynamicControl::c)
        .def_readwrite("epsilon", &DynamicControl::epsilon)
        .def_readwrite("alpha", &DynamicControl::alpha)
        .def_readwrite("droop_voltage_window", &DynamicControl::droop_voltage_window);

    py::class_<MinuteSummary>(m, "MinuteSummary")
        .def_readonly("minute", &MinuteSummary::minute)
        .def_readonly("mismatch_norm", &MinuteSummary::mismatch_norm)
        .def_readonly("v_min", &MinuteSummary::v_min)
        .def_readonly("v_max", &MinuteSummary::v_max)
        .def_readonly("limits_hit", &MinuteSummary::limits_hit);

    py::class_<DynamicResult>(m, "DynamicResult")
        .def_readonly("trace", &DynamicResult::trace)
        .def_readonly("minutes", &DynamicResult::minutes)
        .def_readonly("bus_v_min", &DynamicResult::bus_v_min)
        .def_readonly("bus_v_max", &DynamicResult::bus_v_max)
        .def_readonly("plant_diverged", &DynamicResult::plant_diverged);

    m.def("var_limits_at", &var_limits_at);
    m.def("run_static", &run_static, py::arg("net"), py::arg("gm"), py::arg("cfg"),
          py::arg("plant"), py::arg("max_iter") = 500, py::arg("tol") = 1e-8);
    m.def("run_dynamic", &run_dynamic, py::arg("net"), py::arg("gm"), py::arg("scen"),
          py::arg("ctrl"), py::arg("plant") = Plant::Ac);
    m.def("dynamic_summary_json", &dynamic_summary_json);
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "caes/bilinear.hpp"
#include "caes/params.hpp"
#include "caes/reference.hpp"
#include "caes/scheduler.hpp"
#include "caes/validation.hpp"

namespace py = pybind11;
using namespace caes;

PYBIND11_MODULE(_caes, m) {
    m.doc() = "Cavern thermodynamics, validation and MILP scheduling";

    py::class_<PlantConfig>(m, "PlantConfig")
        .def(py::init<>())
        .def_readwrite("V_s", &PlantConfig::V_s)
        .def_readwrite("A_c", &PlantConfig::A_c)
        .def_readwrite("c_v", &PlantConfig::c_v)
        .def_readwrite("R", &PlantConfig::R)
        .def_readwrite("k", &PlantConfig::k)
        .def_readwrite("T_RW", &PlantConfig::T_RW)
        .def_readwrite("T_in", &PlantConfig::T_in)
        .def_readwrite("p_in", &PlantConfig::p_in)
        .def_readwrite("h_a", &PlantConfig::h_a)
        .def_readwrite("h_b", &PlantConfig::h_b)
        .def_readwrite("rho_av", &PlantConfig::rho_av)
        .def_readwrite("mdot_in_max", &PlantConfig::mdot_in_max)
        .def_readwrite("mdot_out_max", &PlantConfig::mdot_out_max)
        .def_readwrite("p_min", &PlantConfig::p_min)
        .def_readwrite("p_max", &PlantConfig::p_max)
        .def_readwrite("P_ch_min", &PlantConfig::P_ch_min)
        .def_readwrite("P_ch_max", &PlantConfig::P_ch_max)
        .def_readwrite("P_dch_min", &PlantConfig::P_dch_min)
        .def_readwrite("P_dch_max", &PlantConfig::P_dch_max)
        .def_readwrite("C_ch", &PlantConfig::C_ch)
        .def_readwrite("C_dch", &PlantConfig::C_dch);

    py::class_<CavernState>(m, "CavernState")
        .def(py::init<>())
        .def(py::init([](double T, double p, double mass) { return CavernState{T, p, mass}; }), py::arg("T_s"),
             py::arg("p_s"), py::arg("m_s"))
        .def_readwrite("T_s", &CavernState::T_s)
        .def_readwrite("p_s", &CavernState::p_s)
        .def_readwrite("m_s", &CavernState::m_s)
        .def("__repr__", [](const CavernState& s) {
            std::ostringstream o;
            o << "CavernState(T_s=" << s.T_s << ", p_s=" << s.p_s << ", m_s=" << s.m_s << ")";
            return o.str();
        });

    py::class_<CoefficientSet>(m, "CoefficientSet")
        .def_readonly("dt", &CoefficientSet::dt)
        .def_readonly("a1", &CoefficientSet::a1)
        .def_readonly("a2", &CoefficientSet::a2)
        .def_readonly("a3", &CoefficientSet::a3)
        .def_readonly("l1", &CoefficientSet::l1)
        .def_readonly("l2", &CoefficientSet::l2)
        .def_readonly("l3", &CoefficientSet::l3)
        .def_readonly("l4", &CoefficientSet::l4)
        .def_readonly("m_av0", &CoefficientSet::m_av0);

    py::enum_<Mode>(m, "Mode")
        .value("charge", Mode::charge)
        .value("discharge", Mode::discharge)
        .value("idle", Mode::idle);
    py::enum_<Model>(m, "Model")
        .value("bilinear", Model::bilinear)
        .value("prelinear", Model::prelinear)
        .value("analytical", Model::analytical)
        .value("constant_T", Model::constant_T);

    py::class_<StepMode>(m, "StepMode")
        .def_readwrite("mode", &StepMode::mode)
        .def_readwrite("mdot", &StepMode::mdot)
        .def_static("charge", &StepMode::charge)
        .def_static("discharge", &StepMode::discharge)
        .def_static("idle", &StepMode::idle);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("dt", &Trajectory::dt)
        .def_readonly("initial", &Trajectory::initial)
        .def_readonly("modes", &Trajectory::modes)
        .def_readonly("states", &Trajectory::states);

    // invalid_argument and domain_error surface as ValueError
    m.def("huntorf_config", &huntorf_config);
    m.def("load_config", &load_config);
    m.def("resolved", &resolved);
    m.def("compute_coefficients", &compute_coefficients, py::arg("cfg"), py::arg("dt"));
    m.def("state_from_pT", &state_from_pT, py::arg("p"), py::arg("T"), py::arg("cfg"));
    m.def("ideal_gas_residual", &ideal_gas_residual);
    m.def("simulate",
          py::overload_cast<const CavernState&, const std::vector<StepMode>&, const PlantConfig&,
                            const CoefficientSet&, Model>(&simulate),
          py::arg("initial"), py::arg("modes"), py::arg("cfg"), py::arg("co"), py::arg("model") = Model::bilinear);
    m.def("analytical_step", &analytical_step);
    m.def("constant_temperature_step", &constant_temperature_step);

    py::class_<ScenarioSpec>(m, "ScenarioSpec")
        .def_readonly("label", &ScenarioSpec::label)
        .def_readonly("initial_p", &ScenarioSpec::initial_p)
        .def_readonly("initial_T", &ScenarioSpec::initial_T)
        .def_readonly("mode", &ScenarioSpec::mode)
        .def_readonly("duration", &ScenarioSpec::duration)
        .def_readwrite("dt", &ScenarioSpec::dt);
    py::class_<ComparisonReport>(m, "ComparisonReport")
        .def_readonly("mape_p", &ComparisonReport::mape_p)
        .def_readonly("mape_T", &ComparisonReport::mape_T)
        .def_readonly("mae_p", &ComparisonReport::mae_p)
        .def_readonly("mae_T", &ComparisonReport::mae_T)
        .def_readonly("n_points", &ComparisonReport::n_points);
    py::class_<EfficiencyReport>(m, "EfficiencyReport")
        .def_readonly("U_in", &EfficiencyReport::U_in)
        .def_readonly("U_out", &EfficiencyReport::U_out)
        .def_readonly("Q_wall", &EfficiencyReport::Q_wall)
        .def_readonly("delta_U_cavern", &EfficiencyReport::delta_U_cavern)
        .def_readonly("efficiency", &EfficiencyReport::efficiency)
        .def_readonly("closure", &EfficiencyReport::closure);

    m.def("table_scenarios", &table_scenarios);
    m.def("find_scenario", &find_scenario);
    m.def("run_scenario", &run_scenario);
    m.def("compare_states", &compare_states, py::arg("test"), py::arg("ref"));
    m.def("efficiency_audit", &efficiency_audit);
    m.def("balanced_day_cycle", &balanced_day_cycle, py::arg("cfg"), py::arg("charge_hours"),
          py::arg("discharge_hours"), py::arg("dt"));

    py::class_<PriceSeries>(m, "PriceSeries")
        .def(py::init<>())
        .def(py::init([](double dt, std::vector<double> tau) { return PriceSeries{dt, std::move(tau)}; }),
             py::arg("dt"), py::arg("tau"))
        .def_readwrite("dt", &PriceSeries::dt)
        .def_readwrite("tau", &PriceSeries::tau);
    m.def("two_peak_prices", &two_peak_prices, py::arg("n_t"), py::arg("dt"), py::arg("base") = 30.0,
          py::arg("peak") = 80.0, py::arg("hours") = 24.0);

    py::enum_<ScheduleModel>(m, "ScheduleModel")
        .value("model1_mibp", ScheduleModel::model1_mibp)
        .value("model2_milp", ScheduleModel::model2_milp)
        .value("model4_constT", ScheduleModel::model4_constT);
    py::enum_<TruthModel>(m, "TruthModel")
        .value("bilinear", TruthModel::bilinear)
        .value("analytical", TruthModel::analytical);

    py::class_<ScheduleOptions>(m, "ScheduleOptions")
        .def(py::init<>())
        .def_readwrite("initial", &ScheduleOptions::initial)
        .def_readwrite("segments", &ScheduleOptions::segments)
        .def_readwrite("rel_gap", &ScheduleOptions::rel_gap)
        .def_readwrite("time_limit", &ScheduleOptions::time_limit)
        .def_readwrite("node_limit", &ScheduleOptions::node_limit)
        .def_readwrite("terminal_mass", &ScheduleOptions::terminal_mass);
    py::class_<ScheduleSolution>(m, "ScheduleSolution")
        .def_readonly("dt", &ScheduleSolution::dt)
        .def_readonly("alpha", &ScheduleSolution::alpha)
        .def_readonly("beta", &ScheduleSolution::beta)
        .def_readonly("P_ch", &ScheduleSolution::P_ch)
        .def_readonly("P_dch", &ScheduleSolution::P_dch)
        .def_readonly("mdot_in", &ScheduleSolution::mdot_in)
        .def_readonly("mdot_out", &ScheduleSolution::mdot_out)
        .def_readonly("states", &ScheduleSolution::states)
        .def_readonly("objective", &ScheduleSolution::objective)
        .def_readonly("status", &ScheduleSolution::status)
        .def_readonly("gap", &ScheduleSolution::gap)
        .def_readonly("nodes", &ScheduleSolution::nodes);
    py::class_<FeasibilityReport>(m, "FeasibilityReport")
        .def_readonly("states", &FeasibilityReport::states)
        .def_readonly("worst_excursion", &FeasibilityReport::worst_excursion)
        .def_readonly("violations", &FeasibilityReport::violations)
        .def("ok", &FeasibilityReport::ok);

    m.def("solve_schedule", &solve_schedule, py::arg("cfg"), py::arg("prices"), py::arg("variant"),
          py::arg("opt") = ScheduleOptions{}, py::call_guard<py::gil_scoped_release>());
    m.def("oracle_enumerate", &oracle_enumerate, py::arg("cfg"), py::arg("prices"), py::arg("power_levels"),
          py::arg("opt") = ScheduleOptions{}, py::call_guard<py::gil_scoped_release>());
    m.def("schedule_profit", &schedule_profit);
    m.def("verify_schedule", &verify_schedule, py::arg("sol"), py::arg("cfg"),
          py::arg("truth") = TruthModel::bilinear);
}

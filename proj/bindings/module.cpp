#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pvbsim/csv_report.hpp"
#include "pvbsim/errors.hpp"
#include "pvbsim/scenario_io.hpp"
#include "pvbsim/sim_engine.hpp"

namespace py = pybind11;
using namespace pvbsim;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Grid-connected PV-battery DC microgrid simulator";

    py::register_exception<ParseError>(m, "ScenarioParseError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception<BusCollapseError>(m, "BusCollapseError", PyExc_RuntimeError);

    // --- pv array -----------------------------------------------------------
    py::class_<EnvConditions>(m, "EnvConditions")
        .def(py::init<double, double>(), py::arg("irradiance_w_m2") = 0.0,
             py::arg("cell_temperature_c") = 25.0)
        .def_readwrite("irradiance_w_m2", &EnvConditions::irradiance_w_m2)
        .def_readwrite("cell_temperature_c", &EnvConditions::cell_temperature_c);

    py::class_<PvParams>(m, "PvParams")
        .def(py::init<>())
        .def_static("calibrated", &PvParams::calibrated,
                    py::arg("rated_power_w") = 165e3, py::arg("cells_series") = 600)
        .def("validate", &PvParams::validate)
        .def_readwrite("photocurrent_stc_a", &PvParams::photocurrent_stc_a)
        .def_readwrite("saturation_current_a", &PvParams::saturation_current_a)
        .def_readwrite("series_resistance_ohm", &PvParams::series_resistance_ohm)
        .def_readwrite("shunt_resistance_ohm", &PvParams::shunt_resistance_ohm)
        .def_readwrite("ideality_factor", &PvParams::ideality_factor)
        .def_readwrite("thermal_voltage_stc_v", &PvParams::thermal_voltage_stc_v)
        .def_readwrite("cells_series", &PvParams::cells_series)
        .def_readwrite("strings_parallel", &PvParams::strings_parallel)
        .def_readwrite("current_temp_coeff_a_per_c",
                       &PvParams::current_temp_coeff_a_per_c);

    py::class_<PvOperatingPoint>(m, "PvOperatingPoint")
        .def_readonly("voltage_v", &PvOperatingPoint::voltage_v)
        .def_readonly("current_a", &PvOperatingPoint::current_a)
        .def_readonly("power_w", &PvOperatingPoint::power_w)
        .def("__repr__", [](const PvOperatingPoint& p) {
            return "PvOperatingPoint(V=" + std::to_string(p.voltage_v) +
                   ", I=" + std::to_string(p.current_a) +
                   ", P=" + std::to_string(p.power_w) + ")";
        });

    m.def("pv_current", &pv_current, py::arg("params"), py::arg("env"),
          py::arg("terminal_voltage_v"));
    m.def("pv_power_curve", &pv_power_curve, py::arg("params"), py::arg("env"),
          py::arg("v_min_v"), py::arg("v_max_v"), py::arg("n_points"));
    m.def("true_mpp", &true_mpp, py::arg("params"), py::arg("env"));
    m.def("open_circuit_voltage", &open_circuit_voltage, py::arg("params"),
          py::arg("env"));

    // --- pv controller -------------------------------------------------------
    py::enum_<PvControlMode::Kind>(m, "PvModeKind")
        .value("Mppt", PvControlMode::Kind::Mppt)
        .value("PowerReference", PvControlMode::Kind::PowerReference);

    py::class_<PvControlMode>(m, "PvControlMode")
        .def_static("mppt", &PvControlMode::mppt)
        .def_static("power_reference", &PvControlMode::power_reference,
                    py::arg("p_ref_w"))
        .def_readonly("kind", &PvControlMode::kind)
        .def_readonly("p_ref_w", &PvControlMode::p_ref_w);

    py::class_<MpptState>(m, "MpptState")
        .def(py::init<>())
        .def_readwrite("v_ref_v", &MpptState::v_ref_v)
        .def_readwrite("prev_voltage_v", &MpptState::prev_voltage_v)
        .def_readwrite("prev_current_a", &MpptState::prev_current_a)
        .def_readwrite("step_size_v", &MpptState::step_size_v)
        .def_readwrite("update_period_s", &MpptState::update_period_s)
        .def_readwrite("v_oc_estimate_v", &MpptState::v_oc_estimate_v)
        .def_readwrite("v_mpp_estimate_v", &MpptState::v_mpp_estimate_v);

    py::class_<ConverterState>(m, "ConverterState")
        .def(py::init<>())
        .def_readwrite("terminal_voltage_v", &ConverterState::terminal_voltage_v)
        .def_readwrite("tracking_time_constant_s",
                       &ConverterState::tracking_time_constant_s)
        .def_readwrite("efficiency", &ConverterState::efficiency);

    m.def("incond_step", &incond_step, py::arg("state"), py::arg("measured"));
    m.def(
        "incond_step",
        [](const MpptState& s, double v, double i) {
            return incond_step(s, {v, i, v * i});
        },
        py::arg("state"), py::arg("voltage_v"), py::arg("current_a"));
    m.def(
        "curtail_step",
        [](const MpptState& s, double v, double i, double p_ref_w, double gain) {
            return curtail_step(s, {v, i, v * i}, p_ref_w, gain);
        },
        py::arg("state"), py::arg("voltage_v"), py::arg("current_a"),
        py::arg("p_ref_w"), py::arg("controller_gain_v_per_w"));
    m.def("converter_advance", &converter_advance, py::arg("conv"),
          py::arg("v_ref_v"), py::arg("dt_s"));

    // --- battery -------------------------------------------------------------
    py::class_<BatteryParams>(m, "BatteryParams")
        .def(py::init<>())
        .def("validate", &BatteryParams::validate)
        .def_readwrite("capacity_kwh", &BatteryParams::capacity_kwh)
        .def_readwrite("soc_max", &BatteryParams::soc_max)
        .def_readwrite("soc_min", &BatteryParams::soc_min)
        .def_readwrite("p_charge_max_kw", &BatteryParams::p_charge_max_kw)
        .def_readwrite("p_discharge_max_kw", &BatteryParams::p_discharge_max_kw)
        .def_readwrite("efficiency_charge", &BatteryParams::efficiency_charge)
        .def_readwrite("efficiency_discharge", &BatteryParams::efficiency_discharge)
        .def_readwrite("tracking_time_constant_s",
                       &BatteryParams::tracking_time_constant_s)
        .def_readwrite("soc_hysteresis", &BatteryParams::soc_hysteresis);

    py::class_<BatteryState>(m, "BatteryState")
        .def(py::init<>())
        .def_readwrite("soc", &BatteryState::soc)
        .def_readonly("p_bat_kw", &BatteryState::p_bat_kw)
        .def_readonly("p_ref_kw", &BatteryState::p_ref_kw);

    m.def("battery_advance", &battery_advance, py::arg("state"), py::arg("params"),
          py::arg("p_ref_kw"), py::arg("dt_s"));

    // --- ems -----------------------------------------------------------------
    py::enum_<CaseLabel>(m, "CaseLabel")
        .value("Case1", CaseLabel::Case1)
        .value("Case2", CaseLabel::Case2)
        .value("Case3", CaseLabel::Case3)
        .value("Case4", CaseLabel::Case4)
        .value("Case5", CaseLabel::Case5)
        .value("Other", CaseLabel::Other);

    py::class_<GridRequest>(m, "GridRequest")
        .def(py::init<>())
        .def_static("absorb_max_request", &GridRequest::absorb_max_request)
        .def_readwrite("p_request_kw", &GridRequest::p_request_kw)
        .def_readwrite("absorb_max", &GridRequest::absorb_max)
        .def_readwrite("q_request_kvar", &GridRequest::q_request_kvar)
        .def_readwrite("p_import_limit_kw", &GridRequest::p_import_limit_kw)
        .def_readwrite("p_export_limit_kw", &GridRequest::p_export_limit_kw);

    py::class_<SocGate>(m, "SocGate")
        .def(py::init<>())
        .def_readwrite("charge_blocked", &SocGate::charge_blocked)
        .def_readwrite("discharge_blocked", &SocGate::discharge_blocked);

    py::class_<Dispatch>(m, "Dispatch")
        .def_readonly("pv_mode", &Dispatch::pv_mode)
        .def_readonly("p_pv_ref_kw", &Dispatch::p_pv_ref_kw)
        .def_readonly("p_bat_ref_kw", &Dispatch::p_bat_ref_kw)
        .def_readonly("p_grid_set_kw", &Dispatch::p_grid_set_kw)
        .def_readonly("q_set_kvar", &Dispatch::q_set_kvar)
        .def_readonly("case_label", &Dispatch::case_label);

    py::class_<DispatchResult>(m, "DispatchResult")
        .def_readonly("dispatch", &DispatchResult::dispatch)
        .def_readonly("gate", &DispatchResult::gate)
        .def_readonly("load_shed_kw", &DispatchResult::load_shed_kw)
        .def("infeasible", &DispatchResult::infeasible);

    m.def("dispatch", &dispatch, py::arg("p_mpp_available_kw"), py::arg("p_load_kw"),
          py::arg("grid"), py::arg("soc"), py::arg("bat") = BatteryParams{},
          py::arg("gate") = SocGate{});
    m.def("classify_case", &classify_case, py::arg("p_mpp_available_kw"),
          py::arg("p_load_kw"), py::arg("grid"), py::arg("soc"),
          py::arg("bat") = BatteryParams{});
    m.def("soc_gate_update", &soc_gate_update, py::arg("gate"), py::arg("soc"),
          py::arg("params"));

    // --- inverter --------------------------------------------------------------
    py::class_<DcBusState>(m, "DcBusState")
        .def(py::init<>())
        .def_readwrite("v_dc_v", &DcBusState::v_dc_v)
        .def_readwrite("capacitance_f", &DcBusState::capacitance_f)
        .def("energy_j", &DcBusState::energy_j);

    py::class_<InverterState>(m, "InverterState")
        .def(py::init<>())
        .def_readwrite("i_d_a", &InverterState::i_d_a)
        .def_readwrite("i_q_a", &InverterState::i_q_a)
        .def_readonly("i_d_ref_a", &InverterState::i_d_ref_a)
        .def_readonly("i_q_ref_a", &InverterState::i_q_ref_a)
        .def_readwrite("grid_voltage_d_v", &InverterState::grid_voltage_d_v)
        .def_readwrite("efficiency", &InverterState::efficiency)
        .def_readwrite("i_rated_a", &InverterState::i_rated_a)
        .def_readonly("current_limited", &InverterState::current_limited);

    m.def(
        "dq_transform",
        [](double a, double b, double c, double theta) {
            const DqCurrents dq = dq_transform(a, b, c, theta);
            return py::make_tuple(dq.i_d_a, dq.i_q_a);
        },
        py::arg("i_a"), py::arg("i_b"), py::arg("i_c"), py::arg("theta_rad"));
    m.def("voltage_loop_step", &voltage_loop_step, py::arg("bus"), py::arg("inv"),
          py::arg("v_dc_ref_v"), py::arg("dt_s"), py::arg("kp_a_per_v"),
          py::arg("ki_a_per_vs"));
    m.def("q_loop_step", &q_loop_step, py::arg("inv"), py::arg("q_ref_kvar"),
          py::arg("dt_s"));
    m.def("bus_advance", &bus_advance, py::arg("bus"), py::arg("p_in_w"),
          py::arg("p_out_w"), py::arg("dt_s"));
    m.def("grid_active_power_w", &grid_active_power_w, py::arg("inv"));
    m.def("grid_reactive_power_kvar", &grid_reactive_power_kvar, py::arg("inv"));

    // --- scenario & engine -------------------------------------------------------
    py::enum_<EventType>(m, "EventType")
        .value("SetIrradiance", EventType::SetIrradiance)
        .value("SetTemperature", EventType::SetTemperature)
        .value("SetDcLoad", EventType::SetDcLoad)
        .value("SetGridRequest", EventType::SetGridRequest)
        .value("SetVdcRef", EventType::SetVdcRef)
        .value("SetQRef", EventType::SetQRef);

    py::class_<Event>(m, "Event")
        .def_static("set_irradiance", &Event::set_irradiance, py::arg("t_s"),
                    py::arg("w_m2"))
        .def_static("set_temperature", &Event::set_temperature, py::arg("t_s"),
                    py::arg("celsius"))
        .def_static("set_dc_load", &Event::set_dc_load, py::arg("t_s"), py::arg("kw"))
        .def_static("set_grid_request", &Event::set_grid_request, py::arg("t_s"),
                    py::arg("request"))
        .def_static("set_vdc_ref", &Event::set_vdc_ref, py::arg("t_s"),
                    py::arg("volts"))
        .def_static("set_q_ref", &Event::set_q_ref, py::arg("t_s"), py::arg("kvar"))
        .def_readonly("t_s", &Event::t_s)
        .def_readonly("type", &Event::type);

    py::class_<PvPlantConfig>(m, "PvPlantConfig")
        .def(py::init<>())
        .def_readwrite("params", &PvPlantConfig::params)
        .def_readwrite("rated_power_kw", &PvPlantConfig::rated_power_kw)
        .def_readwrite("efficiency", &PvPlantConfig::efficiency)
        .def_readwrite("tracking_time_constant_s",
                       &PvPlantConfig::tracking_time_constant_s)
        .def_readwrite("mppt_step_v", &PvPlantConfig::mppt_step_v)
        .def_readwrite("mppt_period_s", &PvPlantConfig::mppt_period_s)
        .def_readwrite("curtail_gain_v_per_w", &PvPlantConfig::curtail_gain_v_per_w);

    py::class_<InverterConfig>(m, "InverterConfig")
        .def(py::init<>())
        .def_readwrite("capacitance_f", &InverterConfig::capacitance_f)
        .def_readwrite("v_dc_initial_v", &InverterConfig::v_dc_initial_v)
        .def_readwrite("v_dc_ref_v", &InverterConfig::v_dc_ref_v)
        .def_readwrite("kp_a_per_v", &InverterConfig::kp_a_per_v)
        .def_readwrite("ki_a_per_vs", &InverterConfig::ki_a_per_vs)
        .def_readwrite("current_time_constant_s",
                       &InverterConfig::current_time_constant_s)
        .def_readwrite("ac_voltage_ll_v", &InverterConfig::ac_voltage_ll_v)
        .def_readwrite("efficiency", &InverterConfig::efficiency)
        .def_readwrite("i_rated_a", &InverterConfig::i_rated_a);

    py::class_<EmsConfig>(m, "EmsConfig")
        .def(py::init<>())
        .def_readwrite("period_s", &EmsConfig::period_s)
        .def_readwrite("initial_request", &EmsConfig::initial_request);

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def("validate", &Scenario::validate)
        .def_readwrite("duration_s", &Scenario::duration_s)
        .def_readwrite("dt_s", &Scenario::dt_s)
        .def_readwrite("log_decimation", &Scenario::log_decimation)
        .def_readwrite("pv", &Scenario::pv)
        .def_readwrite("battery", &Scenario::battery)
        .def_readwrite("initial_soc", &Scenario::initial_soc)
        .def_readwrite("inverter", &Scenario::inverter)
        .def_readwrite("ems", &Scenario::ems)
        .def_readwrite("events", &Scenario::events)
        .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; });

    m.def("case_preset", &case_preset, py::arg("n"));
    m.def("parse_scenario", &parse_scenario, py::arg("text"));
    m.def("load_scenario_file", &load_scenario_file, py::arg("path"));
    m.def("serialize_scenario", &serialize_scenario, py::arg("scenario"));

    py::class_<SimRecord>(m, "SimRecord")
        .def_readonly("t_s", &SimRecord::t_s)
        .def_readonly("irradiance_w_m2", &SimRecord::irradiance_w_m2)
        .def_readonly("p_pv_kw", &SimRecord::p_pv_kw)
        .def_readonly("v_pv_v", &SimRecord::v_pv_v)
        .def_readonly("i_pv_a", &SimRecord::i_pv_a)
        .def_readonly("v_ref_v", &SimRecord::v_ref_v)
        .def_readonly("pv_mode", &SimRecord::pv_mode)
        .def_readonly("p_bat_kw", &SimRecord::p_bat_kw)
        .def_readonly("soc", &SimRecord::soc)
        .def_readonly("p_load_kw", &SimRecord::p_load_kw)
        .def_readonly("p_grid_kw", &SimRecord::p_grid_kw)
        .def_readonly("q_grid_kvar", &SimRecord::q_grid_kvar)
        .def_readonly("v_dc_v", &SimRecord::v_dc_v)
        .def_readonly("balance_residual_kw", &SimRecord::balance_residual_kw)
        .def_readonly("case_label", &SimRecord::case_label)
        .def_readonly("flag_saturation", &SimRecord::flag_saturation)
        .def_readonly("flag_load_shed", &SimRecord::flag_load_shed)
        .def_readonly("flag_bus_fault", &SimRecord::flag_bus_fault);

    py::enum_<RunFault>(m, "RunFault")
        .value("None_", RunFault::None)
        .value("BusCollapse", RunFault::BusCollapse)
        .value("InfeasibleDispatch", RunFault::InfeasibleDispatch);

    py::class_<RunSummary>(m, "RunSummary")
        .def_readonly("completed", &RunSummary::completed)
        .def_readonly("fault", &RunSummary::fault)
        .def_readonly("fault_time_s", &RunSummary::fault_time_s)
        .def_readonly("message", &RunSummary::message)
        .def_readonly("steps", &RunSummary::steps)
        .def_readonly("final_soc", &RunSummary::final_soc);

    py::class_<SimResult>(m, "SimResult")
        .def_readonly("records", &SimResult::records)
        .def_readonly("summary", &SimResult::summary);

    py::class_<ChannelStats>(m, "ChannelStats")
        .def_readonly("name", &ChannelStats::name)
        .def_readonly("mean", &ChannelStats::mean)
        .def_readonly("min", &ChannelStats::min)
        .def_readonly("max", &ChannelStats::max);

    m.def("run", &run, py::arg("scenario"),
          py::call_guard<py::gil_scoped_release>());
    m.def("steady_state_summary", &steady_state_summary, py::arg("records"),
          py::arg("window_s"));
    m.def("records_to_csv", &records_to_csv, py::arg("records"));
    m.def("write_csv_file", &write_csv_file, py::arg("path"), py::arg("records"));

#ifdef PVBSIM_VERSION
    m.attr("__version__") = PVBSIM_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}

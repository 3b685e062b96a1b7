#pragma once

#include <string>
#include <vector>

#include "pvbsim/inverter.hpp"
#include "pvbsim/scenario.hpp"

namespace pvbsim {

// One logged timestep. p_pv is the power delivered to the DC bus (terminal
// power times the boost-stage efficiency); v_pv / i_pv are terminal values.
struct SimRecord {
    double t_s = 0.0;
    double irradiance_w_m2 = 0.0;
    double p_pv_kw = 0.0;
    double v_pv_v = 0.0;
    double i_pv_a = 0.0;
    double v_ref_v = 0.0;  // tracker voltage reference
    PvControlMode::Kind pv_mode = PvControlMode::Kind::Mppt;
    double p_bat_kw = 0.0;
    double soc = 0.0;
    double p_load_kw = 0.0;
    double p_grid_kw = 0.0;
    double q_grid_kvar = 0.0;
    double v_dc_v = 0.0;
    double balance_residual_kw = 0.0;
    CaseLabel case_label = CaseLabel::Other;
    bool flag_saturation = false;
    bool flag_load_shed = false;
    bool flag_bus_fault = false;
};

enum class RunFault { None, BusCollapse, InfeasibleDispatch };

struct RunSummary {
    bool completed = true;
    RunFault fault = RunFault::None;
    double fault_time_s = 0.0;
    std::string message;
    long steps = 0;
    double final_soc = 0.0;
};

struct SimResult {
    std::vector<SimRecord> records;
    RunSummary summary;
};

// Deterministic fixed-timestep run: apply due events, dispatch at the EMS
// period (the supervisor sees the array's true MPP, refreshed once per
// environment change), step the PV controller/boost stage, battery and
// inverter/bus models, audit the power balance, and log every
// log_decimation-th step. Identical scenarios produce identical records.
// Bus collapse or persistently infeasible dispatch terminates the run with a
// structured fault; records up to the fault are retained.
SimResult run(const Scenario& scenario);

struct ChannelStats {
    std::string name;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

// Per-channel mean/min/max over the trailing window of the records.
// Throws std::invalid_argument when the window is empty or exceeds the span.
std::vector<ChannelStats> steady_state_summary(const std::vector<SimRecord>& records,
                                               double window_s);

}  // namespace pvbsim

#pragma once

#include <vector>

#include "pvbsim/battery.hpp"
#include "pvbsim/ems.hpp"
#include "pvbsim/pv_array.hpp"

namespace pvbsim {

enum class EventType {
    SetIrradiance,
    SetTemperature,
    SetDcLoad,
    SetGridRequest,
    SetVdcRef,
    SetQRef,
};

// Timed scenario event. Events snap forward to the next step boundary and
// apply in list order when several land on the same step.
struct Event {
    double t_s = 0.0;
    EventType type = EventType::SetIrradiance;
    double value = 0.0;  // unused for SetGridRequest
    GridRequest grid;    // used for SetGridRequest only

    static Event set_irradiance(double t_s, double w_m2);
    static Event set_temperature(double t_s, double celsius);
    static Event set_dc_load(double t_s, double kw);
    static Event set_grid_request(double t_s, const GridRequest& request);
    static Event set_vdc_ref(double t_s, double volts);
    static Event set_q_ref(double t_s, double kvar);

    bool operator==(const Event&) const = default;
};

// PV plant block: the calibrated array plus boost-stage and tracker settings.
struct PvPlantConfig {
    PvParams params;
    double rated_power_kw = 165.0;  // calibration target the params were built for
    double efficiency = 1.0;        // boost stage, terminal -> bus
    double tracking_time_constant_s = 0.002;
    double mppt_step_v = 1.9;
    double mppt_period_s = 0.01;
    double curtail_gain_v_per_w = 1e-4;

    bool operator==(const PvPlantConfig&) const = default;
};

struct InverterConfig {
    double capacitance_f = 0.5;
    double v_dc_initial_v = 450.0;
    double v_dc_ref_v = 450.0;
    double kp_a_per_v = 80.0;
    double ki_a_per_vs = 4000.0;
    double current_time_constant_s = 0.005;
    double ac_voltage_ll_v = 208.0;
    double efficiency = 1.0;
    double i_rated_a = 800.0;

    bool operator==(const InverterConfig&) const = default;
};

struct EmsConfig {
    double period_s = 0.05;
    GridRequest initial_request;

    bool operator==(const EmsConfig&) const = default;
};

struct Scenario {
    double duration_s = 5.0;
    double dt_s = 1e-3;
    int log_decimation = 10;
    PvPlantConfig pv;
    BatteryParams battery;
    double initial_soc = 0.5;
    InverterConfig inverter;
    EmsConfig ems;
    std::vector<Event> events;

    // Throws std::invalid_argument naming the violated invariant.
    void validate() const;

    bool operator==(const Scenario&) const = default;
};

// Built-in scenario reproducing operating region n (1..5): 5 s horizon,
// 1 ms step, STC irradiance from t=0 and the region-defining request or load
// change at t=1 s. The 100 kWh battery capacity is a desk-scale placeholder,
// not a study result.
Scenario case_preset(int n);

}  // namespace pvbsim

#include "pvbsim/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pvbsim/inverter.hpp"

namespace pvbsim {

namespace {
void require_finite(double v, const char* what) {
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string("event: ") + what + " must be finite");
}
}  // namespace

Event Event::set_irradiance(double t_s, double w_m2) {
    require_finite(w_m2, "irradiance");
    if (w_m2 < 0.0) throw std::invalid_argument("event: irradiance must be >= 0");
    return {t_s, EventType::SetIrradiance, w_m2, {}};
}

Event Event::set_temperature(double t_s, double celsius) {
    require_finite(celsius, "temperature");
    return {t_s, EventType::SetTemperature, celsius, {}};
}

Event Event::set_dc_load(double t_s, double kw) {
    require_finite(kw, "load");
    if (kw < 0.0) throw std::invalid_argument("event: load must be >= 0");
    return {t_s, EventType::SetDcLoad, kw, {}};
}

Event Event::set_grid_request(double t_s, const GridRequest& request) {
    request.validate();
    return {t_s, EventType::SetGridRequest, 0.0, request};
}

Event Event::set_vdc_ref(double t_s, double volts) {
    require_finite(volts, "v_dc reference");
    if (volts <= 0.0) throw std::invalid_argument("event: v_dc reference must be > 0");
    return {t_s, EventType::SetVdcRef, volts, {}};
}

Event Event::set_q_ref(double t_s, double kvar) {
    require_finite(kvar, "q reference");
    return {t_s, EventType::SetQRef, kvar, {}};
}

void Scenario::validate() const {
    auto fail = [](const char* what) { throw std::invalid_argument(what); };
    if (!(duration_s > 0.0)) fail("scenario: duration must be > 0");
    if (!(dt_s > 0.0)) fail("scenario: dt must be > 0");
    if (log_decimation < 1) fail("scenario: log_decimation must be >= 1");
    if (!(initial_soc >= 0.0 && initial_soc <= 1.0))
        fail("scenario: initial_soc must be in [0, 1]");
    if (!(pv.efficiency > 0.0 && pv.efficiency <= 1.0))
        fail("scenario: pv efficiency must be in (0, 1]");
    if (!(pv.tracking_time_constant_s > 0.0))
        fail("scenario: pv tracking time constant must be > 0");
    if (!(pv.mppt_step_v > 0.0)) fail("scenario: mppt step must be > 0");
    if (!(pv.mppt_period_s > 0.0)) fail("scenario: mppt period must be > 0");
    if (!(pv.curtail_gain_v_per_w > 0.0)) fail("scenario: curtail gain must be > 0");
    pv.params.validate();
    battery.validate();
    if (!(inverter.capacitance_f > 0.0)) fail("scenario: capacitance must be > 0");
    if (!(inverter.v_dc_initial_v > kBusVoltageGuardV))
        fail("scenario: initial v_dc must be above the bus guard voltage");
    if (!(inverter.v_dc_ref_v > 0.0)) fail("scenario: v_dc reference must be > 0");
    if (!(inverter.current_time_constant_s > 0.0))
        fail("scenario: inverter current time constant must be > 0");
    if (!(inverter.ac_voltage_ll_v > 0.0)) fail("scenario: AC voltage must be > 0");
    if (!(inverter.efficiency > 0.0 && inverter.efficiency <= 1.0))
        fail("scenario: inverter efficiency must be in (0, 1]");
    if (!(inverter.i_rated_a > 0.0)) fail("scenario: rated current must be > 0");
    if (!(ems.period_s > 0.0)) fail("scenario: ems period must be > 0");
    ems.initial_request.validate();
    double prev_t = 0.0;
    for (const Event& ev : events) {
        if (ev.t_s < prev_t) fail("scenario: events must be sorted by time");
        if (ev.t_s > duration_s) fail("scenario: event time exceeds duration");
        prev_t = ev.t_s;
    }
}

Scenario case_preset(int n) {
    if (n < 1 || n > 5)
        throw std::invalid_argument("case_preset: case number must be 1..5");

    Scenario sc;
    sc.duration_s = 5.0;
    sc.dt_s = 1e-3;
    sc.log_decimation = 10;
    sc.pv.params = PvParams::calibrated(165e3, 600);
    sc.pv.rated_power_kw = 165.0;
    sc.battery = BatteryParams{};  // 100 kWh desk-scale placeholder capacity
    sc.events.push_back(Event::set_irradiance(0.0, 1000.0));
    sc.events.push_back(Event::set_temperature(0.0, 25.0));
    sc.events.push_back(Event::set_dc_load(0.0, 50.0));

    GridRequest req;  // defaults: no request, generous 500 kW limits
    switch (n) {
        case 1: {
            sc.initial_soc = 0.60;
            req.p_request_kw = 105.0;
            sc.events.push_back(Event::set_grid_request(1.0, req));
            break;
        }
        case 2: {
            sc.initial_soc = 0.95;  // at the upper limit: battery disconnected
            req.p_request_kw = 100.0;
            sc.events.push_back(Event::set_grid_request(1.0, req));
            break;
        }
        case 3: {
            sc.initial_soc = 0.60;
            req.p_request_kw = 125.0;
            sc.events.push_back(Event::set_grid_request(1.0, req));
            break;
        }
        case 4: {
            sc.initial_soc = 0.60;
            req.absorb_max = true;
            sc.events.push_back(Event::set_grid_request(1.0, req));
            break;
        }
        case 5: {
            sc.initial_soc = 0.19;
            sc.events.push_back(Event::set_dc_load(1.0, 190.0));
            break;
        }
    }
    sc.validate();
    return sc;
}

}  // namespace pvbsim

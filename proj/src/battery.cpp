#include "pvbsim/battery.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pvbsim {

void BatteryParams::validate() const {
    auto fail = [](const char* what) { throw std::invalid_argument(what); };
    if (!(capacity_kwh > 0.0)) fail("battery: capacity must be > 0");
    if (!(soc_min >= 0.0 && soc_min < soc_max && soc_max <= 1.0))
        fail("battery: requires 0 <= soc_min < soc_max <= 1");
    if (!(p_charge_max_kw > 0.0)) fail("battery: p_charge_max must be > 0");
    if (!(p_discharge_max_kw > 0.0)) fail("battery: p_discharge_max must be > 0");
    if (!(efficiency_charge > 0.0 && efficiency_charge <= 1.0))
        fail("battery: efficiency_charge must be in (0, 1]");
    if (!(efficiency_discharge > 0.0 && efficiency_discharge <= 1.0))
        fail("battery: efficiency_discharge must be in (0, 1]");
    if (!(tracking_time_constant_s >= 0.0))
        fail("battery: tracking_time_constant must be >= 0");
    if (!(soc_hysteresis >= 0.0)) fail("battery: soc_hysteresis must be >= 0");
}

BatteryState battery_advance(const BatteryState& state, const BatteryParams& params,
                             double p_ref_kw, double dt_s) {
    if (!(dt_s > 0.0))
        throw std::invalid_argument("battery_advance: dt must be > 0");

    double ref = std::clamp(p_ref_kw, -params.p_charge_max_kw, params.p_discharge_max_kw);
    if (state.soc >= params.soc_max) ref = std::max(ref, 0.0);  // full: no charging
    if (state.soc <= params.soc_min) ref = std::min(ref, 0.0);  // empty: no discharging

    BatteryState next = state;
    next.p_ref_kw = ref;
    const double tau = params.tracking_time_constant_s;
    const double alpha = tau > 0.0 ? 1.0 - std::exp(-dt_s / tau) : 1.0;
    next.p_bat_kw = state.p_bat_kw + alpha * (ref - state.p_bat_kw);

    const double capacity_kws = params.capacity_kwh * 3600.0;
    if (next.p_bat_kw > 0.0)
        next.soc -= next.p_bat_kw * dt_s / (capacity_kws * params.efficiency_discharge);
    else
        next.soc += -next.p_bat_kw * params.efficiency_charge * dt_s / capacity_kws;
    next.soc = std::clamp(next.soc, 0.0, 1.0);
    return next;
}

SocGate soc_gate_update(SocGate gate, double soc, const BatteryParams& params) {
    if (soc >= params.soc_max) gate.charge_blocked = true;
    else if (soc < params.soc_max - params.soc_hysteresis) gate.charge_blocked = false;

    if (soc <= params.soc_min) gate.discharge_blocked = true;
    else if (soc > params.soc_min + params.soc_hysteresis) gate.discharge_blocked = false;

    return gate;
}

}  // namespace pvbsim

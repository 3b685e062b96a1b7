#pragma once

namespace pvbsim {

// Ideal energy-reservoir battery behind a power-tracking bidirectional
// converter. Charge/discharge efficiencies act on the SOC integration only;
// p_bat is the power seen by the DC bus.
struct BatteryParams {
    double capacity_kwh = 100.0;
    double soc_max = 0.95;
    double soc_min = 0.20;
    double p_charge_max_kw = 10.0;
    double p_discharge_max_kw = 10.0;
    double efficiency_charge = 0.95;
    double efficiency_discharge = 0.95;
    double tracking_time_constant_s = 0.02;
    double soc_hysteresis = 0.01;  // re-entry band after hitting a SOC limit

    // Throws std::invalid_argument naming the violated invariant.
    void validate() const;

    bool operator==(const BatteryParams&) const = default;
};

// Sign convention: p_bat > 0 discharging (into the bus), < 0 charging.
struct BatteryState {
    double soc = 0.5;
    double p_bat_kw = 0.0;  // realized converter power
    double p_ref_kw = 0.0;  // effective (post-clamp) reference

    bool operator==(const BatteryState&) const = default;
};

// One timestep: clamp the reference to the converter rating, apply the SOC
// authority clamp (no charging at soc_max, no discharging at soc_min), track
// the clamped reference with an exact exponential lag, then integrate SOC
// from the realized power. The returned p_ref_kw is the effective reference
// so the EMS can observe shortfalls.
BatteryState battery_advance(const BatteryState& state, const BatteryParams& params,
                             double p_ref_kw, double dt_s);

// Anti-chatter latches around the SOC window. After hitting soc_max, charging
// is re-enabled only once soc drops below soc_max - soc_hysteresis (and
// symmetrically at soc_min). The EMS consults these when dispatching.
struct SocGate {
    bool charge_blocked = false;
    bool discharge_blocked = false;

    bool operator==(const SocGate&) const = default;
};

SocGate soc_gate_update(SocGate gate, double soc, const BatteryParams& params);

}  // namespace pvbsim

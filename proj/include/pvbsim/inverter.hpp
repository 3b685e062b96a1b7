#pragma once

namespace pvbsim {

// DC-link voltage below which the run is declared collapsed.
inline constexpr double kBusVoltageGuardV = 50.0;

// DC-link capacitor. Stored energy is 0.5 * C * v^2; advancing in energy form
// keeps the update exact for constant power over a step.
struct DcBusState {
    double v_dc_v = 450.0;
    double capacitance_f = 0.5;

    double energy_j() const { return 0.5 * capacitance_f * v_dc_v * v_dc_v; }

    bool operator==(const DcBusState&) const = default;
};

// Grid-tied inverter in the synchronous dq frame on a stiff grid (ideal PLL,
// v_q = 0). The outer PI shapes i_d_ref from the DC-bus voltage error, the
// inner current loops are first-order lags, and i_q carries reactive power
// with Q = -(3/2) * v_d * i_q.
struct InverterState {
    double i_d_a = 0.0;
    double i_q_a = 0.0;
    double i_d_ref_a = 0.0;
    double i_q_ref_a = 0.0;
    double pi_integrator_vs = 0.0;  // integral of the voltage error
    double current_time_constant_s = 0.005;
    double grid_voltage_d_v = 169.8312888;  // peak phase, 208 V line-to-line
    double efficiency = 1.0;
    double i_rated_a = 800.0;
    bool current_limited = false;  // set by the loop steps when a clamp engages

    bool operator==(const InverterState&) const = default;
};

struct DqCurrents {
    double i_d_a = 0.0;
    double i_q_a = 0.0;
};

// Amplitude-invariant abc -> dq rotation: a balanced three-phase set of peak
// amplitude M aligned with theta maps to (M, 0); a set lagging theta by 90
// degrees maps to (0, -M).
DqCurrents dq_transform(double i_a, double i_b, double i_c, double theta_rad);

// Outer voltage loop: PI on (v_dc - v_dc_ref) produces i_d_ref (excess DC
// power drives export), with back-calculation anti-windup at the current
// limit; realized i_d then tracks the reference with the current lag.
InverterState voltage_loop_step(const DcBusState& bus, const InverterState& inv,
                                double v_dc_ref_v, double dt_s,
                                double kp_a_per_v, double ki_a_per_vs);

// Reactive loop: i_q_ref = -q_ref / (1.5 * v_d), clamped to the current-limit
// headroom left after the active reference. Throws std::domain_error when the
// grid d-axis voltage is zero.
InverterState q_loop_step(const InverterState& inv, double q_ref_kvar, double dt_s);

// Capacitor energy balance. Throws BusCollapseError when the stored energy
// falls below the guard floor.
DcBusState bus_advance(const DcBusState& bus, double p_in_w, double p_out_w,
                       double dt_s);

// Power drawn from the DC bus by the inverter: (3/2) * v_d * i_d.
double active_power_dc_w(const InverterState& inv);

// Grid-side active power after conversion efficiency. Export delivers
// p_dc * eta; import draws p_dc / eta from the grid, so the converter never
// sources power from nothing.
double grid_active_power_w(const InverterState& inv);

double grid_reactive_power_kvar(const InverterState& inv);

}  // namespace pvbsim

#pragma once

#include "pvbsim/pv_array.hpp"

namespace pvbsim {

// Operating mode of the PV-side boost converter, commanded by the EMS.
struct PvControlMode {
    enum class Kind { Mppt, PowerReference };
    Kind kind = Kind::Mppt;
    double p_ref_w = 0.0;  // meaningful for PowerReference only

    static PvControlMode mppt() { return {Kind::Mppt, 0.0}; }
    static PvControlMode power_reference(double p_ref_w);

    bool operator==(const PvControlMode&) const = default;
};

// Tracker state shared by the MPPT and power-reference loops. The supervisor
// refreshes v_oc_estimate / v_mpp_estimate whenever the environment changes.
struct MpptState {
    double v_ref_v = 0.0;
    double prev_voltage_v = 0.0;
    double prev_current_a = 0.0;
    double step_size_v = 1.9;
    double update_period_s = 0.01;
    double time_since_update_s = 0.0;
    double v_oc_estimate_v = 0.0;
    double v_mpp_estimate_v = 0.0;

    bool operator==(const MpptState&) const = default;
};

// Averaged boost stage: the PV terminal voltage follows the commanded
// reference with a first-order lag; efficiency applies terminal -> bus.
struct ConverterState {
    double terminal_voltage_v = 0.0;
    double tracking_time_constant_s = 0.002;
    double efficiency = 1.0;

    bool operator==(const ConverterState&) const = default;
};

// One incremental-conductance decision on (dV, dI) against -I/V.
// Call once per update_period with the measured operating point.
MpptState incond_step(const MpptState& state, const PvOperatingPoint& measured);

// Integral curtailment loop on the high-voltage side of the MPP:
// v_ref += gain * (P_measured - p_ref), clamped to [v_mpp, v_oc]. Raising the
// voltage on that branch lowers power, so the loop is a stable monotone
// integrator; if p_ref exceeds what the array can do it parks at the MPP.
MpptState curtail_step(const MpptState& state, const PvOperatingPoint& measured,
                       double p_ref_w, double controller_gain_v_per_w);

// Exact exponential relaxation of the terminal voltage toward v_ref.
ConverterState converter_advance(const ConverterState& conv, double v_ref_v,
                                 double dt_s);

}  // namespace pvbsim

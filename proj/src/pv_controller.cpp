#include "pvbsim/pv_controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pvbsim {

PvControlMode PvControlMode::power_reference(double p_ref_w) {
    if (!(p_ref_w >= 0.0))
        throw std::invalid_argument("power reference must be >= 0");
    return {Kind::PowerReference, p_ref_w};
}

MpptState incond_step(const MpptState& state, const PvOperatingPoint& measured) {
    constexpr double eps_g = 1e-6;  // conductance dead band, S

    const double dv = measured.voltage_v - state.prev_voltage_v;
    const double di = measured.current_a - state.prev_current_a;

    double direction = 0.0;
    if (dv == 0.0) {
        if (di > 0.0) direction = 1.0;
        else if (di < 0.0) direction = -1.0;
    } else if (measured.voltage_v > 0.0) {
        const double incremental = di / dv;
        const double negative_conductance = -measured.current_a / measured.voltage_v;
        if (incremental > negative_conductance + eps_g) direction = 1.0;
        else if (incremental < negative_conductance - eps_g) direction = -1.0;
    } else {
        direction = 1.0;  // at 0 V we are always left of the MPP
    }

    MpptState next = state;
    next.v_ref_v = std::clamp(state.v_ref_v + direction * state.step_size_v, 0.0,
                              state.v_oc_estimate_v);
    next.prev_voltage_v = measured.voltage_v;
    next.prev_current_a = measured.current_a;
    return next;
}

MpptState curtail_step(const MpptState& state, const PvOperatingPoint& measured,
                       double p_ref_w, double controller_gain_v_per_w) {
    if (!(p_ref_w >= 0.0))
        throw std::invalid_argument("curtail_step: p_ref must be >= 0");
    MpptState next = state;
    next.v_ref_v = std::clamp(
        state.v_ref_v + controller_gain_v_per_w * (measured.power_w - p_ref_w),
        state.v_mpp_estimate_v, state.v_oc_estimate_v);
    next.prev_voltage_v = measured.voltage_v;
    next.prev_current_a = measured.current_a;
    return next;
}

ConverterState converter_advance(const ConverterState& conv, double v_ref_v,
                                 double dt_s) {
    if (!(dt_s > 0.0))
        throw std::invalid_argument("converter_advance: dt must be > 0");
    ConverterState next = conv;
    const double alpha = 1.0 - std::exp(-dt_s / conv.tracking_time_constant_s);
    next.terminal_voltage_v += alpha * (v_ref_v - conv.terminal_voltage_v);
    return next;
}

}  // namespace pvbsim

#include "pvbsim/inverter.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pvbsim/errors.hpp"

namespace pvbsim {

namespace {
constexpr double kTwoPiOver3 = 2.0943951023931953;
}

DqCurrents dq_transform(double i_a, double i_b, double i_c, double theta_rad) {
    if (!std::isfinite(theta_rad))
        throw std::invalid_argument("dq_transform: theta must be finite");
    const double d = (2.0 / 3.0) * (i_a * std::cos(theta_rad) +
                                    i_b * std::cos(theta_rad - kTwoPiOver3) +
                                    i_c * std::cos(theta_rad + kTwoPiOver3));
    const double q = -(2.0 / 3.0) * (i_a * std::sin(theta_rad) +
                                     i_b * std::sin(theta_rad - kTwoPiOver3) +
                                     i_c * std::sin(theta_rad + kTwoPiOver3));
    return {d, q};
}

InverterState voltage_loop_step(const DcBusState& bus, const InverterState& inv,
                                double v_dc_ref_v, double dt_s,
                                double kp_a_per_v, double ki_a_per_vs) {
    if (!(dt_s > 0.0))
        throw std::invalid_argument("voltage_loop_step: dt must be > 0");

    InverterState next = inv;
    next.current_limited = false;

    const double err = bus.v_dc_v - v_dc_ref_v;
    double integ = inv.pi_integrator_vs + err * dt_s;
    double u = kp_a_per_v * err + ki_a_per_vs * integ;
    if (u > inv.i_rated_a || u < -inv.i_rated_a) {
        u = std::clamp(u, -inv.i_rated_a, inv.i_rated_a);
        if (ki_a_per_vs > 0.0)
            integ = (u - kp_a_per_v * err) / ki_a_per_vs;  // back-calculation
        next.current_limited = true;
    }
    next.pi_integrator_vs = integ;
    next.i_d_ref_a = u;

    const double alpha = 1.0 - std::exp(-dt_s / inv.current_time_constant_s);
    next.i_d_a = inv.i_d_a + alpha * (u - inv.i_d_a);
    return next;
}

InverterState q_loop_step(const InverterState& inv, double q_ref_kvar, double dt_s) {
    if (!(dt_s > 0.0))
        throw std::invalid_argument("q_loop_step: dt must be > 0");
    if (!(inv.grid_voltage_d_v > 0.0))
        throw std::domain_error("q_loop_step: grid d-axis voltage is not positive");

    InverterState next = inv;
    double iq_ref = -q_ref_kvar * 1e3 / (1.5 * inv.grid_voltage_d_v);
    const double headroom = std::sqrt(std::max(
        0.0, inv.i_rated_a * inv.i_rated_a - next.i_d_ref_a * next.i_d_ref_a));
    if (iq_ref > headroom || iq_ref < -headroom) {
        iq_ref = std::clamp(iq_ref, -headroom, headroom);
        next.current_limited = true;
    }
    next.i_q_ref_a = iq_ref;

    const double alpha = 1.0 - std::exp(-dt_s / inv.current_time_constant_s);
    next.i_q_a = inv.i_q_a + alpha * (iq_ref - inv.i_q_a);
    return next;
}

DcBusState bus_advance(const DcBusState& bus, double p_in_w, double p_out_w,
                       double dt_s) {
    if (!(dt_s > 0.0))
        throw std::invalid_argument("bus_advance: dt must be > 0");
    if (!(bus.v_dc_v > kBusVoltageGuardV))
        throw BusCollapseError("DC bus collapse: voltage already at or below the guard");

    const double energy = bus.energy_j() + (p_in_w - p_out_w) * dt_s;
    const double floor =
        0.5 * bus.capacitance_f * kBusVoltageGuardV * kBusVoltageGuardV;
    if (!(energy > floor)) {
        std::ostringstream msg;
        msg << "DC bus collapse: stored energy " << energy << " J fell below the "
            << kBusVoltageGuardV << " V guard (p_in=" << p_in_w
            << " W, p_out=" << p_out_w << " W)";
        throw BusCollapseError(msg.str());
    }
    DcBusState next = bus;
    next.v_dc_v = std::sqrt(2.0 * energy / bus.capacitance_f);
    return next;
}

double active_power_dc_w(const InverterState& inv) {
    return 1.5 * inv.grid_voltage_d_v * inv.i_d_a;
}

double grid_active_power_w(const InverterState& inv) {
    const double p_dc = active_power_dc_w(inv);
    return p_dc >= 0.0 ? p_dc * inv.efficiency : p_dc / inv.efficiency;
}

double grid_reactive_power_kvar(const InverterState& inv) {
    return -1.5 * inv.grid_voltage_d_v * inv.i_q_a / 1e3;
}

}  // namespace pvbsim

#include "pvbsim/sim_engine.hpp"

#include <algorithm>
#include <cmath>

#include "pvbsim/errors.hpp"

namespace pvbsim {

namespace {

// Supervisory knowledge of the array, refreshed once per environment change.
struct PvEstimates {
    double p_mpp_w = 0.0;
    double v_mpp_v = 0.0;
    double v_oc_v = 0.0;
};

PvEstimates refresh_estimates(const PvParams& params, const EnvConditions& env) {
    const PvOperatingPoint mpp = true_mpp(params, env);
    return {mpp.power_w, mpp.voltage_v, open_circuit_voltage(params, env)};
}

}  // namespace

SimResult run(const Scenario& sc) {
    sc.validate();

    const double dt = sc.dt_s;
    const long n_steps = std::max<long>(1, std::lround(sc.duration_s / dt));
    const long ems_every = std::max<long>(1, std::lround(sc.ems.period_s / dt));
    const long mppt_every = std::max<long>(1, std::lround(sc.pv.mppt_period_s / dt));

    // Events snap forward to the next step boundary (never backward); an event
    // at exactly the end of the horizon lands on the final step.
    std::vector<long> event_step(sc.events.size());
    for (size_t i = 0; i < sc.events.size(); ++i) {
        const long idx = static_cast<long>(std::ceil(sc.events[i].t_s / dt - 1e-9));
        event_step[i] = std::clamp(idx, 0L, n_steps - 1);
    }

    EnvConditions env{0.0, 25.0};
    double p_load_kw = 0.0;
    GridRequest grid = sc.ems.initial_request;
    double v_dc_ref = sc.inverter.v_dc_ref_v;

    MpptState mppt;
    mppt.step_size_v = sc.pv.mppt_step_v;
    mppt.update_period_s = sc.pv.mppt_period_s;

    ConverterState conv;
    conv.tracking_time_constant_s = sc.pv.tracking_time_constant_s;
    conv.efficiency = sc.pv.efficiency;

    BatteryState bat;
    bat.soc = sc.initial_soc;

    DcBusState bus{sc.inverter.v_dc_initial_v, sc.inverter.capacitance_f};
    InverterState inv;
    inv.current_time_constant_s = sc.inverter.current_time_constant_s;
    inv.grid_voltage_d_v = sc.inverter.ac_voltage_ll_v * std::sqrt(2.0 / 3.0);
    inv.efficiency = sc.inverter.efficiency;
    inv.i_rated_a = sc.inverter.i_rated_a;

    SocGate gate;
    PvEstimates est = refresh_estimates(sc.pv.params, env);

    Dispatch dispatch_now;
    double shed_kw = 0.0;
    int infeasible_streak = 0;
    const int infeasible_limit =
        std::max(1, static_cast<int>(std::lround(1.0 / sc.ems.period_s)));

    SimResult out;
    out.records.reserve(static_cast<size_t>(n_steps / sc.log_decimation) + 2);

    size_t next_event = 0;
    for (long k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * dt;

        bool env_changed = false;
        while (next_event < sc.events.size() && event_step[next_event] <= k) {
            const Event& ev = sc.events[next_event];
            switch (ev.type) {
                case EventType::SetIrradiance:
                    env.irradiance_w_m2 = ev.value;
                    env_changed = true;
                    break;
                case EventType::SetTemperature:
                    env.cell_temperature_c = ev.value;
                    env_changed = true;
                    break;
                case EventType::SetDcLoad: p_load_kw = ev.value; break;
                case EventType::SetGridRequest: grid = ev.grid; break;
                case EventType::SetVdcRef: v_dc_ref = ev.value; break;
                case EventType::SetQRef: grid.q_request_kvar = ev.value; break;
            }
            ++next_event;
        }
        if (env_changed) {
            est = refresh_estimates(sc.pv.params, env);
            if (mppt.v_ref_v <= 0.0 && est.v_oc_v > 0.0)
                mppt.v_ref_v = 0.8 * est.v_oc_v;  // cold start near the knee
        }
        mppt.v_oc_estimate_v = est.v_oc_v;
        mppt.v_mpp_estimate_v = est.v_mpp_v;

        if (k % ems_every == 0) {
            const double p_mpp_kw = est.p_mpp_w * sc.pv.efficiency / 1e3;
            DispatchResult res =
                dispatch(p_mpp_kw, p_load_kw, grid, bat.soc, sc.battery, gate);
            dispatch_now = res.dispatch;
            gate = res.gate;
            shed_kw = res.load_shed_kw;
            if (res.infeasible()) {
                if (++infeasible_streak > infeasible_limit) {
                    out.summary.completed = false;
                    out.summary.fault = RunFault::InfeasibleDispatch;
                    out.summary.fault_time_s = t;
                    out.summary.message =
                        "dispatch infeasible for over a second; shedding " +
                        std::to_string(shed_kw) + " kW of load";
                    out.summary.steps = k;
                    out.summary.final_soc = bat.soc;
                    return out;
                }
            } else {
                infeasible_streak = 0;
            }
        }

        mppt.time_since_update_s += dt;
        if (k % mppt_every == 0) {
            mppt.time_since_update_s = 0.0;
            const double v_now = conv.terminal_voltage_v;
            const double i_now = pv_current(sc.pv.params, env, v_now);
            const PvOperatingPoint measured{v_now, i_now, v_now * i_now};
            if (dispatch_now.pv_mode.kind == PvControlMode::Kind::Mppt) {
                mppt = incond_step(mppt, measured);
            } else {
                // reference is bus-side power; track it at the terminal
                const double p_ref_terminal_w =
                    dispatch_now.pv_mode.p_ref_w / sc.pv.efficiency;
                mppt = curtail_step(mppt, measured, p_ref_terminal_w,
                                    sc.pv.curtail_gain_v_per_w);
            }
        }
        conv = converter_advance(conv, mppt.v_ref_v, dt);

        const double v_pv = conv.terminal_voltage_v;
        const double i_pv = pv_current(sc.pv.params, env, v_pv);
        const double p_pv_bus_w = v_pv * i_pv * conv.efficiency;

        bat = battery_advance(bat, sc.battery, dispatch_now.p_bat_ref_kw, dt);
        const double bat_w = bat.p_bat_kw * 1e3;

        inv = voltage_loop_step(bus, inv, v_dc_ref, dt, sc.inverter.kp_a_per_v,
                                sc.inverter.ki_a_per_vs);
        inv = q_loop_step(inv, dispatch_now.q_set_kvar, dt);
        const double p_conv_dc_w = active_power_dc_w(inv);
        const double p_grid_w = grid_active_power_w(inv);
        const double p_load_eff_w = (p_load_kw - shed_kw) * 1e3;

        const double e_before = bus.energy_j();
        bool bus_fault = false;
        try {
            bus = bus_advance(
                bus, p_pv_bus_w + std::max(bat_w, 0.0) + std::max(-p_conv_dc_w, 0.0),
                p_load_eff_w + std::max(-bat_w, 0.0) + std::max(p_conv_dc_w, 0.0), dt);
        } catch (const BusCollapseError& e) {
            bus_fault = true;
            out.summary.completed = false;
            out.summary.fault = RunFault::BusCollapse;
            out.summary.fault_time_s = t;
            out.summary.message = e.what();
        }
        const double p_cap_w = (bus.energy_j() - e_before) / dt;
        const double p_loss_w = p_conv_dc_w - p_grid_w;  // conversion loss, >= 0

        if (k % sc.log_decimation == 0 || bus_fault) {
            SimRecord r;
            r.t_s = t;
            r.irradiance_w_m2 = env.irradiance_w_m2;
            r.p_pv_kw = p_pv_bus_w / 1e3;
            r.v_pv_v = v_pv;
            r.i_pv_a = i_pv;
            r.v_ref_v = mppt.v_ref_v;
            r.pv_mode = dispatch_now.pv_mode.kind;
            r.p_bat_kw = bat.p_bat_kw;
            r.soc = bat.soc;
            r.p_load_kw = p_load_kw;
            r.p_grid_kw = p_grid_w / 1e3;
            r.q_grid_kvar = grid_reactive_power_kvar(inv);
            r.v_dc_v = bus.v_dc_v;
            r.balance_residual_kw =
                bus_fault ? 0.0
                          : (p_pv_bus_w + bat_w - p_grid_w - p_load_eff_w -
                             p_loss_w - p_cap_w) / 1e3;
            r.case_label = dispatch_now.case_label;
            r.flag_saturation = inv.current_limited;
            r.flag_load_shed = shed_kw > 0.0;
            r.flag_bus_fault = bus_fault;
            out.records.push_back(r);
        }
        if (bus_fault) {
            out.summary.steps = k + 1;
            out.summary.final_soc = bat.soc;
            return out;
        }
    }

    out.summary.completed = true;
    out.summary.fault = RunFault::None;
    out.summary.steps = n_steps;
    out.summary.final_soc = bat.soc;
    return out;
}

std::vector<ChannelStats> steady_state_summary(const std::vector<SimRecord>& records,
                                               double window_s) {
    if (records.empty())
        throw std::invalid_argument("steady_state_summary: no records");
    const double t_end = records.back().t_s;
    const double t_begin = records.front().t_s;
    if (!(window_s > 0.0) || window_s > t_end - t_begin + 1e-12)
        throw std::invalid_argument(
            "steady_state_summary: window must be positive and within the record span");

    struct Channel {
        const char* name;
        double (*get)(const SimRecord&);
    };
    static constexpr Channel channels[] = {
        {"irradiance_w_m2", [](const SimRecord& r) { return r.irradiance_w_m2; }},
        {"p_pv_kw", [](const SimRecord& r) { return r.p_pv_kw; }},
        {"v_pv_v", [](const SimRecord& r) { return r.v_pv_v; }},
        {"i_pv_a", [](const SimRecord& r) { return r.i_pv_a; }},
        {"v_ref_v", [](const SimRecord& r) { return r.v_ref_v; }},
        {"p_bat_kw", [](const SimRecord& r) { return r.p_bat_kw; }},
        {"soc", [](const SimRecord& r) { return r.soc; }},
        {"p_load_kw", [](const SimRecord& r) { return r.p_load_kw; }},
        {"p_grid_kw", [](const SimRecord& r) { return r.p_grid_kw; }},
        {"q_grid_kvar", [](const SimRecord& r) { return r.q_grid_kvar; }},
        {"v_dc_v", [](const SimRecord& r) { return r.v_dc_v; }},
        {"balance_residual_kw",
         [](const SimRecord& r) { return r.balance_residual_kw; }},
    };

    const double t_from = t_end - window_s - 1e-12;
    std::vector<ChannelStats> stats;
    for (const Channel& ch : channels) {
        ChannelStats s;
        s.name = ch.name;
        double sum = 0.0;
        long n = 0;
        double mn = 0.0, mx = 0.0;
        for (const SimRecord& r : records) {
            if (r.t_s < t_from) continue;
            const double v = ch.get(r);
            if (n == 0) {
                mn = mx = v;
            } else {
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
            sum += v;
            ++n;
        }
        s.mean = sum / static_cast<double>(n);
        s.min = mn;
        s.max = mx;
        stats.push_back(s);
    }
    return stats;
}

}  // namespace pvbsim

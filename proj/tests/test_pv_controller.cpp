#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pvbsim/pv_array.hpp"
#include "pvbsim/pv_controller.hpp"

using namespace pvbsim;

namespace {

const PvParams& array() {
    static const PvParams p = PvParams::calibrated(165e3, 600);
    return p;
}

constexpr EnvConditions kStc{1000.0, 25.0};

MpptState tracker_for(const EnvConditions& env, double v_ref0) {
    MpptState s;
    s.v_oc_estimate_v = open_circuit_voltage(array(), env);
    const auto mpp = true_mpp(array(), env);
    s.v_mpp_estimate_v = mpp.voltage_v;
    s.v_ref_v = v_ref0;
    return s;
}

PvOperatingPoint measure(const EnvConditions& env, double v) {
    const double i = pv_current(array(), env, v);
    return {v, i, v * i};
}

}  // namespace

TEST_CASE("incond holds when nothing changed") {
    MpptState s = tracker_for(kStc, 200.0);
    s.prev_voltage_v = 200.0;
    s.prev_current_a = 5.0;
    const MpptState next = incond_step(s, {200.0, 5.0, 1000.0});
    CHECK(next.v_ref_v == s.v_ref_v);
}

TEST_CASE("incond climbs left of the maximum power point") {
    MpptState s = tracker_for(kStc, 260.0);
    const auto p1 = measure(kStc, 250.0);
    const auto p2 = measure(kStc, 260.0);  // still left of V_mpp ~ 305.7 V
    s.prev_voltage_v = p1.voltage_v;
    s.prev_current_a = p1.current_a;
    const MpptState next = incond_step(s, p2);
    CHECK(next.v_ref_v == doctest::Approx(s.v_ref_v + s.step_size_v));
}

TEST_CASE("incond backs off right of the maximum power point") {
    MpptState s = tracker_for(kStc, 350.0);
    const auto p1 = measure(kStc, 340.0);
    const auto p2 = measure(kStc, 350.0);
    s.prev_voltage_v = p1.voltage_v;
    s.prev_current_a = p1.current_a;
    const MpptState next = incond_step(s, p2);
    CHECK(next.v_ref_v == doctest::Approx(s.v_ref_v - s.step_size_v));
}

TEST_CASE("steady-voltage current changes steer the reference") {
    MpptState s = tracker_for(kStc, 300.0);
    s.prev_voltage_v = 300.0;
    s.prev_current_a = 5.0;
    CHECK(incond_step(s, {300.0, 6.0, 1800.0}).v_ref_v ==
          doctest::Approx(s.v_ref_v + s.step_size_v));
    CHECK(incond_step(s, {300.0, 4.0, 1200.0}).v_ref_v ==
          doctest::Approx(s.v_ref_v - s.step_size_v));
}

TEST_CASE("incond converges from half open-circuit voltage in 2000 steps") {
    const auto mpp = true_mpp(array(), kStc);  // the oracle
    MpptState s = tracker_for(kStc, 0.5 * open_circuit_voltage(array(), kStc));
    for (int k = 0; k < 2000; ++k) s = incond_step(s, measure(kStc, s.v_ref_v));
    CHECK(std::abs(s.v_ref_v - mpp.voltage_v) <= 2.0 * s.step_size_v);
}

TEST_CASE("incond clamps the reference into [0, v_oc]") {
    MpptState s = tracker_for(kStc, 0.5);
    s.step_size_v = 5.0;
    s.prev_voltage_v = 10.0;
    s.prev_current_a = 580.0;
    // force a downward decision from a right-of-mpp style measurement
    const MpptState down = incond_step(s, measure(kStc, 383.0));
    CHECK(down.v_ref_v >= 0.0);
    s.v_ref_v = s.v_oc_estimate_v - 0.5;
    const MpptState up = incond_step(s, measure(kStc, 200.0));
    CHECK(up.v_ref_v <= s.v_oc_estimate_v);
}

TEST_CASE("mppt closed loop with converter lag reaches the oracle power") {
    for (double g : {200.0, 600.0, 1000.0}) {
        const EnvConditions env{g, 25.0};
        const auto mpp = true_mpp(array(), env);
        MpptState s = tracker_for(env, 0.8 * open_circuit_voltage(array(), env));
        ConverterState conv;
        conv.terminal_voltage_v = s.v_ref_v;
        const double dt = 1e-3;
        double v_min = 1e9, v_max = -1e9;
        for (int k = 0; k < 3000; ++k) {
            if (k % 10 == 0) s = incond_step(s, measure(env, conv.terminal_voltage_v));
            conv = converter_advance(conv, s.v_ref_v, dt);
            if (k >= 2500) {
                v_min = std::min(v_min, s.v_ref_v);
                v_max = std::max(v_max, s.v_ref_v);
            }
        }
        const double p_final = measure(env, conv.terminal_voltage_v).power_w;
        const auto lo = measure(env, mpp.voltage_v - s.step_size_v);
        const auto hi = measure(env, mpp.voltage_v + s.step_size_v);
        const double band = mpp.power_w - std::min(lo.power_w, hi.power_w);
        CHECK(mpp.power_w - p_final <= std::max(0.01 * mpp.power_w, band));
        CHECK(v_max - v_min <= 2.0 * s.step_size_v + 1e-9);  // bounded limit cycle
    }
}

TEST_CASE("curtailment tracks a 150 kW reference at STC") {
    MpptState s = tracker_for(kStc, 320.0);
    double v = s.v_ref_v;
    for (int k = 0; k < 3000; ++k) {
        s = curtail_step(s, measure(kStc, v), 150e3, 1e-4);
        v = s.v_ref_v;
    }
    CHECK(measure(kStc, v).power_w == doctest::Approx(150e3).epsilon(0.01));
}

TEST_CASE("zero reference parks the array at open circuit") {
    MpptState s = tracker_for(kStc, 320.0);
    double v = s.v_ref_v;
    for (int k = 0; k < 5000; ++k) {
        s = curtail_step(s, measure(kStc, v), 0.0, 1e-4);
        v = s.v_ref_v;
    }
    CHECK(v == doctest::Approx(s.v_oc_estimate_v).epsilon(1e-6));
    CHECK(measure(kStc, v).power_w <= 1e3);
}

TEST_CASE("references beyond the array maximum saturate at the MPP") {
    const auto mpp = true_mpp(array(), kStc);
    MpptState s = tracker_for(kStc, 350.0);
    double v = s.v_ref_v;
    for (int k = 0; k < 5000; ++k) {
        s = curtail_step(s, measure(kStc, v), 200e3, 1e-4);
        v = s.v_ref_v;
    }
    CHECK(measure(kStc, v).power_w == doctest::Approx(mpp.power_w).epsilon(0.01));
}

TEST_CASE("curtailment accuracy across the reference range") {
    const auto mpp = true_mpp(array(), kStc);
    for (double frac : {0.05, 0.3, 0.7, 0.95}) {
        const double p_ref = frac * mpp.power_w;
        MpptState s = tracker_for(kStc, mpp.voltage_v);
        double v = s.v_ref_v;
        for (int k = 0; k < 8000; ++k) {
            s = curtail_step(s, measure(kStc, v), p_ref, 1e-4);
            v = s.v_ref_v;
        }
        CHECK(std::abs(measure(kStc, v).power_w - p_ref) <= 0.01 * p_ref);
    }
}

TEST_CASE("switching to a power reference at the current power is seamless") {
    MpptState s = tracker_for(kStc, 0.8 * open_circuit_voltage(array(), kStc));
    ConverterState conv;
    conv.terminal_voltage_v = s.v_ref_v;
    const double dt = 1e-3;
    for (int k = 0; k < 3000; ++k) {
        if (k % 10 == 0) s = incond_step(s, measure(kStc, conv.terminal_voltage_v));
        conv = converter_advance(conv, s.v_ref_v, dt);
    }
    const double p_hold = measure(kStc, conv.terminal_voltage_v).power_w;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        if (k % 10 == 0)
            s = curtail_step(s, measure(kStc, conv.terminal_voltage_v), p_hold, 1e-4);
        conv = converter_advance(conv, s.v_ref_v, dt);
        worst = std::max(worst,
                         std::abs(measure(kStc, conv.terminal_voltage_v).power_w - p_hold));
    }
    CHECK(worst <= 0.02 * p_hold);
}

TEST_CASE("converter relaxation follows the first-order response") {
    ConverterState c;
    c.tracking_time_constant_s = 0.01;
    c.terminal_voltage_v = 42.0;
    CHECK(converter_advance(c, 42.0, 0.005).terminal_voltage_v ==
          doctest::Approx(42.0));

    c.terminal_voltage_v = 0.0;
    CHECK(converter_advance(c, 100.0, 0.01).terminal_voltage_v ==
          doctest::Approx(63.21).epsilon(1e-4));

    c.terminal_voltage_v = 0.0;
    CHECK(converter_advance(c, 100.0, 0.1).terminal_voltage_v ==
          doctest::Approx(100.0).epsilon(1e-4));

    CHECK_THROWS_AS(converter_advance(c, 100.0, 0.0), std::invalid_argument);
}

TEST_CASE("power reference mode rejects negative targets") {
    CHECK_THROWS_AS(PvControlMode::power_reference(-1.0), std::invalid_argument);
    MpptState s = tracker_for(kStc, 320.0);
    CHECK_THROWS_AS(curtail_step(s, measure(kStc, 320.0), -5.0, 1e-4),
                    std::invalid_argument);
}

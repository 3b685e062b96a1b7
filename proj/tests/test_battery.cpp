#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "pvbsim/battery.hpp"

using namespace pvbsim;

namespace {

BatteryParams ideal() {
    BatteryParams p;
    p.efficiency_charge = 1.0;
    p.efficiency_discharge = 1.0;
    p.tracking_time_constant_s = 0.0;
    return p;
}

}  // namespace

TEST_CASE("one-hour charge arithmetic") {
    BatteryState s;
    s.soc = 0.5;
    const BatteryState next = battery_advance(s, ideal(), -10.0, 3600.0);
    CHECK(next.p_bat_kw == doctest::Approx(-10.0));
    CHECK(next.soc == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("a full battery refuses to charge") {
    BatteryState s;
    s.soc = 0.95;
    const BatteryState next = battery_advance(s, ideal(), -10.0, 1.0);
    CHECK(next.p_bat_kw == 0.0);
    CHECK(next.p_ref_kw == 0.0);
    CHECK(next.soc == doctest::Approx(0.95));
}

TEST_CASE("an empty battery refuses to discharge") {
    BatteryState s;
    s.soc = 0.20;
    const BatteryState next = battery_advance(s, ideal(), 10.0, 1.0);
    CHECK(next.p_bat_kw == 0.0);
    CHECK(next.soc == doctest::Approx(0.20));
}

TEST_CASE("charging at the lower limit is legal") {
    BatteryState s;
    s.soc = 0.19;
    const BatteryState next = battery_advance(s, ideal(), -10.0, 1.0);
    CHECK(next.p_bat_kw == doctest::Approx(-10.0));
    CHECK(next.soc > s.soc);
}

TEST_CASE("references are clamped to the converter rating") {
    BatteryState s;
    s.soc = 0.5;
    CHECK(battery_advance(s, ideal(), 50.0, 1.0).p_bat_kw == doctest::Approx(10.0));
    CHECK(battery_advance(s, ideal(), -50.0, 1.0).p_bat_kw == doctest::Approx(-10.0));
}

TEST_CASE("realized power stays within limits under random references") {
    BatteryParams p = ideal();
    p.tracking_time_constant_s = 0.05;
    BatteryState s;
    s.soc = 0.5;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ref(-40.0, 40.0);
    for (int k = 0; k < 20000; ++k) {
        s = battery_advance(s, p, ref(rng), 0.1);
        CHECK(s.p_bat_kw >= -p.p_charge_max_kw - 1e-12);
        CHECK(s.p_bat_kw <= p.p_discharge_max_kw + 1e-12);
    }
}

TEST_CASE("soc never leaves the window by more than one step") {
    BatteryParams p = ideal();
    p.capacity_kwh = 1.0;  // small capacity stresses the limits
    const double dt = 0.5;
    const double delta = p.p_charge_max_kw * dt / (p.capacity_kwh * 3600.0);
    BatteryState s;
    s.soc = 0.5;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ref(-15.0, 15.0);
    for (int k = 0; k < 50000; ++k) {
        s = battery_advance(s, p, ref(rng), dt);
        CHECK(s.soc >= p.soc_min - delta - 1e-12);
        CHECK(s.soc <= p.soc_max + delta + 1e-12);
    }
}

TEST_CASE("energy accounting is exact with unit efficiencies") {
    BatteryParams p = ideal();
    p.tracking_time_constant_s = 0.05;
    BatteryState s;
    s.soc = 0.5;
    const double soc0 = s.soc;
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ref(-10.0, 10.0);
    const double dt = 0.1;
    double energy_kws = 0.0;
    double throughput = 0.0;
    for (int k = 0; k < 5000; ++k) {
        s = battery_advance(s, p, ref(rng), dt);
        energy_kws += s.p_bat_kw * dt;
        throughput += std::abs(s.p_bat_kw) * dt;
    }
    const double stored = p.capacity_kwh * 3600.0 * (s.soc - soc0);
    CHECK(std::abs(stored + energy_kws) <= 1e-9 * std::max(throughput, 1.0));
}

TEST_CASE("the sign convention round-trips through the soc") {
    BatteryParams p = ideal();
    p.efficiency_charge = 0.95;
    p.efficiency_discharge = 0.95;
    BatteryState s;
    s.soc = 0.5;
    const BatteryState discharged = battery_advance(s, p, 5.0, 10.0);
    CHECK(discharged.p_bat_kw > 0.0);
    CHECK(discharged.soc < s.soc);
    const BatteryState charged = battery_advance(s, p, -5.0, 10.0);
    CHECK(charged.p_bat_kw < 0.0);
    CHECK(charged.soc > s.soc);
}

TEST_CASE("efficiencies slow the round trip") {
    BatteryParams p = ideal();
    p.efficiency_charge = 0.9;
    BatteryState s;
    s.soc = 0.5;
    const BatteryState next = battery_advance(s, p, -10.0, 3600.0);
    CHECK(next.soc == doctest::Approx(0.5 + 0.09).epsilon(1e-12));
}

TEST_CASE("soc gate latches and re-enters with hysteresis") {
    const BatteryParams p;  // soc_hysteresis = 0.01
    SocGate g;
    g = soc_gate_update(g, 0.95, p);
    CHECK(g.charge_blocked);
    g = soc_gate_update(g, 0.945, p);  // inside the band: still latched
    CHECK(g.charge_blocked);
    g = soc_gate_update(g, 0.9399, p);
    CHECK_FALSE(g.charge_blocked);

    g = soc_gate_update(g, 0.20, p);
    CHECK(g.discharge_blocked);
    g = soc_gate_update(g, 0.205, p);
    CHECK(g.discharge_blocked);
    g = soc_gate_update(g, 0.2101, p);
    CHECK_FALSE(g.discharge_blocked);
}

TEST_CASE("invalid parameters and steps are rejected") {
    BatteryParams p;
    p.soc_min = 0.95;
    p.soc_max = 0.20;
    CHECK_THROWS_WITH_AS(p.validate(), "battery: requires 0 <= soc_min < soc_max <= 1",
                         std::invalid_argument);
    BatteryState s;
    CHECK_THROWS_AS(battery_advance(s, ideal(), 1.0, 0.0), std::invalid_argument);
}

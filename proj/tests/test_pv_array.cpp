#include <doctest.h>

#include <cmath>

#include "pvbsim/errors.hpp"
#include "pvbsim/pv_array.hpp"

using namespace pvbsim;

namespace {

const PvParams& rated165() {
    static const PvParams p = PvParams::calibrated(165e3, 600);
    return p;
}

constexpr EnvConditions kStc{1000.0, 25.0};

// Independent brute-force oracle: argmax of V*I over a 1 mV grid, straight
// calls into the diode solve, no reuse of true_mpp internals.
PvOperatingPoint sweep_oracle_mpp(const PvParams& p, const EnvConditions& env,
                                  double v_max) {
    PvOperatingPoint best;
    for (double v = 0.0; v <= v_max; v += 1e-3) {
        const double i = pv_current(p, env, v);
        if (v * i > best.power_w) best = {v, i, v * i};
    }
    return best;
}

// Counts +/- sign changes of the finite-difference dP/dV, ignoring diffs
// below the solver noise floor.
int slope_sign_changes(const std::vector<PvOperatingPoint>& curve) {
    int changes = 0;
    int prev_sign = 0;
    for (size_t k = 1; k < curve.size(); ++k) {
        const double dp = curve[k].power_w - curve[k - 1].power_w;
        if (std::abs(dp) < 1e-6) continue;
        const int sign = dp > 0.0 ? 1 : -1;
        if (prev_sign != 0 && sign != prev_sign) ++changes;
        prev_sign = sign;
    }
    return changes;
}

}  // namespace

TEST_CASE("calibrated array hits the 165 kW nameplate at STC") {
    const auto mpp = true_mpp(rated165(), kStc);
    CHECK(mpp.power_w == doctest::Approx(165e3).epsilon(0.005));
    CHECK(mpp.power_w >= 165e3);  // calibration keeps the >= rated side
}

TEST_CASE("zero irradiance gives zero current at any voltage") {
    const EnvConditions dark{0.0, 25.0};
    for (double v : {0.0, 10.0, 200.0, 383.0, 1000.0})
        CHECK(pv_current(rated165(), dark, v) == 0.0);
}

TEST_CASE("short-circuit current scales with irradiance") {
    // golden value frozen from the voltage-sweep oracle (V = 0 sample)
    const double isc_stc = pv_current(rated165(), kStc, 0.0);
    const double isc_600 = pv_current(rated165(), {600.0, 25.0}, 0.0);
    CHECK(isc_600 == doctest::Approx(349.277894).epsilon(1e-6));
    CHECK(isc_600 / isc_stc == doctest::Approx(0.6).epsilon(1e-3));
}

TEST_CASE("power curve peaks at the nameplate and is all zero in the dark") {
    const double voc = open_circuit_voltage(rated165(), kStc);
    const auto curve = pv_power_curve(rated165(), kStc, 0.0, voc, 10001);
    double max_p = 0.0;
    for (const auto& pt : curve) max_p = std::max(max_p, pt.power_w);
    CHECK(max_p == doctest::Approx(165e3).epsilon(0.005));

    const auto dark = pv_power_curve(rated165(), {0.0, 25.0}, 0.0, voc, 101);
    for (const auto& pt : dark) CHECK(pt.power_w == 0.0);

    for (const auto& pt : curve) CHECK(pt.power_w == pt.voltage_v * pt.current_a);
}

TEST_CASE("the P(V) curve has exactly one interior maximum") {
    const double voc = open_circuit_voltage(rated165(), kStc);
    for (double g : {400.0, 1000.0}) {
        const auto curve = pv_power_curve(rated165(), {g, 25.0}, 0.0, voc,
                                          static_cast<int>(voc / 1e-3) + 1);
        CHECK(slope_sign_changes(curve) == 1);
    }
}

TEST_CASE("true_mpp agrees with the independent sweep oracle at G=500") {
    const EnvConditions env{500.0, 25.0};
    const auto mpp = true_mpp(rated165(), env);
    // goldens recorded from the sweep oracle before the build
    CHECK(mpp.voltage_v == doctest::Approx(302.731192).epsilon(1e-5));
    CHECK(mpp.power_w == doctest::Approx(81291.304365).epsilon(1e-6));

    const auto oracle =
        sweep_oracle_mpp(rated165(), env, open_circuit_voltage(rated165(), env));
    CHECK(mpp.power_w == doctest::Approx(oracle.power_w).epsilon(1e-7));
    CHECK(std::abs(mpp.voltage_v - oracle.voltage_v) < 2e-3);
}

TEST_CASE("true_mpp of a dark array is zero") {
    const auto mpp = true_mpp(rated165(), {0.0, 25.0});
    CHECK(mpp.power_w == 0.0);
}

TEST_CASE("mpp power is non-decreasing in irradiance") {
    double prev = 0.0;
    for (int g = 100; g <= 1000; g += 100) {
        const double p = true_mpp(rated165(), {static_cast<double>(g), 25.0}).power_w;
        CHECK(p >= prev);
        prev = p;
    }
}

TEST_CASE("current vanishes at open circuit and never increases with voltage") {
    const double voc = open_circuit_voltage(rated165(), kStc);
    CHECK(pv_current(rated165(), kStc, voc) == doctest::Approx(0.0).epsilon(1e-6));
    double prev = pv_current(rated165(), kStc, 0.0);
    for (double v = 1.0; v <= voc + 5.0; v += 1.0) {
        const double i = pv_current(rated165(), kStc, v);
        CHECK(i <= prev + 1e-9);
        prev = i;
    }
}

TEST_CASE("calibration round-trips across ratings") {
    for (double rated : {10e3, 165e3, 1e6}) {
        const PvParams p = PvParams::calibrated(rated, 600);
        const double got = true_mpp(p, kStc).power_w;
        CHECK(got == doctest::Approx(rated).epsilon(0.005));
        CHECK(got >= rated);
    }
}

TEST_CASE("temperature enters through photocurrent and thermal voltage") {
    // short-circuit current scales linearly with the temperature coefficient
    const double isc25 = pv_current(rated165(), {1000.0, 25.0}, 0.0);
    const double isc60 = pv_current(rated165(), {1000.0, 60.0}, 0.0);
    const double gain = 1.0 + 35.0 * rated165().current_temp_coeff_a_per_c /
                                  rated165().photocurrent_stc_a;
    CHECK(isc60 / isc25 == doctest::Approx(gain).epsilon(1e-3));

    // with a fixed saturation current the open-circuit voltage follows the
    // thermal voltage upward; the temperature dependence is emergent, not a
    // separate coefficient
    CHECK(open_circuit_voltage(rated165(), {1000.0, 60.0}) >
          open_circuit_voltage(rated165(), {1000.0, 25.0}));
}

TEST_CASE("bad inputs are rejected") {
    CHECK_THROWS_AS(pv_current(rated165(), kStc, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(pv_power_curve(rated165(), kStc, 10.0, 5.0, 11),
                    std::invalid_argument);
    CHECK_THROWS_AS(pv_power_curve(rated165(), kStc, 0.0, 10.0, 1),
                    std::invalid_argument);
    PvParams bad = rated165();
    bad.ideality_factor = 3.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = rated165();
    bad.series_resistance_ohm = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

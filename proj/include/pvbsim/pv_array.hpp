#pragma once

#include <vector>

namespace pvbsim {

// Ambient operating condition seen by the array.
struct EnvConditions {
    double irradiance_w_m2 = 0.0;
    double cell_temperature_c = 25.0;

    bool operator==(const EnvConditions&) const = default;
};

// Single-diode array parameterization, stored at array level: the diode
// exponent uses cells_series * thermal voltage, everything else is already
// scaled to the full array. Photocurrent grows linearly with irradiance and
// with temperature (current_temp_coeff); the thermal voltage scales with
// absolute temperature, so the open-circuit temperature behaviour emerges
// from the model itself.
struct PvParams {
    double photocurrent_stc_a = 0.0;
    double saturation_current_a = 0.0;
    double series_resistance_ohm = 1e-3;
    double shunt_resistance_ohm = 1e3;
    double ideality_factor = 1.3;
    double thermal_voltage_stc_v = 0.0256926;  // kT/q at 25 C, per cell
    int cells_series = 600;
    int strings_parallel = 1;
    double current_temp_coeff_a_per_c = 0.0;
    double irradiance_stc_w_m2 = 1000.0;
    double temp_stc_c = 25.0;

    // Builds an array whose maximum power at STC equals rated_power_w.
    // A silicon-like cell template is scaled to cells_series cells per string
    // and as many parallel strings as the rating needs, then the photocurrent
    // is calibrated by bisection so that the STC maximum power lands on (or a
    // hair above, never below) the rating.
    static PvParams calibrated(double rated_power_w = 165e3, int cells_series = 600);

    // Throws std::invalid_argument naming the violated invariant.
    void validate() const;

    bool operator==(const PvParams&) const = default;
};

struct PvOperatingPoint {
    double voltage_v = 0.0;
    double current_a = 0.0;
    double power_w = 0.0;  // always voltage_v * current_a
};

// Terminal current at a given terminal voltage, from the implicit single-diode
// equation solved by damped Newton iteration (relative tolerance 1e-9, damping
// 0.5 on overshoot, bisection safeguard). Returns 0 beyond open circuit.
// Throws NumericalError after 100 iterations without convergence.
double pv_current(const PvParams& params, const EnvConditions& env,
                  double terminal_voltage_v);

// Uniformly sampled P(V) curve on [v_min, v_max]; the brute-force MPP oracle.
// Requires v_min < v_max and n_points >= 2.
std::vector<PvOperatingPoint> pv_power_curve(const PvParams& params,
                                             const EnvConditions& env,
                                             double v_min_v, double v_max_v,
                                             int n_points);

// Maximum power point: argmax over a 1 mV voltage sweep, refined by
// golden-section search to better than 0.01 V.
PvOperatingPoint true_mpp(const PvParams& params, const EnvConditions& env);

// Voltage where the terminal current reaches zero (0 when there is no
// photocurrent at all).
double open_circuit_voltage(const PvParams& params, const EnvConditions& env);

}  // namespace pvbsim

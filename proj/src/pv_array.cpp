#include "pvbsim/pv_array.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pvbsim/errors.hpp"

namespace pvbsim {

namespace {

// Per-(params, env) resolution of the diode equation coefficients.
struct DiodeCoeffs {
    double iph;   // photocurrent, A
    double isat;  // saturation current, A
    double rs;    // ohm
    double rsh;   // ohm
    double a;     // modified junction voltage scale, V (n * Ns * Vt(T))
};

DiodeCoeffs resolve(const PvParams& p, const EnvConditions& env) {
    const double t_k = env.cell_temperature_c + 273.15;
    const double vt = p.thermal_voltage_stc_v * t_k / (p.temp_stc_c + 273.15);
    double iph = (p.photocurrent_stc_a +
                  p.current_temp_coeff_a_per_c * (env.cell_temperature_c - p.temp_stc_c)) *
                 env.irradiance_w_m2 / p.irradiance_stc_w_m2;
    iph = std::max(iph, 0.0);
    return {iph, p.saturation_current_a, p.series_resistance_ohm,
            p.shunt_resistance_ohm, p.ideality_factor * p.cells_series * vt};
}

// f(i) = iph - Isat*(exp((v + i*Rs)/a) - 1) - (v + i*Rs)/Rsh - i.
// Guard against exp overflow: past exponent 500 the root is firmly negative.
double residual(const DiodeCoeffs& c, double v, double i) {
    const double vj = (v + i * c.rs) / c.a;
    if (vj > 500.0) return -std::numeric_limits<double>::infinity();
    return c.iph - c.isat * std::expm1(vj) - (v + i * c.rs) / c.rsh - i;
}

double residual_slope(const DiodeCoeffs& c, double v, double i) {
    const double vj = (v + i * c.rs) / c.a;
    const double de = vj > 500.0 ? std::numeric_limits<double>::infinity()
                                 : std::exp(vj);
    return -c.isat * de * c.rs / c.a - c.rs / c.rsh - 1.0;
}

// Damped Newton with a bisection safeguard on the bracket [0, iph].
// f is strictly decreasing in i, so the root is unique.
double solve_current(const PvParams& p, const DiodeCoeffs& c, double v,
                     double guess) {
    if (c.iph <= 0.0) return 0.0;
    if (residual(c, v, 0.0) <= 0.0) return 0.0;  // at or beyond open circuit

    double lo = 0.0;
    double hi = c.iph;
    double i = std::clamp(guess, lo, hi);
    double f = residual(c, v, i);
    constexpr double rel_tol = 1e-12;  // comfortably tighter than the 1e-9 contract
    for (int iter = 0; iter < 100; ++iter) {
        if (f > 0.0) lo = i; else hi = i;
        double step = -f / residual_slope(c, v, i);
        double next = i + step;
        while (next <= lo || next >= hi) {
            step *= 0.5;  // damp back into the bracket
            next = i + step;
            if (std::abs(step) < rel_tol * std::max(1.0, std::abs(i))) break;
        }
        double fn = residual(c, v, next);
        if (std::abs(fn) > std::abs(f)) {  // overshoot: damp once more
            step *= 0.5;
            next = i + step;
            fn = residual(c, v, next);
        }
        const bool converged = std::abs(next - i) <= rel_tol * std::max(1.0, std::abs(next));
        i = next;
        f = fn;
        if (converged || f == 0.0) return std::max(i, 0.0);
    }
    std::ostringstream msg;
    msg << "pv_current failed to converge after 100 iterations"
        << " (G=" << c.iph / std::max(p.photocurrent_stc_a, 1e-300) * p.irradiance_stc_w_m2
        << " W/m2 equiv, V=" << v << " V, Iph=" << c.iph << " A, Isat=" << c.isat
        << " A, Rs=" << c.rs << ", Rsh=" << c.rsh << ", a=" << c.a << ")";
    throw NumericalError(msg.str());
}

double golden_max(const DiodeCoeffs& c, double lo, double hi, double tol) {
    constexpr double invphi = 0.6180339887498949;
    auto power = [&](double v) {
        // direct solve, warm-started from photocurrent
        double i = c.iph;
        if (residual(c, v, 0.0) <= 0.0) return 0.0;
        double l = 0.0, h = c.iph, f = residual(c, v, i);
        for (int k = 0; k < 200; ++k) {
            if (f > 0.0) l = i; else h = i;
            double next = i - f / residual_slope(c, v, i);
            if (next <= l || next >= h) next = 0.5 * (l + h);
            if (std::abs(next - i) <= 1e-13 * std::max(1.0, std::abs(next))) { i = next; break; }
            i = next;
            f = residual(c, v, i);
        }
        return v * std::max(i, 0.0);
    };
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = power(x1), f2 = power(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = power(x2);
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = power(x1);
        }
    }
    return 0.5 * (a + b);
}

double open_circuit_voltage_impl(const DiodeCoeffs& c) {
    if (c.iph <= 0.0) return 0.0;
    // At open circuit i = 0, so Rs drops out: iph = Isat*(exp(v/a)-1) + v/Rsh.
    double hi = c.a * std::log1p(c.iph / c.isat) + 1.0;
    double lo = 0.0;
    for (int k = 0; k < 200 && hi - lo > 1e-9; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double f = c.iph - c.isat * std::expm1(mid / c.a) - mid / c.rsh;
        (f > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

void PvParams::validate() const {
    auto fail = [](const char* what) { throw std::invalid_argument(what); };
    if (!(photocurrent_stc_a >= 0.0)) fail("pv: photocurrent_stc must be >= 0");
    if (!(saturation_current_a > 0.0)) fail("pv: saturation_current must be > 0");
    if (!(series_resistance_ohm > 0.0)) fail("pv: series_resistance must be > 0");
    if (!(shunt_resistance_ohm > 0.0)) fail("pv: shunt_resistance must be > 0");
    if (!(ideality_factor >= 1.0 && ideality_factor <= 2.0))
        fail("pv: ideality_factor must be in [1, 2]");
    if (!(thermal_voltage_stc_v > 0.0)) fail("pv: thermal_voltage_stc must be > 0");
    if (cells_series < 1) fail("pv: cells_series must be >= 1");
    if (strings_parallel < 1) fail("pv: strings_parallel must be >= 1");
    if (!(irradiance_stc_w_m2 > 0.0)) fail("pv: irradiance_stc must be > 0");
}

double pv_current(const PvParams& params, const EnvConditions& env,
                  double terminal_voltage_v) {
    if (terminal_voltage_v < 0.0)
        throw std::invalid_argument("pv_current: terminal voltage must be >= 0");
    if (!(env.irradiance_w_m2 >= 0.0) || !std::isfinite(env.irradiance_w_m2))
        throw std::invalid_argument("pv_current: irradiance must be finite and >= 0");
    const DiodeCoeffs c = resolve(params, env);
    return solve_current(params, c, terminal_voltage_v, c.iph);
}

std::vector<PvOperatingPoint> pv_power_curve(const PvParams& params,
                                             const EnvConditions& env,
                                             double v_min_v, double v_max_v,
                                             int n_points) {
    if (!(v_min_v < v_max_v))
        throw std::invalid_argument("pv_power_curve: requires v_min < v_max");
    if (n_points < 2)
        throw std::invalid_argument("pv_power_curve: requires n_points >= 2");
    const DiodeCoeffs c = resolve(params, env);
    std::vector<PvOperatingPoint> curve;
    curve.reserve(static_cast<size_t>(n_points));
    double guess = c.iph;  // warm start carried along the sweep
    for (int k = 0; k < n_points; ++k) {
        const double v = v_min_v + (v_max_v - v_min_v) * k / (n_points - 1);
        const double i = solve_current(params, c, v, guess);
        guess = i;
        curve.push_back({v, i, v * i});
    }
    return curve;
}

PvOperatingPoint true_mpp(const PvParams& params, const EnvConditions& env) {
    const DiodeCoeffs c = resolve(params, env);
    const double voc = open_circuit_voltage_impl(c);
    if (voc <= 0.0) return {0.0, 0.0, 0.0};

    // 1 mV sweep for the global argmax.
    const int n = static_cast<int>(voc / 1e-3) + 2;
    double best_v = 0.0, best_p = -1.0;
    double guess = c.iph;
    for (int k = 0; k < n; ++k) {
        const double v = voc * k / (n - 1);
        const double i = solve_current(params, c, v, guess);
        guess = i;
        if (v * i > best_p) {
            best_p = v * i;
            best_v = v;
        }
    }
    // Golden-section refinement inside the bracketing interval.
    const double h = voc / (n - 1);
    const double v_star = golden_max(c, std::max(0.0, best_v - h),
                                     std::min(voc, best_v + h), 1e-4);
    const double i_star = solve_current(params, c, v_star, guess);
    return {v_star, i_star, v_star * i_star};
}

double open_circuit_voltage(const PvParams& params, const EnvConditions& env) {
    return open_circuit_voltage_impl(resolve(params, env));
}

PvParams PvParams::calibrated(double rated_power_w, int cells_series) {
    if (!(rated_power_w > 0.0))
        throw std::invalid_argument("pv: rated power must be > 0");
    if (cells_series < 1)
        throw std::invalid_argument("pv: cells_series must be >= 1");

    // Silicon-like cell template: Voc 0.64 V, Isc 8.5 A, +0.05 %/C on Iph.
    constexpr double iph_cell = 8.5;
    constexpr double voc_cell = 0.64;
    constexpr double rs_cell = 0.005;
    constexpr double rsh_cell = 8.0;
    constexpr double ideality = 1.3;
    constexpr double vt_stc = 0.0256926;
    const double isat_cell = iph_cell / std::expm1(voc_cell / (ideality * vt_stc));

    PvParams p;
    p.ideality_factor = ideality;
    p.thermal_voltage_stc_v = vt_stc;
    p.cells_series = cells_series;

    // One string first, to size the number of parallel strings.
    auto string_params = [&](int strings, double mult) {
        PvParams q = p;
        q.strings_parallel = strings;
        q.photocurrent_stc_a = iph_cell * strings * mult;
        q.saturation_current_a = isat_cell * strings;
        q.series_resistance_ohm = rs_cell * cells_series / strings;
        q.shunt_resistance_ohm = rsh_cell * cells_series / strings;
        q.current_temp_coeff_a_per_c = 0.0005 * q.photocurrent_stc_a;
        return q;
    };
    auto mpp_power = [&](const PvParams& q) {
        const DiodeCoeffs c = resolve(q, {q.irradiance_stc_w_m2, q.temp_stc_c});
        const double voc = open_circuit_voltage_impl(c);
        const double v = golden_max(c, 0.0, voc, 1e-5);
        return v * solve_current(q, c, v, c.iph);
    };

    const double p_string = mpp_power(string_params(1, 1.0));
    const int strings =
        std::max(1, static_cast<int>(std::lround(rated_power_w / p_string)));

    // Bisection on the photocurrent multiplier; keep the >= rated side so the
    // calibrated array never undershoots the nameplate.
    double lo = 1.0, hi = 1.0;
    while (mpp_power(string_params(strings, lo)) > rated_power_w) lo *= 0.5;
    while (mpp_power(string_params(strings, hi)) < rated_power_w) hi *= 2.0;
    for (int k = 0; k < 80 && (hi - lo) > 1e-10 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        (mpp_power(string_params(strings, mid)) < rated_power_w ? lo : hi) = mid;
    }
    PvParams out = string_params(strings, hi);
    out.validate();
    return out;
}

}  // namespace pvbsim

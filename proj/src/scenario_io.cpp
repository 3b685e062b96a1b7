#include "pvbsim/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string_view>
#include <vector>

#include "pvbsim/errors.hpp"

namespace pvbsim {

namespace {

struct RawValue {
    std::string text;
    int line = 0;
    int col = 0;
};

struct RawEventLine {
    std::string text;
    int line = 0;
};

struct RawDocument {
    std::map<std::string, std::map<std::string, RawValue>> sections;
    std::vector<RawEventLine> events;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

double parse_number(const RawValue& v) {
    double out;
    const std::string_view s = v.text;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(out))
        throw ParseError(v.line, v.col, "expected a finite number, got '" + v.text + "'");
    return out;
}

double parse_number_at(std::string_view tok, int line, int col) {
    return parse_number({std::string(tok), line, col});
}

RawDocument tokenize(const std::string& text) {
    RawDocument doc;
    std::istringstream stream(text);
    std::string raw_line;
    std::string section;
    int line_no = 0;
    static const char* known_sections[] = {"meta", "pv",  "battery",
                                           "inverter", "ems", "events"};
    while (std::getline(stream, raw_line)) {
        ++line_no;
        if (!raw_line.empty() && raw_line.back() == '\r') raw_line.pop_back();
        std::string_view line = trim(raw_line);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError(line_no, 1, "unterminated section header");
            const std::string name(trim(line.substr(1, line.size() - 2)));
            bool known = false;
            for (const char* s : known_sections) known |= name == s;
            if (!known)
                throw ParseError(line_no, 1, "unknown section [" + name + "]");
            section = name;
            continue;
        }
        if (section.empty())
            throw ParseError(line_no, 1, "content before any [section] header");

        if (section == "events") {
            doc.events.push_back({std::string(line), line_no});
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(line_no, 1, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ParseError(line_no, 1, "empty key");
        if (value.empty())
            throw ParseError(line_no, static_cast<int>(eq) + 2, "empty value");
        if (doc.sections[section].count(key))
            throw ParseError(line_no, 1, "duplicate key '" + key + "' in [" + section + "]");
        const int col = static_cast<int>(raw_line.find(value)) + 1;
        doc.sections[section][key] = {value, line_no, col};
    }
    return doc;
}

// Consumes keys from one section and rejects leftovers.
class KeyBag {
public:
    KeyBag(RawDocument& doc, std::string section)
        : section_(std::move(section)) {
        auto it = doc.sections.find(section_);
        if (it != doc.sections.end()) items_ = std::move(it->second);
    }

    std::optional<RawValue> maybe(const std::string& key) {
        auto it = items_.find(key);
        if (it == items_.end()) return std::nullopt;
        RawValue v = it->second;
        items_.erase(it);
        return v;
    }

    double number(const std::string& key, double fallback) {
        auto v = maybe(key);
        return v ? parse_number(*v) : fallback;
    }

    int integer(const std::string& key, int fallback) {
        auto v = maybe(key);
        if (!v) return fallback;
        const double d = parse_number(*v);
        if (d != std::floor(d))
            throw ParseError(v->line, v->col, "expected an integer for '" + key + "'");
        return static_cast<int>(d);
    }

    bool has(const std::string& key) const { return items_.count(key) != 0; }

    void finish() const {
        if (items_.empty()) return;
        const auto& [key, v] = *items_.begin();
        throw ParseError(v.line, v.col,
                         "unknown key '" + key + "' in [" + section_ + "]");
    }

private:
    std::string section_;
    std::map<std::string, RawValue> items_;
};

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

GridRequest parse_grid_request_args(const std::vector<std::string_view>& args,
                                    size_t from, int line) {
    GridRequest req;
    if (from >= args.size())
        throw ParseError(line, 1, "set_grid_request needs 'p=<kW>' or 'absorb_max'");
    bool have_p = false;
    for (size_t i = from; i < args.size(); ++i) {
        const std::string_view a = args[i];
        if (a == "absorb_max") {
            req.absorb_max = true;
            have_p = true;
            continue;
        }
        const size_t eq = a.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(line, 1, "bad grid-request token '" + std::string(a) + "'");
        const std::string_view key = a.substr(0, eq);
        const double value = parse_number_at(a.substr(eq + 1), line, 1);
        if (key == "p") {
            req.p_request_kw = value;
            have_p = true;
        } else if (key == "q") {
            req.q_request_kvar = value;
        } else if (key == "import_limit") {
            req.p_import_limit_kw = value;
        } else if (key == "export_limit") {
            req.p_export_limit_kw = value;
        } else {
            throw ParseError(line, 1,
                             "unknown grid-request field '" + std::string(key) + "'");
        }
    }
    if (!have_p)
        throw ParseError(line, 1, "set_grid_request needs 'p=<kW>' or 'absorb_max'");
    req.validate();
    return req;
}

Event parse_event_line(const RawEventLine& raw) {
    const auto args = split_ws(raw.text);
    if (args.size() < 2 || args[0].substr(0, 2) != "t=")
        throw ParseError(raw.line, 1, "expected 't=<s> <event> <value>'");
    const double t = parse_number_at(args[0].substr(2), raw.line, 3);
    if (t < 0.0) throw ParseError(raw.line, 1, "event time must be >= 0");
    const std::string_view name = args[1];

    auto one_value = [&](const char* what) {
        if (args.size() != 3)
            throw ParseError(raw.line, 1,
                             std::string(what) + " takes exactly one value");
        return parse_number_at(args[2], raw.line, 1);
    };
    try {
        if (name == "set_irradiance") return Event::set_irradiance(t, one_value("set_irradiance"));
        if (name == "set_temperature") return Event::set_temperature(t, one_value("set_temperature"));
        if (name == "set_dc_load") return Event::set_dc_load(t, one_value("set_dc_load"));
        if (name == "set_vdc_ref") return Event::set_vdc_ref(t, one_value("set_vdc_ref"));
        if (name == "set_q_ref") return Event::set_q_ref(t, one_value("set_q_ref"));
        if (name == "set_grid_request")
            return Event::set_grid_request(t, parse_grid_request_args(args, 2, raw.line));
    } catch (const std::invalid_argument& e) {
        throw ParseError(raw.line, 1, e.what());
    }
    throw ParseError(raw.line, 1, "unknown event '" + std::string(name) + "'");
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    RawDocument doc = tokenize(text);
    Scenario sc;

    {
        KeyBag meta(doc, "meta");
        sc.duration_s = meta.number("duration", sc.duration_s);
        sc.dt_s = meta.number("dt", sc.dt_s);
        sc.log_decimation = meta.integer("log_decimation", sc.log_decimation);
        meta.finish();
    }
    {
        KeyBag pv(doc, "pv");
        static const char* explicit_keys[] = {
            "photocurrent_stc_a",   "saturation_current_a",
            "series_resistance_ohm", "shunt_resistance_ohm",
            "ideality_factor",      "thermal_voltage_stc_v",
            "strings_parallel",     "current_temp_coeff_a_per_c"};
        bool any_explicit = false;
        for (const char* k : explicit_keys) any_explicit |= pv.has(k);

        sc.pv.rated_power_kw = pv.number("rated_power_kw", sc.pv.rated_power_kw);
        const int cells = pv.integer("cells_series", 600);
        if (any_explicit) {
            PvParams p;
            p.cells_series = cells;
            auto need = [&](const char* key) {
                auto v = pv.maybe(key);
                if (!v)
                    throw std::invalid_argument(
                        std::string("pv: explicit diode parameterization is "
                                    "missing '") + key + "'");
                return *v;
            };
            p.photocurrent_stc_a = parse_number(need("photocurrent_stc_a"));
            p.saturation_current_a = parse_number(need("saturation_current_a"));
            p.series_resistance_ohm = parse_number(need("series_resistance_ohm"));
            p.shunt_resistance_ohm = parse_number(need("shunt_resistance_ohm"));
            p.ideality_factor = parse_number(need("ideality_factor"));
            p.thermal_voltage_stc_v = parse_number(need("thermal_voltage_stc_v"));
            {
                auto v = need("strings_parallel");
                const double d = parse_number(v);
                if (d != std::floor(d))
                    throw ParseError(v.line, v.col, "expected an integer for 'strings_parallel'");
                p.strings_parallel = static_cast<int>(d);
            }
            p.current_temp_coeff_a_per_c = parse_number(need("current_temp_coeff_a_per_c"));
            sc.pv.params = p;
        } else {
            sc.pv.params = PvParams::calibrated(sc.pv.rated_power_kw * 1e3, cells);
        }
        sc.pv.efficiency = pv.number("efficiency", sc.pv.efficiency);
        sc.pv.tracking_time_constant_s =
            pv.number("tracking_time_constant", sc.pv.tracking_time_constant_s);
        sc.pv.mppt_step_v = pv.number("mppt_step_v", sc.pv.mppt_step_v);
        sc.pv.mppt_period_s = pv.number("mppt_period", sc.pv.mppt_period_s);
        sc.pv.curtail_gain_v_per_w =
            pv.number("curtail_gain_v_per_w", sc.pv.curtail_gain_v_per_w);
        pv.finish();
    }
    {
        KeyBag bat(doc, "battery");
        sc.battery.capacity_kwh = bat.number("capacity_kwh", sc.battery.capacity_kwh);
        sc.battery.soc_max = bat.number("soc_max", sc.battery.soc_max);
        sc.battery.soc_min = bat.number("soc_min", sc.battery.soc_min);
        sc.battery.p_charge_max_kw =
            bat.number("p_charge_max_kw", sc.battery.p_charge_max_kw);
        sc.battery.p_discharge_max_kw =
            bat.number("p_discharge_max_kw", sc.battery.p_discharge_max_kw);
        sc.battery.efficiency_charge =
            bat.number("efficiency_charge", sc.battery.efficiency_charge);
        sc.battery.efficiency_discharge =
            bat.number("efficiency_discharge", sc.battery.efficiency_discharge);
        sc.battery.tracking_time_constant_s =
            bat.number("tracking_time_constant", sc.battery.tracking_time_constant_s);
        sc.battery.soc_hysteresis = bat.number("soc_hysteresis", sc.battery.soc_hysteresis);
        sc.initial_soc = bat.number("initial_soc", sc.initial_soc);
        bat.finish();
    }
    {
        KeyBag inv(doc, "inverter");
        sc.inverter.capacitance_f = inv.number("capacitance_f", sc.inverter.capacitance_f);
        sc.inverter.v_dc_initial_v = inv.number("v_dc_initial", sc.inverter.v_dc_initial_v);
        sc.inverter.v_dc_ref_v = inv.number("v_dc_ref", sc.inverter.v_dc_ref_v);
        sc.inverter.kp_a_per_v = inv.number("kp", sc.inverter.kp_a_per_v);
        sc.inverter.ki_a_per_vs = inv.number("ki", sc.inverter.ki_a_per_vs);
        sc.inverter.current_time_constant_s =
            inv.number("current_time_constant", sc.inverter.current_time_constant_s);
        sc.inverter.ac_voltage_ll_v = inv.number("ac_voltage_ll", sc.inverter.ac_voltage_ll_v);
        sc.inverter.efficiency = inv.number("efficiency", sc.inverter.efficiency);
        sc.inverter.i_rated_a = inv.number("i_rated", sc.inverter.i_rated_a);
        inv.finish();
    }
    {
        KeyBag ems(doc, "ems");
        sc.ems.period_s = ems.number("period", sc.ems.period_s);
        if (auto v = ems.maybe("p_request_kw")) {
            if (v->text == "absorb_max") {
                sc.ems.initial_request.absorb_max = true;
            } else {
                sc.ems.initial_request.p_request_kw = parse_number(*v);
            }
        }
        sc.ems.initial_request.q_request_kvar =
            ems.number("q_request_kvar", sc.ems.initial_request.q_request_kvar);
        sc.ems.initial_request.p_import_limit_kw =
            ems.number("p_import_limit_kw", sc.ems.initial_request.p_import_limit_kw);
        sc.ems.initial_request.p_export_limit_kw =
            ems.number("p_export_limit_kw", sc.ems.initial_request.p_export_limit_kw);
        ems.finish();
    }
    for (const RawEventLine& raw : doc.events) {
        Event ev = parse_event_line(raw);
        if (!sc.events.empty() && ev.t_s < sc.events.back().t_s)
            throw ParseError(raw.line, 1, "events must be sorted by time");
        sc.events.push_back(ev);
    }

    sc.validate();
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_scenario(buf.str());
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void emit_grid_request(std::string& out, const GridRequest& g) {
    if (g.absorb_max) {
        out += "absorb_max";
    } else {
        out += "p=" + num(g.p_request_kw);
    }
    out += " q=" + num(g.q_request_kvar);
    out += " import_limit=" + num(g.p_import_limit_kw);
    out += " export_limit=" + num(g.p_export_limit_kw);
}

}  // namespace

std::string serialize_scenario(const Scenario& sc) {
    std::string out;
    out += "[meta]\n";
    out += "duration = " + num(sc.duration_s) + "\n";
    out += "dt = " + num(sc.dt_s) + "\n";
    out += "log_decimation = " + std::to_string(sc.log_decimation) + "\n\n";

    out += "[pv]\n";
    out += "rated_power_kw = " + num(sc.pv.rated_power_kw) + "\n";
    out += "cells_series = " + std::to_string(sc.pv.params.cells_series) + "\n";
    out += "strings_parallel = " + std::to_string(sc.pv.params.strings_parallel) + "\n";
    out += "photocurrent_stc_a = " + num(sc.pv.params.photocurrent_stc_a) + "\n";
    out += "saturation_current_a = " + num(sc.pv.params.saturation_current_a) + "\n";
    out += "series_resistance_ohm = " + num(sc.pv.params.series_resistance_ohm) + "\n";
    out += "shunt_resistance_ohm = " + num(sc.pv.params.shunt_resistance_ohm) + "\n";
    out += "ideality_factor = " + num(sc.pv.params.ideality_factor) + "\n";
    out += "thermal_voltage_stc_v = " + num(sc.pv.params.thermal_voltage_stc_v) + "\n";
    out += "current_temp_coeff_a_per_c = " + num(sc.pv.params.current_temp_coeff_a_per_c) + "\n";
    out += "efficiency = " + num(sc.pv.efficiency) + "\n";
    out += "tracking_time_constant = " + num(sc.pv.tracking_time_constant_s) + "\n";
    out += "mppt_step_v = " + num(sc.pv.mppt_step_v) + "\n";
    out += "mppt_period = " + num(sc.pv.mppt_period_s) + "\n";
    out += "curtail_gain_v_per_w = " + num(sc.pv.curtail_gain_v_per_w) + "\n\n";

    out += "[battery]\n";
    out += "capacity_kwh = " + num(sc.battery.capacity_kwh) + "\n";
    out += "soc_max = " + num(sc.battery.soc_max) + "\n";
    out += "soc_min = " + num(sc.battery.soc_min) + "\n";
    out += "p_charge_max_kw = " + num(sc.battery.p_charge_max_kw) + "\n";
    out += "p_discharge_max_kw = " + num(sc.battery.p_discharge_max_kw) + "\n";
    out += "efficiency_charge = " + num(sc.battery.efficiency_charge) + "\n";
    out += "efficiency_discharge = " + num(sc.battery.efficiency_discharge) + "\n";
    out += "tracking_time_constant = " + num(sc.battery.tracking_time_constant_s) + "\n";
    out += "soc_hysteresis = " + num(sc.battery.soc_hysteresis) + "\n";
    out += "initial_soc = " + num(sc.initial_soc) + "\n\n";

    out += "[inverter]\n";
    out += "capacitance_f = " + num(sc.inverter.capacitance_f) + "\n";
    out += "v_dc_initial = " + num(sc.inverter.v_dc_initial_v) + "\n";
    out += "v_dc_ref = " + num(sc.inverter.v_dc_ref_v) + "\n";
    out += "kp = " + num(sc.inverter.kp_a_per_v) + "\n";
    out += "ki = " + num(sc.inverter.ki_a_per_vs) + "\n";
    out += "current_time_constant = " + num(sc.inverter.current_time_constant_s) + "\n";
    out += "ac_voltage_ll = " + num(sc.inverter.ac_voltage_ll_v) + "\n";
    out += "efficiency = " + num(sc.inverter.efficiency) + "\n";
    out += "i_rated = " + num(sc.inverter.i_rated_a) + "\n\n";

    out += "[ems]\n";
    out += "period = " + num(sc.ems.period_s) + "\n";
    if (sc.ems.initial_request.absorb_max)
        out += "p_request_kw = absorb_max\n";
    else
        out += "p_request_kw = " + num(sc.ems.initial_request.p_request_kw) + "\n";
    out += "q_request_kvar = " + num(sc.ems.initial_request.q_request_kvar) + "\n";
    out += "p_import_limit_kw = " + num(sc.ems.initial_request.p_import_limit_kw) + "\n";
    out += "p_export_limit_kw = " + num(sc.ems.initial_request.p_export_limit_kw) + "\n\n";

    out += "[events]\n";
    for (const Event& ev : sc.events) {
        out += "t=" + num(ev.t_s) + " ";
        switch (ev.type) {
            case EventType::SetIrradiance:
                out += "set_irradiance " + num(ev.value);
                break;
            case EventType::SetTemperature:
                out += "set_temperature " + num(ev.value);
                break;
            case EventType::SetDcLoad:
                out += "set_dc_load " + num(ev.value);
                break;
            case EventType::SetGridRequest:
                out += "set_grid_request ";
                emit_grid_request(out, ev.grid);
                break;
            case EventType::SetVdcRef:
                out += "set_vdc_ref " + num(ev.value);
                break;
            case EventType::SetQRef:
                out += "set_q_ref " + num(ev.value);
                break;
        }
        out += "\n";
    }
    return out;
}

}  // namespace pvbsim

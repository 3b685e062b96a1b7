#include "pvbsim/csv_report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace pvbsim {

namespace {

std::string fmt6(double v) {
    if (v == 0.0) v = 0.0;  // strip negative zero
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string flags_token(const SimRecord& r) {
    std::string s;
    auto add = [&s](const char* tok) {
        if (!s.empty()) s += '|';
        s += tok;
    };
    if (r.flag_saturation) add("sat");
    if (r.flag_load_shed) add("shed");
    if (r.flag_bus_fault) add("fault");
    return s;
}

bool parse_double(const std::string& cell, double& out) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && !cell.empty();
}

}  // namespace

std::string records_to_csv(const std::vector<SimRecord>& records) {
    std::string out =
        "t_s,irradiance_w_m2,p_pv_kw,v_pv_v,i_pv_a,v_ref_v,pv_mode,p_bat_kw,soc,"
        "p_load_kw,p_grid_kw,q_grid_kvar,v_dc_v,balance_residual_kw,"
        "case_label,flags\n";
    for (const SimRecord& r : records) {
        out += fmt6(r.t_s);
        out += ',';
        out += fmt6(r.irradiance_w_m2);
        out += ',';
        out += fmt6(r.p_pv_kw);
        out += ',';
        out += fmt6(r.v_pv_v);
        out += ',';
        out += fmt6(r.i_pv_a);
        out += ',';
        out += fmt6(r.v_ref_v);
        out += ',';
        out += r.pv_mode == PvControlMode::Kind::Mppt ? "mppt" : "power_ref";
        out += ',';
        out += fmt6(r.p_bat_kw);
        out += ',';
        out += fmt6(r.soc);
        out += ',';
        out += fmt6(r.p_load_kw);
        out += ',';
        out += fmt6(r.p_grid_kw);
        out += ',';
        out += fmt6(r.q_grid_kvar);
        out += ',';
        out += fmt6(r.v_dc_v);
        out += ',';
        out += fmt6(r.balance_residual_kw);
        out += ',';
        out += to_string(r.case_label);
        out += ',';
        out += flags_token(r);
        out += '\n';
    }
    return out;
}

void write_csv_file(const std::string& path, const std::vector<SimRecord>& records) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    const std::string body = records_to_csv(records);
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    CsvTable table;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        size_t start = 0;
        while (true) {
            const size_t comma = s.find(',', start);
            if (comma == std::string::npos) {
                cells.push_back(s.substr(start));
                break;
            }
            cells.push_back(s.substr(start, comma - start));
            start = comma + 1;
        }
        return cells;
    };
    bool first = true;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            table.header = split(line);
            first = false;
            continue;
        }
        auto cells = split(line);
        if (cells.size() != table.header.size())
            throw std::runtime_error(path + ": ragged CSV row");
        table.rows.push_back(std::move(cells));
    }
    if (first) throw std::runtime_error(path + ": empty CSV");
    return table;
}

std::vector<ChannelStats> steady_state_summary_csv(const CsvTable& table,
                                                   double window_s) {
    const auto t_it = std::find(table.header.begin(), table.header.end(), "t_s");
    if (t_it == table.header.end())
        throw std::runtime_error("CSV has no t_s column");
    const size_t t_col = static_cast<size_t>(t_it - table.header.begin());
    if (table.rows.empty()) throw std::invalid_argument("CSV has no data rows");

    std::vector<double> t(table.rows.size());
    for (size_t i = 0; i < table.rows.size(); ++i)
        if (!parse_double(table.rows[i][t_col], t[i]))
            throw std::runtime_error("non-numeric t_s cell");
    const double t_end = t.back();
    const double t_begin = t.front();
    if (!(window_s > 0.0) || window_s > t_end - t_begin + 1e-12)
        throw std::invalid_argument(
            "summary window must be positive and within the record span");
    const double t_from = t_end - window_s - 1e-12;

    std::vector<ChannelStats> stats;
    for (size_t col = 0; col < table.header.size(); ++col) {
        if (col == t_col) continue;
        ChannelStats s;
        s.name = table.header[col];
        double sum = 0.0, mn = 0.0, mx = 0.0;
        long n = 0;
        bool numeric = true;
        for (size_t i = 0; i < table.rows.size(); ++i) {
            if (t[i] < t_from) continue;
            double v;
            if (!parse_double(table.rows[i][col], v)) {
                numeric = false;
                break;
            }
            if (n == 0) {
                mn = mx = v;
            } else {
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
            sum += v;
            ++n;
        }
        if (!numeric || n == 0) continue;
        s.mean = sum / static_cast<double>(n);
        s.min = mn;
        s.max = mx;
        stats.push_back(s);
    }
    return stats;
}

std::string dominant_case_label(const CsvTable& table, double window_s) {
    const auto label_it =
        std::find(table.header.begin(), table.header.end(), "case_label");
    const auto t_it = std::find(table.header.begin(), table.header.end(), "t_s");
    if (label_it == table.header.end() || t_it == table.header.end() ||
        table.rows.empty())
        return "";
    const size_t label_col = static_cast<size_t>(label_it - table.header.begin());
    const size_t t_col = static_cast<size_t>(t_it - table.header.begin());

    double t_end = 0.0;
    if (!parse_double(table.rows.back()[t_col], t_end)) return "";
    const double t_from = t_end - window_s - 1e-12;

    std::map<std::string, long> counts;
    for (const auto& row : table.rows) {
        double t;
        if (!parse_double(row[t_col], t) || t < t_from) continue;
        ++counts[row[label_col]];
    }
    std::string best;
    long best_n = 0;
    for (const auto& [label, n] : counts)
        if (n > best_n) {
            best = label;
            best_n = n;
        }
    return best;
}

AuditResult audit_balance(const CsvTable& table, double rated_pv_kw) {
    const auto it = std::find(table.header.begin(), table.header.end(),
                              "balance_residual_kw");
    if (it == table.header.end())
        throw std::runtime_error("CSV has no balance_residual_kw column");
    const size_t col = static_cast<size_t>(it - table.header.begin());

    AuditResult res;
    res.bound_kw = 1e-3 * rated_pv_kw;
    for (const auto& row : table.rows) {
        double v;
        if (!parse_double(row[col], v))
            throw std::runtime_error("non-numeric balance_residual_kw cell");
        res.worst_abs_residual_kw = std::max(res.worst_abs_residual_kw, std::abs(v));
        ++res.rows;
    }
    res.ok = res.worst_abs_residual_kw <= res.bound_kw;
    return res;
}

}  // namespace pvbsim

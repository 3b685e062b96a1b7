#pragma once

#include <string>
#include <vector>

#include "pvbsim/sim_engine.hpp"

namespace pvbsim {

// Fixed CSV schema, stable column order, floating values at 6 significant
// digits, '.' decimal point, ',' separators, '\n' line endings. Identical
// record streams serialize to identical bytes.
std::string records_to_csv(const std::vector<SimRecord>& records);

void write_csv_file(const std::string& path, const std::vector<SimRecord>& records);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Throws std::runtime_error on I/O failure or ragged rows.
CsvTable read_csv_file(const std::string& path);

// Trailing-window stats over the numeric columns of a CSV produced by
// records_to_csv (t_s drives the window and is excluded from the table).
std::vector<ChannelStats> steady_state_summary_csv(const CsvTable& table,
                                                   double window_s);

// Most frequent case_label over the same trailing window ("" when the CSV
// has no such column).
std::string dominant_case_label(const CsvTable& table, double window_s);

struct AuditResult {
    bool ok = true;
    double worst_abs_residual_kw = 0.0;
    double bound_kw = 0.0;
    long rows = 0;
};

// Checks |balance_residual_kw| <= 0.1% of the rated PV power on every row.
AuditResult audit_balance(const CsvTable& table, double rated_pv_kw);

}  // namespace pvbsim

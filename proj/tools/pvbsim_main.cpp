#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "pvbsim/csv_report.hpp"
#include "pvbsim/errors.hpp"
#include "pvbsim/scenario_io.hpp"
#include "pvbsim/sim_engine.hpp"

namespace {

// Exit codes: 0 success, 1 usage or I/O error, 2 scenario parse/validation
// error, 3 run fault, 4 audit violation.
enum ExitCode {
    kOk = 0,
    kUsageOrIo = 1,
    kScenarioError = 2,
    kRunFault = 3,
    kAuditFailure = 4,
};

int run_and_write(const pvbsim::Scenario& scenario, const std::string& out_csv) {
    const pvbsim::SimResult result = pvbsim::run(scenario);
    pvbsim::write_csv_file(out_csv, result.records);
    if (!result.summary.completed) {
        std::fprintf(stderr, "run fault at t=%.3f s: %s\n",
                     result.summary.fault_time_s, result.summary.message.c_str());
        std::fprintf(stderr, "partial results written to %s (%zu records)\n",
                     out_csv.c_str(), result.records.size());
        return kRunFault;
    }
    std::printf("completed %ld steps, %zu records, final soc %.4f -> %s\n",
                result.summary.steps, result.records.size(),
                result.summary.final_soc, out_csv.c_str());
    return kOk;
}

void print_summary_table(const std::vector<pvbsim::ChannelStats>& stats) {
    std::printf("%-22s %14s %14s %14s\n", "channel", "mean", "min", "max");
    for (const auto& s : stats)
        std::printf("%-22s %14.6g %14.6g %14.6g\n", s.name.c_str(), s.mean, s.min,
                    s.max);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pvbsim - grid-connected PV-battery DC microgrid simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_csv;
    auto* run_cmd =
        app.add_subcommand("run", "Run a scenario file and write the CSV time series");
    run_cmd->add_option("scenario", scenario_path, "scenario file")->required();
    run_cmd->add_option("--out", out_csv, "output CSV path")->required();

    int case_number = 1;
    std::string case_csv;
    auto* case_cmd = app.add_subcommand("case", "Run a built-in case preset");
    case_cmd->add_option("number", case_number, "case number 1..5")
        ->required()
        ->check(CLI::Range(1, 5));
    case_cmd->add_option("--out", case_csv, "output CSV path")->required();

    std::string summary_csv;
    double window_s = 1.0;
    auto* summary_cmd = app.add_subcommand(
        "summary", "Steady-state table over the trailing window of a CSV");
    summary_cmd->add_option("csv", summary_csv, "CSV produced by run/case")->required();
    summary_cmd->add_option("--window", window_s, "trailing window in seconds");

    std::string audit_csv;
    double rated_kw = 165.0;
    auto* audit_cmd =
        app.add_subcommand("audit", "Verify the power-balance residual column");
    audit_cmd->add_option("csv", audit_csv, "CSV produced by run/case")->required();
    audit_cmd->add_option("--rated-kw", rated_kw, "rated PV power for the 0.1% bound");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsageOrIo;
    }

    try {
        if (*run_cmd) {
            pvbsim::Scenario sc;
            try {
                sc = pvbsim::load_scenario_file(scenario_path);
            } catch (const pvbsim::ParseError& e) {
                std::fprintf(stderr, "%s: %s\n", scenario_path.c_str(), e.what());
                return kScenarioError;
            } catch (const std::invalid_argument& e) {
                std::fprintf(stderr, "%s: %s\n", scenario_path.c_str(), e.what());
                return kScenarioError;
            }
            return run_and_write(sc, out_csv);
        }
        if (*case_cmd) {
            return run_and_write(pvbsim::case_preset(case_number), case_csv);
        }
        if (*summary_cmd) {
            const pvbsim::CsvTable table = pvbsim::read_csv_file(summary_csv);
            print_summary_table(pvbsim::steady_state_summary_csv(table, window_s));
            const std::string label = pvbsim::dominant_case_label(table, window_s);
            if (!label.empty())
                std::printf("case label over window: %s\n", label.c_str());
            return kOk;
        }
        if (*audit_cmd) {
            const pvbsim::CsvTable table = pvbsim::read_csv_file(audit_csv);
            const pvbsim::AuditResult res = pvbsim::audit_balance(table, rated_kw);
            std::printf("%ld rows, worst |residual| %.6g kW, bound %.6g kW: %s\n",
                        res.rows, res.worst_abs_residual_kw, res.bound_kw,
                        res.ok ? "OK" : "VIOLATION");
            return res.ok ? kOk : kAuditFailure;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsageOrIo;
    }
    return kUsageOrIo;
}

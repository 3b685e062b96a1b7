#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = PVBSIM_CLI_PATH;
const fs::path kWork = PVBSIM_WORK_DIR;
const fs::path kPresets = PVBSIM_PRESET_DIR;

int run_cli(const std::string& args) {
    const std::string cmd = kCli + " " + args;
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

struct WorkDir {
    WorkDir() { fs::create_directories(kWork); }
} const g_workdir;

}  // namespace

TEST_CASE("case 1 runs, summarizes and audits cleanly") {
    const fs::path csv = kWork / "c1.csv";
    CHECK(run_cli("case 1 --out " + csv.string()) == 0);
    REQUIRE(fs::exists(csv));

    const fs::path table = kWork / "c1_summary.txt";
    CHECK(run_cli("summary " + csv.string() + " --window 1 > " + table.string()) == 0);
    const std::string text = slurp(table);
    auto mean_of = [&text](const std::string& channel) {
        const size_t pos = text.find("\n" + channel);
        REQUIRE(pos != std::string::npos);
        double mean = 0.0;
        REQUIRE(std::sscanf(text.c_str() + pos + 1 + channel.size(), " %lf", &mean) == 1);
        return mean;
    };
    CHECK(std::abs(mean_of("p_grid_kw") - 105.0) < 3.0);
    CHECK(std::abs(mean_of("p_bat_kw") + 10.0) < 1.0);
    CHECK(text.find("case label over window: case1") != std::string::npos);

    CHECK(run_cli("audit " + csv.string()) == 0);
}

TEST_CASE("every shipped preset file runs") {
    for (int n = 1; n <= 5; ++n) {
        const fs::path scn = kPresets / ("case" + std::to_string(n) + ".scn");
        REQUIRE(fs::exists(scn));
        const fs::path csv = kWork / ("p" + std::to_string(n) + ".csv");
        CHECK(run_cli("run " + scn.string() + " --out " + csv.string()) == 0);
        CHECK(run_cli("audit " + csv.string()) == 0);
    }
}

TEST_CASE("missing scenario files exit with the I/O code") {
    CHECK(run_cli("run missing.file --out " + (kWork / "x.csv").string() +
                  " 2> /dev/null") == 1);
}

TEST_CASE("scenario parse errors exit with the documented code") {
    const fs::path bad = kWork / "bad.scn";
    std::ofstream(bad) << "[meta]\nduraton = 1\n";
    CHECK(run_cli("run " + bad.string() + " --out " + (kWork / "y.csv").string() +
                  " 2> /dev/null") == 2);
}

TEST_CASE("audit violations exit with the documented code") {
    const fs::path csv = kWork / "corrupt.csv";
    std::ofstream(csv) << "t_s,balance_residual_kw\n0,0\n0.01,99\n";
    CHECK(run_cli("audit " + csv.string() + " > /dev/null") == 4);
}

TEST_CASE("usage errors exit nonzero") {
    CHECK(run_cli("case 9 --out " + (kWork / "z.csv").string() + " 2> /dev/null") == 1);
    CHECK(run_cli("frobnicate 2> /dev/null") == 1);
}

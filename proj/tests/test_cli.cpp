#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <utility>
#include <vector>

// Spawns the installed binary and checks exit codes, golden fragments and
// byte-determinism across repeated runs.

namespace {

namespace fs = std::filesystem;

const fs::path kDir = fs::path("cli_fixtures");

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct RunResult {
    int exit_code;
    std::string stdout_text;
};

RunResult run_cli(const std::string& args, const std::string& tag) {
    const fs::path out = kDir / (tag + ".stdout");
    const std::string cmd = std::string(BBMNET_CLI_PATH) + " " + args + " > " +
                            out.string() + " 2> " + (kDir / (tag + ".stderr")).string();
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return RunResult{WEXITSTATUS(status), slurp(out)};
}

void setup_fixtures() {
    fs::create_directories(kDir);
    write_file(kDir / "balanced_star.net",
               "# format 1\n"
               "vertices 1\n"
               "edge 0 -1 0 length=inf a=1 b=1 d=0 infinite_end=tail\n"
               "edge 1 -1 0 length=inf a=1 b=1 d=0 infinite_end=tail\n"
               "edge 2 0 -1 length=inf a=1 b=1 d=0 infinite_end=head\n"
               "edge 3 0 -1 length=inf a=1 b=1 d=0 infinite_end=head\n");
    write_file(kDir / "star3.net",
               "vertices 1\n"
               "edge 0 -1 0 length=inf a=1 b=1 d=0 infinite_end=tail\n"
               "edge 1 0 -1 length=inf a=1 b=1 d=0 infinite_end=head\n"
               "edge 2 0 -1 length=inf a=1 b=1 d=0 infinite_end=head\n");
    write_file(kDir / "path2.net",
               "vertices 3\n"
               "edge 0 0 1 length=3 a=1 b=1 d=0\n"
               "edge 1 1 2 length=5 a=1 b=1 d=0\n"
               "base_speed 2\n");
    write_file(kDir / "diamond.net",
               "vertices 4\n"
               "edge 0 -1 0 length=inf a=4 b=2 d=0 infinite_end=tail\n"
               "edge 1 0 1 length=1 a=1 b=1 d=0\n"
               "edge 2 1 2 length=2 a=1 b=1 d=0\n"
               "edge 3 0 3 length=1.5 a=1 b=1 d=0\n"
               "edge 4 3 2 length=1.5 a=1 b=1 d=0\n"
               "edge 5 2 -1 length=inf a=4 b=2 d=0 infinite_end=head\n");
    write_file(kDir / "single_edge.net",
               "vertices 2\n"
               "edge 0 0 1 length=30 a=1 b=1 d=0\n");
    write_file(kDir / "malformed.net",
               "vertices 2\n"
               "edge 0 0 1 length=abc a=1 b=1 d=0\n");
}

} // namespace

TEST_CASE("check: pass, fail and parse-error exit codes") {
    setup_fixtures();

    const RunResult pass =
        run_cli("check " + (kDir / "balanced_star.net").string(), "check_pass");
    CHECK(pass.exit_code == 0);
    CHECK(pass.stdout_text ==
          "pass: network admits a travelling solitary wave (0 diagnostics)\n");

    const RunResult fail = run_cli("check " + (kDir / "star3.net").string() + " --out " +
                                       (kDir / "star3_diag.csv").string(),
                                   "check_fail");
    CHECK(fail.exit_code == 1);
    CHECK(fail.stdout_text.find("KirchhoffCoefficientSum") != std::string::npos);
    const std::string diag = slurp(kDir / "star3_diag.csv");
    CHECK(diag.find("condition,location,residual\n") == 0);
    CHECK(diag.find("KirchhoffCoefficientSum,v0,1\n") != std::string::npos);
    CHECK(diag.find("KirchhoffSum,v0,") != std::string::npos);

    const RunResult broken =
        run_cli("check " + (kDir / "malformed.net").string(), "check_malformed");
    CHECK(broken.exit_code == 2);
    const std::string err = slurp(kDir / "check_malformed.stderr");
    CHECK(err.find("line 2") != std::string::npos);

    const RunResult missing = run_cli("check /no/such/file.net", "check_missing");
    CHECK(missing.exit_code == 3);
}

TEST_CASE("construct: golden table") {
    setup_fixtures();
    const RunResult r = run_cli("construct " + (kDir / "path2.net").string(),
                                "construct_path");
    CHECK(r.exit_code == 0);
    // base speed from the file: both edges at speed 2, second shifted by 3
    const std::string expected_prefix =
        "edge,speed,shift,amplitude,wavenumber,level_offset\n"
        "0,2,0,12,1,0\n"
        "1,2,3,12,1,0\n";
    CHECK(r.stdout_text.substr(0, expected_prefix.size()) == expected_prefix);
    CHECK(r.stdout_text.find("# max_continuity_gap=") != std::string::npos);
    CHECK(r.stdout_text.find("# max_pde_residual=") != std::string::npos);

    const RunResult flag = run_cli(
        "construct " + (kDir / "path2.net").string() + " --c0 1", "construct_c0");
    CHECK(flag.stdout_text.find("0,1,0,6,1,0\n") != std::string::npos);

    const RunResult diamond =
        run_cli("construct " + (kDir / "diamond.net").string(), "construct_diamond");
    CHECK(diamond.exit_code == 0);
    std::istringstream lines(diamond.stdout_text);
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) {
        if (!line.empty() && line[0] != '#' && line[0] != 'e') ++rows;
    }
    CHECK(rows == 6);
}

TEST_CASE("sample: structure and crest value") {
    setup_fixtures();
    const RunResult r =
        run_cli("sample " + (kDir / "path2.net").string() +
                    " --times 0,1 --points-per-edge 3 --c0 2",
                "sample_path");
    CHECK(r.exit_code == 0);
    std::istringstream lines(r.stdout_text);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "t,edge,x,u");
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 2 * 2 * 3); // times x edges x points
    // crest sits at x = 0 on edge 0 at t = 0: amplitude/2 = 6
    CHECK(r.stdout_text.find("0,0,0,6\n") != std::string::npos);
}

TEST_CASE("phase: homoclinic loop closes") {
    setup_fixtures();
    const RunResult r = run_cli(
        "phase --homoclinic --a 1 --b 1 --c 2 --d 0 --span 20 --step 0.001",
        "phase_homoclinic");
    CHECK(r.exit_code == 0);
    std::istringstream lines(r.stdout_text);
    std::string header, first, line, last;
    std::getline(lines, header);
    CHECK(header == "y,phi,psi,H");
    std::getline(lines, first);
    while (std::getline(lines, line)) last = line;

    auto parse_row = [](const std::string& row) {
        std::array<double, 4> values{};
        std::istringstream is(row);
        std::string field;
        for (double& v : values) {
            REQUIRE(std::getline(is, field, ','));
            v = std::stod(field);
        }
        return values;
    };
    const auto front = parse_row(first);
    const auto back = parse_row(last);
    CHECK(std::abs(front[1] - back[1]) < 1e-6); // phi returns to phi
    CHECK(std::abs(front[2] - back[2]) < 1e-6);
    CHECK(std::abs(front[3]) < 1e-10);          // H = 0 on the loop
    CHECK(std::abs(back[3]) < 1e-10);

    const RunResult divergent = run_cli(
        "phase --a 1 --b 1 --c 1 --d 0 --A -1 --start-phi 10 --span 100 --step 0.01",
        "phase_divergent");
    CHECK(divergent.exit_code == 1);

    const RunResult no_orbit = run_cli(
        "phase --homoclinic --a 1 --b 1 --c 1 --d 0 --A -1", "phase_no_orbit");
    CHECK(no_orbit.exit_code == 1);
    CHECK(no_orbit.stdout_text.find("DiscriminantNonpositive") != std::string::npos);
}

TEST_CASE("phase: centre start is constant") {
    setup_fixtures();
    const RunResult r = run_cli(
        "phase --a 1 --b 1 --c 2 --d 0 --start-phi 4 --start-psi 0 --span 1 "
        "--step 0.25",
        "phase_centre");
    CHECK(r.exit_code == 0);
    std::istringstream lines(r.stdout_text);
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        CHECK(line.find(",4,0,") != std::string::npos);
        ++rows;
    }
    CHECK(rows == 9); // 2 * span/step + 1
}

TEST_CASE("simulate: runs and reports") {
    setup_fixtures();
    const RunResult r = run_cli(
        "simulate " + (kDir / "single_edge.net").string() +
            " --h 0.1 --dt 0.05 --T 2 --t0 10 --out " +
            (kDir / "sim_snapshots.csv").string(),
        "simulate_single");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("# final_linf=") != std::string::npos);
    CHECK(r.stdout_text.find("# closure=homogeneous-dirichlet") != std::string::npos);
    const std::string csv = slurp(kDir / "sim_snapshots.csv");
    CHECK(csv.find("t,edge,x,u\n") == 0);

    const RunResult rejected =
        run_cli("simulate " + (kDir / "star3.net").string() + " --T 1",
                "simulate_rejected");
    CHECK(rejected.exit_code == 1);
}

TEST_CASE("byte determinism across repeated runs") {
    setup_fixtures();
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"det_check", "check " + (kDir / "balanced_star.net").string()},
        {"det_construct", "construct " + (kDir / "diamond.net").string()},
        {"det_sample", "sample " + (kDir / "path2.net").string() +
                           " --times 0,0.5,1 --points-per-edge 17"},
        {"det_phase", "phase --homoclinic --b 2 --c 1.5 --span 8 --step 0.01"},
        {"det_simulate", "simulate " + (kDir / "single_edge.net").string() +
                             " --h 0.1 --dt 0.05 --T 1 --t0 12"},
    };
    for (const auto& [tag, cmd] : commands) {
        const RunResult first = run_cli(cmd, tag + "_run1");
        const RunResult second = run_cli(cmd, tag + "_run2");
        CHECK(first.exit_code == second.exit_code);
        CHECK(first.stdout_text == second.stdout_text);
        CHECK(!first.stdout_text.empty());
    }
}

TEST_CASE("io failure exit code") {
    setup_fixtures();
    const RunResult r = run_cli("construct " + (kDir / "path2.net").string() +
                                    " --out /no/such/dir/out.csv",
                                "construct_io_fail");
    CHECK(r.exit_code == 3);
}

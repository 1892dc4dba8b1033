#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const char* kConfig = R"(
model.dimension = 1
model.kind = quadratic-kinetic-plus-potential
model.mass = 1.0
model.potential = [[0, 0.02533029591058444, 0], [1, -0.02533029591058444, 0]]
action.tau = 0.1
action.p = 0.0
grid.n = 64
solver.delta_schedule = [0.4, 0.2, 0.1, 0.05]
solver.tol = 1e-8
solver.selection_tol = 0.05
output.precision = 17
)";

fs::path workdir() {
    fs::path p = fs::temp_directory_path() / "weakkam_cli_test";
    fs::create_directories(p);
    return p;
}

int run(const std::string& args) {
    const std::string cmd = std::string(WEAKKAM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// report.csv minus the wall-time column (timings differ run to run).
std::string strip_wall_time(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t col = 0, start = 0;
        std::ostringstream kept;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                if (col != 8) kept << line.substr(start, i - start) << ",";
                start = i + 1;
                ++col;
            }
        }
        out << kept.str() << "\n";
    }
    return out.str();
}

}  // namespace

TEST_CASE("cli exit codes and artifacts") {
    fs::path dir = workdir();
    fs::path cfg = dir / "pendulum.cfg";
    std::ofstream(cfg) << kConfig;

    CHECK(run("validate --config " + cfg.string() + " --out " + (dir / "v").string()) == 0);
    CHECK(fs::exists(dir / "v" / "solution.csv"));
    CHECK(fs::exists(dir / "v" / "calibration_defect.csv"));

    CHECK(run("weak-kam --config " + cfg.string() + " --out " + (dir / "wk").string()) == 0);
    CHECK(fs::exists(dir / "wk" / "solution.csv"));

    // Unknown config key -> exit 2.
    fs::path bad = dir / "bad.cfg";
    std::ofstream(bad) << "bogus.key = 1\n";
    CHECK(run("validate --config " + bad.string()) == 2);

    // Unreachable selection tolerance -> solver failure, exit 3.
    fs::path tight = dir / "tight.cfg";
    std::ofstream(tight) << kConfig << "solver.selection_tol = 1e-13\n";
    CHECK(run("weak-kam --config " + tight.string() + " --out " + (dir / "t").string()) == 3);

    // Missing config -> exit 2.
    CHECK(run("weak-kam --config " + (dir / "missing.cfg").string()) == 2);
}

TEST_CASE("identical configs give bit-identical artifacts") {
    fs::path dir = workdir();
    fs::path cfg = dir / "pendulum.cfg";
    std::ofstream(cfg) << kConfig;

    REQUIRE(run("weak-kam --config " + cfg.string() + " --out " + (dir / "a").string()) == 0);
    REQUIRE(run("weak-kam --config " + cfg.string() + " --out " + (dir / "b").string()) == 0);
    CHECK(slurp(dir / "a" / "solution.csv") == slurp(dir / "b" / "solution.csv"));
    CHECK(slurp(dir / "a" / "calibration_defect.csv") ==
          slurp(dir / "b" / "calibration_defect.csv"));

    REQUIRE(run("effective-action --config " + cfg.string() + " --out " +
                (dir / "ea1").string()) == 0);
    REQUIRE(run("effective-action --config " + cfg.string() + " --out " +
                (dir / "ea2").string()) == 0);
    CHECK(strip_wall_time(slurp(dir / "ea1" / "report.csv")) ==
          strip_wall_time(slurp(dir / "ea2" / "report.csv")));

    // The worker-pool size must not change results.
    REQUIRE(run("weak-kam --config " + cfg.string() + " --threads 4 --out " +
                (dir / "c").string()) == 0);
    CHECK(slurp(dir / "a" / "solution.csv") == slurp(dir / "c" / "solution.csv"));
}

TEST_CASE("select and sweep-delta run end to end") {
    fs::path dir = workdir();
    fs::path cfg = dir / "pendulum.cfg";
    std::ofstream(cfg) << kConfig;
    CHECK(run("select --config " + cfg.string() + " --out " + (dir / "sel").string()) == 0);
    CHECK(fs::exists(dir / "sel" / "u_star.csv"));

    fs::path sw = dir / "sweep.cfg";
    std::ofstream(sw) << kConfig << "sweep.coupling = 1.0\n";
    CHECK(run("sweep-delta --config " + sw.string() + " --out " + (dir / "sd").string()) == 0);
    CHECK(fs::exists(dir / "sd" / "coupled.csv"));
}

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = GRANOISE_SCENARIO_DIR;

// Runs the CLI with the given arguments and returns its exit status.
int run(const std::string& args) {
    const std::string cmd = std::string("\"") + GRANOISE_CLI + "\" " + args + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("granoise_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const fs::path& path, const std::string& text) {
    std::ofstream(path) << text;
    return path;
}

std::string scenario_arg(const std::string& name) {
    return "--scenario \"" + (kScenarios / name).string() + "\"";
}

std::string small_mc(const fs::path& dir) {
    const std::string text = R"({
  "base": ")" + (kScenarios / "paper-operating-point.json").string() + R"(",
  "mc": {
    "seed": 3, "trials": 1000, "n_at_mean": 1000, "target_J": 0.01,
    "r_grid": {"variable": "R_times_J", "scale": "log", "min": 0.01, "max": 100, "points": 3},
    "response": "weak-probe"
  }
})";
    return "--scenario \"" + write_file(dir / "mc.json", text).string() + "\"";
}

}  // namespace

TEST_CASE("fluxes writes a table and a verifiable manifest") {
    const fs::path out = scratch("fluxes");
    CHECK(run(scenario_arg("paper-operating-point.json") + " --out \"" + out.string() + "\" fluxes") == 0);
    CHECK(fs::exists(out / "fluxes.csv"));
    const fs::path manifest = out / "fluxes.manifest.json";
    REQUIRE(fs::exists(manifest));
    CHECK(slurp(manifest).find("fluxes.csv") != std::string::npos);
    CHECK(run("verify-manifest \"" + manifest.string() + "\"") == 0);
    write_file(out / "fluxes.csv", "tampered\n");
    CHECK(run("verify-manifest \"" + manifest.string() + "\"") == 1);
    fs::remove_all(out);
}

TEST_CASE("configuration problems exit with status 2") {
    const fs::path dir = scratch("config");
    CHECK(run("--scenario \"" + (dir / "absent.json").string() + "\" fluxes") == 2);
    const fs::path unknown = write_file(dir / "unknown.json", R"({"base": ")" +
                                                                  (kScenarios / "paper-operating-point.json").string() +
                                                                  R"(", "gas": {"temprature": "300 K"}})");
    CHECK(run("--scenario \"" + unknown.string() + "\" fluxes") == 2);
    CHECK(run("--scenario \"" + write_file(dir / "empty.json", "").string() + "\" fluxes") == 2);
    CHECK(run(scenario_arg("paper-operating-point.json") + " --format xml fluxes") == 2);
    CHECK(run(scenario_arg("paper-operating-point.json") + " --no-such-flag fluxes") == 2);
    CHECK(run(scenario_arg("paper-operating-point.json") + " --out \"" + dir.string() + "\" scaling-sweep") == 2);
    CHECK(run("fluxes") == 2);
    fs::remove_all(dir);
}

TEST_CASE("Monte Carlo validation exit status reflects the outcome") {
    const fs::path dir = scratch("mc");
    const std::string sc = small_mc(dir);
    CHECK(run(sc + " --out \"" + dir.string() + "\" mc-validate") == 0);
    CHECK(fs::exists(dir / "mc_validation.csv"));
    CHECK(run(sc + " --out \"" + dir.string() + "\" mc-validate --inject-j-scale 2") == 1);
    fs::remove_all(dir);
}

TEST_CASE("outputs are byte-identical across worker counts and runs") {
    const fs::path a = scratch("bytes_a"), b = scratch("bytes_b");
    const std::string sc = scenario_arg("scaling-sweep.json");
    CHECK(run(sc + " --threads 1 --out \"" + a.string() + "\" scaling-sweep") == 0);
    CHECK(run(sc + " --threads 3 --out \"" + b.string() + "\" scaling-sweep") == 0);
    CHECK(slurp(a / "scaling_sweep.csv") == slurp(b / "scaling_sweep.csv"));

    const std::string mc = small_mc(a);
    CHECK(run(mc + " --threads 1 --out \"" + a.string() + "\" mc-validate") == 0);
    CHECK(run(mc + " --threads 2 --out \"" + b.string() + "\" mc-validate") == 0);
    CHECK(slurp(a / "mc_validation.csv") == slurp(b / "mc_validation.csv"));

    CHECK(run(sc + " --format jsonl --out \"" + a.string() + "\" scaling-sweep") == 0);
    CHECK(fs::exists(a / "scaling_sweep.jsonl"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("emit-svg renders a sweep table") {
    const fs::path dir = scratch("svg");
    CHECK(run(scenario_arg("scaling-sweep.json") + " --out \"" + dir.string() + "\" scaling-sweep") == 0);
    const std::string csv = "\"" + (dir / "scaling_sweep.csv").string() + "\"";
    CHECK(run("--out \"" + dir.string() + "\" emit-svg --csv " + csv +
              " -x R -y sigma_ratio --group omega_s --log-x --log-y") == 0);
    CHECK(slurp(dir / "scaling_sweep.svg").find("<svg") != std::string::npos);
    CHECK(run("--out \"" + dir.string() + "\" emit-svg --csv " + csv + " -x R -y nope") == 2);
    const fs::path empty = write_file(dir / "empty.csv", "");
    CHECK(run("--out \"" + dir.string() + "\" emit-svg --csv \"" + empty.string() + "\" -x R -y sigma_ratio") != 0);
    fs::remove_all(dir);
}

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kCli = DISTDELAY_CLI;
const fs::path kConfigs = DISTDELAY_CONFIGS;

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "distdelay_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

struct Outcome {
    int code;
    std::string output;
};

Outcome run(const std::string& args, const fs::path& dir)
{
    const fs::path log = dir / "console.txt";
    const std::string cmd = kCli.string() + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

fs::path write_config(const fs::path& dir, const json& j)
{
    const fs::path p = dir / "config.json";
    std::ofstream(p) << j.dump();
    return p;
}

json read_json(const fs::path& p)
{
    std::ifstream in(p);
    return json::parse(in);
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("simulate converges to ln 5 and writes every artifact")
{
    const auto dir = scratch("simulate");
    const auto r = run("simulate -c " + (kConfigs / "nicholson_stable.json").string() + " -o " + dir.string(), dir);
    REQUIRE_MESSAGE(r.code == 0, r.output);
    for (const char* name : {"trajectory.csv", "manifest.json", "tail.json"}) {
        CHECK(fs::exists(dir / name));
        CHECK(fs::file_size(dir / name) > 0);
    }
    const auto tail = read_json(dir / "tail.json");
    CHECK(tail["converged"] == true);
    CHECK(std::abs(tail["limit_est"].get<double>() - std::log(5.0)) < 1e-3);
    const auto manifest = read_json(dir / "manifest.json");
    CHECK(manifest.contains("version"));
    CHECK(manifest["config_hash"].get<std::string>().size() == 16);
    CHECK(manifest["measure"]["variant"] == "atoms");
}

TEST_CASE("simulate reproduces the closed-form replica")
{
    const auto dir = scratch("frozen_lag");
    const auto r = run("simulate -c " + (kConfigs / "frozen_lag.json").string() + " -o " + dir.string(), dir);
    REQUIRE_MESSAGE(r.code == 0, r.output);
    std::ifstream in(dir / "trajectory.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x");
    double worst = 0.0;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        const double t = std::stod(line.substr(0, comma));
        const double x = std::stod(line.substr(comma + 1));
        worst = std::max(worst, std::abs(x - std::exp(-t)));
        ++rows;
    }
    CHECK(rows == 1001);
    CHECK(worst < 1e-6);
}

TEST_CASE("identical configs give identical bytes")
{
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    const auto cfg = (kConfigs / "mackey_glass_kernel.json").string();
    REQUIRE(run("simulate -c " + cfg + " -o " + a.string(), a).code == 0);
    REQUIRE(run("simulate -c " + cfg + " -o " + b.string(), b).code == 0);
    CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
}

TEST_CASE("step guard exits with a config error")
{
    const auto dir = scratch("guard");
    const json j = {{"model", {{"kind", "nicholson"}, {"p", 5}, {"delta", 1}, {"a", 1}}},
                    {"delay", {{"variant", "atoms"}, {"atoms", {{1.0, 0.1}}}}},
                    {"history", {{"type", "constant"}, {"value", 1.0}}},
                    {"run", {{"horizon", 1.0}, {"step", 0.05}}}};
    const auto r = run("simulate -c " + write_config(dir, j).string() + " -o " + dir.string(), dir);
    CHECK(r.code == 2);
    CHECK(r.output.find("step guard") != std::string::npos);
}

TEST_CASE("malformed configs exit with 2")
{
    const auto dir = scratch("malformed");
    json j = {{"model", {{"kind", "nicholson"}, {"p", 5}, {"delta", 1}, {"a", 1}, {"typo", 1}}}};
    CHECK(run("analyze -c " + write_config(dir, j).string() + " -o " + dir.string(), dir).code == 2);
    j = {{"model", {{"kind", "nicholson"}, {"p", -5}, {"delta", 1}, {"a", 1}}}};
    CHECK(run("analyze -c " + write_config(dir, j).string() + " -o " + dir.string(), dir).code == 2);
    CHECK(run("analyze -c " + (dir / "missing.json").string(), dir).code == 2);
    CHECK(run("frobnicate", dir).code == 2);
}

TEST_CASE("analyze")
{
    const auto dir = scratch("analyze");
    const auto r = run("analyze -c " + (kConfigs / "nicholson_unstable.json").string() + " -o " + dir.string(), dir);
    REQUIRE_MESSAGE(r.code == 0, r.output);
    const auto rep = read_json(dir / "report.json");
    CHECK(rep["regime"] == "delay_dependent");
    CHECK(rep["thresholds"]["tau0"].get<double>() == doctest::Approx(0.833).epsilon(1e-3));
    CHECK(rep["thresholds"]["tau_GL"].get<double>() == doctest::Approx(std::log(10.0 / 9.0)));
    CHECK(rep["flags"]["hopf_formula_discrepancy"] == true);
}

TEST_CASE("counterexample")
{
    const auto dir = scratch("counterexample");
    const auto r = run("counterexample -c " + (kConfigs / "counterexample.json").string() + " -o " + dir.string(), dir);
    REQUIRE_MESSAGE(r.code == 0, r.output);
    const auto sched = read_json(dir / "schedule.json");
    CHECK(sched["switch_times"].size() == 20);
    CHECK(sched["predicted"]["tau1"].get<double>() == doctest::Approx(3.344).epsilon(1e-3));
    CHECK(read_json(dir / "report.json")["pass"] == true);
    CHECK(fs::file_size(dir / "trajectory.csv") > 0);

    json bad = read_json(kConfigs / "counterexample.json");
    bad["counterexample"]["b"] = 3.5;
    CHECK(run("counterexample -c " + write_config(dir, bad).string() + " -o " + dir.string(), dir).code == 2);
}

TEST_CASE("sweep")
{
    const auto dir = scratch("sweep");
    const auto r = run("sweep -j 3 -c " + (kConfigs / "threshold_sweep.json").string() + " -o " + dir.string(), dir);
    REQUIRE_MESSAGE(r.code == 0, r.output);
    std::ifstream in(dir / "sweep.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "p,delta,a,regime,K,m,M,tau_57,tau_58,tau_GL,tau0");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        REQUIRE(cells.size() == 11);
        const double t57 = std::stod(cells[7]), t58 = std::stod(cells[8]), tgl = std::stod(cells[9]);
        CHECK(t58 > tgl);
        CHECK(tgl > t57);
        ++rows;
    }
    CHECK(rows == 25);

    // Single point agrees with analyze.
    const json one = {{"sweep", {{"model", "nicholson"}, {"p", {10}}}}};
    REQUIRE(run("sweep -c " + write_config(dir, one).string() + " -o " + dir.string(), dir).code == 0);
    std::ifstream in1(dir / "sweep.csv");
    std::getline(in1, line);
    std::getline(in1, line);
    const auto analyzed = scratch("sweep_analyze");
    REQUIRE(run("analyze -c " + (kConfigs / "nicholson_unstable.json").string() + " -o " + analyzed.string(), analyzed).code == 0);
    const auto rep = read_json(analyzed / "report.json");
    CHECK(line.find(rep["regime"].get<std::string>()) != std::string::npos);
    const double tau0 = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(tau0 == rep["thresholds"]["tau0"].get<double>());

    const json empty = {{"sweep", {{"model", "nicholson"}, {"p", {{"from", 8}, {"to", 2}, {"step", 1}}}}}};
    CHECK(run("sweep -c " + write_config(dir, empty).string() + " -o " + dir.string(), dir).code == 2);
}

TEST_CASE("verify filter and tolerance scaling")
{
    const auto dir = scratch("verify");
    const auto ok = run("verify --filter 1,frozen_origin", dir);
    CHECK(ok.code == 0);
    CHECK(ok.output.find("PASS  1") != std::string::npos);
    CHECK(ok.output.find("PASS  2") != std::string::npos);
    CHECK(ok.output.find(" 3 ") == std::string::npos);

    const auto tight = run("verify --filter 1 --tol-scale 1e-9", dir);
    CHECK(tight.code == 1);
    CHECK(tight.output.find("FAIL  1") != std::string::npos);
    CHECK(run("verify --filter nothing_matches", dir).code == 2);
}

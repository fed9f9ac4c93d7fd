// Drives the installed-style `hnm` executable end to end.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kRoot = fs::path(HNM_TEST_WORKDIR) / "cli_runs";

int run(const std::string& args) {
    const std::string cmd = std::string(HNM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path dir(const std::string& name) {
    const fs::path d = kRoot / name;
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("henon M=5/8 reports a vanishing twist coefficient") {
    const auto d = dir("henon");
    REQUIRE(run("henon --set M=0.625 --out " + d.string()) == 0);
    for (const char* f : {"henon.json", "henon.csv", "henon.svg", "timing.json"}) CHECK(fs::exists(d / f));
    const json env = json::parse(slurp(d / "henon.json"));
    CHECK(std::abs(env["payload"]["report"]["b1"].get<double>()) <= 1e-9);
    CHECK(env["version"].get<std::string>().size() > 0);
    CHECK_FALSE(fs::exists(d / "error.json"));
}

TEST_CASE("identical config gives byte-identical json and csv") {
    const auto a = dir("det_a"), b = dir("det_b");
    REQUIRE(run("cascade --set k_min=8 --set k_max=10 --set phi_points=6 --threads 1 --out " + a.string()) == 0);
    REQUIRE(run("cascade --set k_min=8 --set k_max=10 --set phi_points=6 --threads 3 --out " + b.string()) == 0);
    CHECK(slurp(a / "cascade.json") == slurp(b / "cascade.json"));
    CHECK(slurp(a / "cascade.csv") == slurp(b / "cascade.csv"));
    CHECK(slurp(a / "cascade.svg") == slurp(b / "cascade.svg"));
}

TEST_CASE("config file plus overrides") {
    const auto d = dir("cfg");
    fs::create_directories(d);
    {
        std::ofstream f(d / "run.ini");
        f << "[family]\nlambda = -0.5\n\n[experiment]\nk_min = 6\nk_max = 9\n\n[output]\nformats = json, csv\n";
    }
    REQUIRE(run("cross-form --config " + (d / "run.ini").string() + " --set beta=1 --out " + (d / "o").string()) == 0);
    CHECK(fs::exists(d / "o" / "cross-form.json"));
    CHECK(fs::exists(d / "o" / "cross-form.csv"));
    CHECK_FALSE(fs::exists(d / "o" / "cross-form.svg"));
    const json env = json::parse(slurp(d / "o" / "cross-form.json"));
    CHECK(env["config"]["family"]["lambda"] == "-0.5");
    CHECK(env["payload"]["rows"].size() == 4);
    CHECK(env["payload"]["beta1_fit"].get<double>() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("resonance end to end") {
    const auto d = dir("res");
    REQUIRE(run("resonance --set s0=-0.4 --set k_max=14 --out " + d.string()) == 0);
    const json env = json::parse(slurp(d / "resonance.json"));
    CHECK(env["payload"]["verdict"] == "certified");
}

TEST_CASE("validation errors exit 1 with error json") {
    const auto d = dir("bad");
    CHECK(run("henon --set bogus=1 --out " + d.string()) == 1);
    const json err = json::parse(slurp(d / "error.json"));
    CHECK(err["error"]["code"] == "config");
    CHECK_FALSE(err.contains("payload"));
    CHECK_FALSE(fs::exists(d / "henon.json"));
    CHECK(run("not-a-subcommand") == 1);
    CHECK(run("henon --config /nonexistent/file.ini") == 1);
    CHECK(run("resonance --set s0=-1.2 --out " + d.string()) == 1);
    CHECK(json::parse(slurp(d / "error.json"))["error"]["code"] == "not_in_resonance_window");
}

TEST_CASE("numerical failures exit 2") {
    const auto d = dir("num");
    // k = 1: the rescaled grid is O(1) in original coordinates and orbits escape
    CHECK(run("rescale-verify --set k_min=1 --set k_max=1 --out " + d.string()) == 2);
    const json err = json::parse(slurp(d / "error.json"));
    CHECK(err["status"] == 2);
    CHECK(err["error"]["code"] == "orbit_escaped");
    CHECK(err["error"].contains("stage"));
}

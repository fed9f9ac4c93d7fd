#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "hnm/config.hpp"
#include "hnm/error.hpp"
#include "hnm/runner.hpp"

using namespace hnm;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("ini parsing and overrides") {
    auto cfg = RunConfig::parse("[family]\nlambda = -0.5\nq = 1, 1\n[experiment]\nk_min = 8\n[output]\nformats = json csv\n");
    CHECK(cfg.family.at("lambda") == "-0.5");
    CHECK(cfg.list(cfg.family, "q", {}) == std::vector<double>{1.0, 1.0});
    cfg.apply_override("k_max=12");
    cfg.apply_override("s0=-0.4");
    cfg.apply_override("family.c=2");
    CHECK(cfg.experiment.at("k_max") == "12");
    CHECK(cfg.family.at("s0") == "-0.4");
    CHECK(cfg.family.at("c") == "2");
    CHECK_NOTHROW(cfg.validate("cascade"));
    CHECK(RunConfig::parse("").family.empty());
}

TEST_CASE("schema validation") {
    CHECK(code_of([] { RunConfig::parse("[bogus]\nx=1\n"); }) == ErrorCode::Config);
    CHECK(code_of([] { RunConfig::parse("[family]\nlambda=0.5\n").validate("nope"); }) == ErrorCode::Config);
    CHECK(code_of([] {
              auto c = RunConfig::parse("[experiment]\nphi_points=3\n");
              c.validate("henon");
          }) == ErrorCode::Config);
    CHECK(code_of([] { RunConfig::parse("[family]\nlambda=abc\n").validate("henon"); }) == ErrorCode::Config);
    CHECK(code_of([] { RunConfig::parse("[output]\nformats=png\n").validate("henon"); }) == ErrorCode::Config);
    CHECK(code_of([] { RunConfig c; c.apply_override("noequals"); }) == ErrorCode::Config);
}

TEST_CASE("family from config applies tuning") {
    const auto cfg = RunConfig::parse("[family]\nalpha=-0.1\ns0=-0.4\n");
    const auto h = family_from_config(cfg);
    CHECK(h.alpha == doctest::Approx(-0.1).epsilon(1e-8));
    CHECK(h.s0 == doctest::Approx(-0.4).epsilon(1e-8));
}

TEST_CASE("runner: henon envelope") {
    RunConfig cfg;
    cfg.apply_override("M=0.625");
    const auto r = run_subcommand("henon", cfg);
    REQUIRE(r.status == 0);
    const json env = json::parse(r.envelope);
    CHECK(env["schema_version"] == kSchemaVersion);
    CHECK(env["subcommand"] == "henon");
    CHECK(env.contains("payload"));
    CHECK(std::abs(env["payload"]["report"]["b1"].get<double>()) <= 1e-9);
    CHECK(r.csv.rfind("M,b1,status\n", 0) == 0);
    CHECK(r.svg.find("<svg") == 0);
}

TEST_CASE("runner: exit codes") {
    RunConfig bad;
    bad.apply_override("nonsense=1");
    const auto r1 = run_subcommand("henon", bad);
    CHECK(r1.status == 1);
    const json e1 = json::parse(r1.envelope);
    CHECK(e1["error"]["code"] == "config");
    CHECK_FALSE(e1.contains("payload"));

    RunConfig off;
    off.apply_override("s0=-1.2");
    CHECK(run_subcommand("resonance", off).status == 1);

    // numerical failure: at k = 1 the rescaling grid throws orbits out
    RunConfig num;
    num.apply_override("k_min=1");
    num.apply_override("k_max=1");
    const auto r3 = run_subcommand("rescale-verify", num);
    CHECK(r3.status == 2);
    CHECK(json::parse(r3.envelope)["error"]["code"] == "orbit_escaped");
}

TEST_CASE("runner: family-check audits") {
    const auto r = run_subcommand("family-check", RunConfig{});
    REQUIRE(r.status == 0);
    const json p = json::parse(r.envelope)["payload"];
    CHECK(p["bc_ok"] == true);
    CHECK(p["det_identity_ok"] == true);
    CHECK(p["det_audit"]["ok"] == true);
    CHECK(p["det_audit"]["samples"] == 100);
}

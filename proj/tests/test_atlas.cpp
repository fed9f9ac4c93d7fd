#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "hnm/atlas.hpp"
#include "hnm/error.hpp"

using namespace hnm;

namespace {

FamilyHandle fam(double lambda, double alpha, double s0) {
    LocalMapParams l;
    l.lambda = lambda;
    RecipeSpec r;
    r.p = {0.3};
    r.q = {1.0};
    return tune_to(build_family(l, r), alpha, s0);
}

bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

}  // namespace

TEST_CASE("resonance flags") {
    CHECK(resonance_flags(-0.4).empty());
    CHECK(has(resonance_flags(-0.5), "resonance-1:4"));
    CHECK(has(resonance_flags(-0.75), "resonance-1:3"));
    CHECK(has(resonance_flags(-0.625), "twistless"));
    CHECK(resonance_flags(-1.0 / std::sqrt(2.0)).size() == 1);
}

TEST_CASE("global resonance preconditions") {
    try {
        certify_global_resonance(fam(0.5, -0.1, -0.4), {8});
        FAIL("alpha != 0 accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidArgument);
    }
    try {
        certify_global_resonance(fam(0.5, 0.0, -1.2), {8});
        FAIL("s0 outside (-1, 0) accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotInResonanceWindow);
    }
}

TEST_CASE("global resonance: cos phi tends to 1 + 2 s0") {
    const auto c = certify_global_resonance(fam(0.5, 0.0, -0.4), {8, 10, 12});
    CHECK(c.verdict == "certified");
    double prev = 1.0;
    for (const auto& r : c.rows) {
        CHECK(r.elliptic);
        CHECK(r.error < prev);
        prev = r.error;
    }
    CHECK(c.rows.back().cos_phi == doctest::Approx(0.2).epsilon(1e-4));
    const auto w = certify_global_resonance(fam(0.5, 0.0, -0.5), {8, 9});
    CHECK(w.verdict == "withheld");
}

TEST_CASE("cascade: nested disjoint intervals with width ratio lambda^2") {
    const auto res = run_cascade(fam(0.5, -0.1, -0.4), {9, 10, 11}, 8, 2);
    REQUIRE(res.records.size() == 3);
    for (const auto& r : res.records) {
        REQUIRE(r.ok);
        CHECK(r.phi_monotone);
        CHECK(r.width_scaled == doctest::Approx(1.0).epsilon(0.01));
    }
    CHECK(res.disjoint);
    for (double q : res.width_ratios) CHECK(q == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("cascade results do not depend on the thread count") {
    const auto f = fam(-0.5, -0.1, -0.4);
    const auto a = run_cascade(f, {8, 9, 10}, 6, 1), b = run_cascade(f, {8, 9, 10}, 6, 3);
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].plus.mu == b.records[i].plus.mu);
        CHECK(a.records[i].minus.mu == b.records[i].minus.mu);
    }
}

TEST_CASE("strip atlas slopes") {
    LocalMapParams l;
    RecipeSpec r;
    r.p = {0.3};
    const auto tmpl = tune_to(build_family(l, r), 0.0, -0.4);
    const auto map = run_strip_atlas(tmpl, {8, 9}, 0.05, 9, 2);
    CHECK(map.alphas[4] == 0.0);
    for (const auto& c : map.curves) {
        CHECK(c.failures == 0);
        CHECK(c.slope_fit == doctest::Approx(c.slope_expected).epsilon(0.05));
    }
    CHECK_THROWS_AS(run_strip_atlas(tmpl, {8}, 0.05, 1), Error);
}

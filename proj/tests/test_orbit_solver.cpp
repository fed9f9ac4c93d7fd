#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hnm/error.hpp"
#include "hnm/orbit_solver.hpp"

using namespace hnm;

namespace {

FamilyHandle fam(double lambda) {
    LocalMapParams l;
    l.lambda = lambda;
    RecipeSpec r;
    r.p = {0.3};
    r.q = {1.0};
    return tune_to(build_family(l, r), -0.1, -0.4);
}

}  // namespace

TEST_CASE("fixed point of T_k is a fixed point in original coordinates") {
    const auto f = fam(0.5);
    const int k = 9;
    const double mu = mu_from_m(f, k, 0.5);
    const ScaledReturnMap srm(f, k, mu);
    // limit-map fixed point (-sqrt M, -sqrt M)
    const auto o = find_fixed_point(srm, mu, {-std::sqrt(0.5), -std::sqrt(0.5)});
    REQUIRE(o.points.size() == 1);
    const PlanarPoint q = srm.return_map().eval_at(o.points[0], mu);
    CHECK(std::abs(q.x - o.points[0].x) <= 1e-10);
    CHECK(std::abs(q.y - o.points[0].y) <= 1e-10);
    CHECK(o.det == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(o.period_label == k + f.recipe.n0);
    CHECK(o.residual <= 1e-10);
}

TEST_CASE("two-periodic orbit is elliptic near M = 0.4") {
    const auto f = fam(-0.5);
    const int k = 10;
    const double mu = mu_from_m(f, k, 0.4);
    const ScaledReturnMap srm(f, k, mu);
    const double s = std::sqrt(0.4);
    const auto o = find_two_periodic(srm, mu, {-s, s});
    REQUIRE(o.points.size() == 2);
    CHECK(std::abs(o.trace) < 2.0);
    CHECK(o.trace == doctest::Approx(2.0 - 4 * 0.4).epsilon(0.02));
    CHECK(o.det == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(o.period_label == 2 * (k + f.recipe.n0));
    CHECK(phase_of_elliptic(o) == doctest::Approx(std::acos(o.trace / 2)));
}

TEST_CASE("collapse onto the fixed point is reported") {
    const auto f = fam(0.5);
    const int k = 9;
    const double mu = mu_from_m(f, k, 0.4);
    const ScaledReturnMap srm(f, k, mu);
    const double s = std::sqrt(0.4);
    try {
        find_two_periodic(srm, mu, {s, s});
        FAIL("expected collapse");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CollapsedToFixedPoint);
    }
}

TEST_CASE("bifurcation points carry the right multipliers") {
    for (double lam : {0.5, -0.5}) {
        const auto f = fam(lam);
        const auto p = locate_bifurcation(f, 10, BifurcationKind::Plus);
        CHECK(std::abs(p.condition) <= 1e-8);
        CHECK(std::abs(std::abs(p.orbit.nu1.real()) - 1.0) <= 1e-6);
        CHECK(std::abs(std::abs(p.orbit.nu2.real()) - 1.0) <= 1e-6);
        const auto m = locate_bifurcation(f, 10, BifurcationKind::Minus);
        CHECK(std::abs(m.condition) <= 1e-8);
        CHECK(m.orbit.trace == doctest::Approx(-2.0).epsilon(1e-7));
        const double l2 = std::pow(lam, 20);
        CHECK(std::abs(p.mu - p.predicted) / l2 <= 10 * 10 * std::pow(0.5, 10));
        CHECK(std::abs(m.mu - m.predicted) / l2 <= 10 * 10 * std::pow(0.5, 10));
    }
}

TEST_CASE("original-coordinate seeds") {
    const auto f = fam(0.5);
    const int k = 8;
    const double mu = mu_from_m(f, k, 0.5);
    const ReturnMap rm(f.with_mu(mu), k);
    const ScaledReturnMap srm(f, k, mu);
    const PlanarPoint seed = srm.to_original({-std::sqrt(0.5), -std::sqrt(0.5)});
    const auto o = find_fixed_point(rm, seed);
    CHECK(o.residual <= 1e-10);
}

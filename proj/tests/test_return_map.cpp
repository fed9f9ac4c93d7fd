#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hnm/error.hpp"
#include "hnm/return_map.hpp"
#include "oracles.hpp"

using namespace hnm;

namespace {

LocalMapParams local(double lambda, std::vector<double> beta) {
    LocalMapParams l;
    l.lambda = lambda;
    l.beta = std::move(beta);
    return l;
}

FamilyHandle family(double lambda, double c, double q0, std::vector<double> beta = {}) {
    RecipeSpec r;
    r.c = c;
    r.p = {0.2};
    r.q = {q0};
    return build_family(local(lambda, std::move(beta)), r);
}

}  // namespace

TEST_CASE("closed-form T0^k matches iteration") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double lam : {0.5, -0.5, 0.8}) {
        const auto l = local(lam, {1.0, -0.3});
        const MapExpr t0 = l.as_map();
        for (int i = 0; i < 100; ++i) {
            const int k = 1 + i % 16;
            // keep |xy| small so every iterate stays bounded
            const PlanarPoint p{u(rng), 0.05 * u(rng) * std::pow(std::abs(lam), k)};
            const PlanarPoint a = t0_pow_closed(l, p, k), b = iterate(t0, p, k);
            CHECK(oracle::rel_err(a.x, b.x) <= 1e-12);
            CHECK(std::abs(a.y - b.y) <= 1e-12 * std::max(1.0, std::abs(b.y)));
        }
    }
}

TEST_CASE("closed-form jacobian agrees with finite differences") {
    const auto l = local(0.5, {1.0});
    const PlanarPoint p{1.0, 0.9 * std::pow(0.5, 6)};
    Jacobian2 J;
    t0_pow_closed(l, p, 6, J);
    CHECK(J.det() == doctest::Approx(1.0).epsilon(1e-12));
    const Jacobian2 F = oracle::fd_jacobian([&](PlanarPoint q) { return t0_pow_closed(l, q, 6); }, p, 1e-6);
    CHECK(J.xx == doctest::Approx(F.xx).epsilon(1e-6));
    CHECK(J.yy == doctest::Approx(F.yy).epsilon(1e-6));
}

TEST_CASE("cross solve reproduces the boundary-value pair") {
    const auto l = local(-0.5, {1.0, 0.2});
    for (int k : {3, 8, 14}) {
        const double x0 = 1.1, yk = 0.93;
        const CrossSolution cs = cross_solve(l, k, x0, yk);
        const PlanarPoint q = t0_pow_closed(l, {x0, cs.y0}, k);
        CHECK(q.x == doctest::Approx(cs.xk).epsilon(1e-13));
        CHECK(q.y == doctest::Approx(yk).epsilon(1e-13));
    }
}

TEST_CASE("cross form: beta1 recovered and residual bounded") {
    for (double lam : {0.5, -0.5})
        for (double b1 : {0.0, 1.0}) {
            const auto rep = validate_cross_form(local(lam, b1 == 0.0 ? std::vector<double>{} : std::vector<double>{b1}),
                                                 {6, 8, 10, 12});
            CHECK(rep.bounded);
            if (b1 != 0.0) CHECK(rep.beta1_fit == doctest::Approx(b1).epsilon(0.05));
            else CHECK(std::abs(rep.beta1_fit) <= 1e-6);
        }
}

TEST_CASE("return map is conservative with det -1") {
    const auto f = family(0.5, 1.0, 1.0, {1.0});
    const ReturnMap rm(f, 10);
    const auto [s0, s1] = strips(f, 10, 0.05);
    for (auto p : s0.boundary) {
        Jacobian2 J;
        rm.eval(p, J);
        CHECK(std::abs(J.det() + 1.0) <= 1e-10);
    }
    const Jacobian2 F = oracle::fd_jacobian([&](PlanarPoint q) { return rm.eval(q); }, s0.boundary[3], 1e-9);
    Jacobian2 J;
    rm.eval(s0.boundary[3], J);
    CHECK(J.xx == doctest::Approx(F.xx).epsilon(1e-4));
    CHECK(J.yy == doctest::Approx(F.yy).epsilon(1e-4));
}

TEST_CASE("strips accumulate on the axes") {
    const auto f = family(0.5, 1.0, 1.0);
    const auto a = strips(f, 8, 0.1).first, b = strips(f, 12, 0.1).first;
    CHECK(b.distance < a.distance);
    CHECK(b.distance == doctest::Approx(a.distance * std::pow(0.5, 4)).epsilon(0.05));
    CHECK_THROWS_AS(strips(f, 1, 0.1), Error);
}

TEST_CASE("sign table") {
    CHECK(expected_horseshoe(0.5, -1, -1, -2) == HorseshoeTag::Empty);
    CHECK(expected_horseshoe(0.5, -1, 1, -2) == HorseshoeTag::Regular);
    CHECK(expected_horseshoe(-0.5, -1, 1, -2) == HorseshoeTag::ParityAlternating);
    CHECK(expected_horseshoe(0.5, 0.8, 1, -0.2) == HorseshoeTag::AlphaNegativeHorseshoes);
    CHECK(expected_horseshoe(0.5, 1.2, 1, 0.2) == HorseshoeTag::AlphaPositiveTrivial);
    CHECK_FALSE(expected_horseshoe(0.5, 1.0, 1, 0.0).has_value());
}

TEST_CASE("intersection count: regular horseshoe and trivial case") {
    const auto reg = family(0.5, -1.0, 4.0);
    const auto ev = count_intersection(reg, 10, 0.05);
    CHECK(ev.components == 2);
    CHECK(ev.cone_ok);
    const auto triv = family(0.5, 1.2, 4.0);
    CHECK(count_intersection(triv, 10, 0.05).components == 0);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hnm/error.hpp"
#include "hnm/map_core.hpp"
#include "oracles.hpp"

using namespace hnm;

namespace {

MapExpr sample_map() {
    MapExpr m;
    m.then(stage::Translate{0.1, -0.2})
        .then(stage::VerticalShear{Polynomial({0.0, 0.3, 0.5, -0.2})})
        .then(stage::Swap{})
        .then(stage::Diagonal{0.7})
        .then(stage::HorizontalShear{Polynomial({0.1, 0.0, 0.4})})
        .then(stage::Moser{0.6, Polynomial({1.0, 0.5, 0.1})})
        .then(stage::CotangentLift{Polynomial({0.0, 1.3, 0.2})});
    return m;
}

}  // namespace

TEST_CASE("polynomial evaluation and derivatives") {
    const Polynomial p({1.0, -2.0, 0.0, 3.0});
    CHECK(p(2.0) == doctest::Approx(1 - 4 + 24));
    CHECK(p.derivative(2.0) == doctest::Approx(-2 + 36));
    CHECK(p.second_derivative(2.0) == doctest::Approx(36));
    CHECK(p.degree() == 3);
    const Polynomial q = p * Polynomial({0.0, 1.0});
    CHECK(q(1.5) == doctest::Approx(1.5 * p(1.5)));
    CHECK(p.derivative()(0.7) == doctest::Approx(p.derivative(0.7)));
}

TEST_CASE("analytic jacobian agrees with finite differences") {
    const MapExpr m = sample_map();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.3, 0.6);
    for (int i = 0; i < 20; ++i) {
        const PlanarPoint p{u(rng), u(rng)};
        const Jacobian2 J = m.jacobian(p);
        const Jacobian2 F = oracle::fd_jacobian([&](PlanarPoint q) { return m.eval(q); }, p, 1e-4);
        CHECK(J.xx == doctest::Approx(F.xx).epsilon(1e-7));
        CHECK(J.xy == doctest::Approx(F.xy).epsilon(1e-7));
        CHECK(J.yx == doctest::Approx(F.yx).epsilon(1e-7));
        CHECK(J.yy == doctest::Approx(F.yy).epsilon(1e-7));
    }
}

TEST_CASE("every composition is area preserving with sign (-1)^swaps") {
    const MapExpr m = sample_map();
    CHECK(m.swap_count() == 1);
    CHECK(m.expected_det() == -1.0);
    for (double x : {0.3, 0.45, 0.6})
        for (double y : {0.35, 0.5}) CHECK(std::abs(m.jacobian({x, y}).det() + 1.0) <= 1e-12);
    MapExpr two = m.followed_by(m);
    CHECK(two.expected_det() == 1.0);
}

TEST_CASE("iterate matches repeated eval") {
    MapExpr h;
    h.then(stage::VerticalShear{Polynomial({0.3, 0.0, -1.0})}).then(stage::Swap{});
    PlanarPoint p{0.1, 0.2}, q = p;
    for (int i = 0; i < 5; ++i) q = h.eval(q);
    const PlanarPoint r = iterate(h, p, 5);
    CHECK(r.x == q.x);
    CHECK(r.y == q.y);
    CHECK(iterate(h, p, 0).x == p.x);
    CHECK_THROWS_AS(iterate(h, p, -1), Error);
}

TEST_CASE("escape reports the overflowing stage") {
    MapExpr h;
    h.then(stage::VerticalShear{Polynomial({0.0, 0.0, -1.0})}).then(stage::Swap{});
    try {
        iterate(h, {1e3, 1e3}, 10);
        FAIL("expected escape");
    } catch (const EscapeError& e) {
        CHECK(e.code() == ErrorCode::Escape);
        CHECK(e.stage() >= 0);
    }
}

TEST_CASE("affine inverse and composition") {
    const Affine2 A{{2.0, 1.0, 0.5, 1.5}, {0.3, -0.1}};
    const Affine2 B{{0.0, 1.0, -1.0, 0.0}, {1.0, 2.0}};
    const PlanarPoint p{0.7, -0.4};
    const PlanarPoint back = A.inverse().apply(A.apply(p));
    CHECK(back.x == doctest::Approx(p.x));
    CHECK(back.y == doctest::Approx(p.y));
    const PlanarPoint ab = A.after(B).apply(p), manual = A.apply(B.apply(p));
    CHECK(ab.x == doctest::Approx(manual.x));
    CHECK(ab.y == doctest::Approx(manual.y));
    CHECK_THROWS_AS((Jacobian2{1, 2, 2, 4}.inverse()), Error);
}

TEST_CASE("moser stage preserves the product xy") {
    MapExpr m;
    m.then(stage::Moser{-0.5, Polynomial({1.0, 0.8, -0.3})});
    const PlanarPoint p{0.4, 0.9}, q = m.eval(p);
    CHECK(q.x * q.y == doctest::Approx(p.x * p.y).epsilon(1e-14));
}

TEST_CASE("error names are stable") {
    CHECK(std::string(error_code_name(ErrorCode::NotTangency)) == "not_a_tangency");
    CHECK(is_validation_error(ErrorCode::Config));
    CHECK_FALSE(is_validation_error(ErrorCode::NewtonDiverged));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hnm/error.hpp"
#include "hnm/henon.hpp"
#include "oracles.hpp"

using namespace hnm;

TEST_CASE("henon map is the declared formula with det -1") {
    const MapExpr h = henon_map(0.7);
    for (PlanarPoint p : {PlanarPoint{0.1, 0.2}, PlanarPoint{-0.5, 0.9}}) {
        const PlanarPoint a = h.eval(p), b = henon_eval(0.7, p);
        CHECK(a.x == doctest::Approx(p.y));
        CHECK(a.y == doctest::Approx(0.7 + p.x - p.y * p.y));
        CHECK(b.x == doctest::Approx(a.x));
        CHECK(b.y == doctest::Approx(a.y));
        CHECK(henon_jacobian(p).det() == doctest::Approx(-1.0));
    }
}

TEST_CASE("fixed points exist for M >= 0") {
    CHECK(fixed_points(-0.1).empty());
    const auto fps = fixed_points(0.5);
    REQUIRE(fps.size() == 2);
    for (const auto& f : fps) {
        const PlanarPoint q = henon_eval(0.5, f.point);
        CHECK(q.x == doctest::Approx(f.point.x));
        CHECK(q.y == doctest::Approx(f.point.y));
        CHECK(f.nu1 * f.nu2 == doctest::Approx(-1.0));
    }
}

TEST_CASE("two-periodic orbit and its trace") {
    for (double M : {0.2, 0.6, 0.9, 1.5}) {
        const auto o = two_periodic_orbit(M);
        const PlanarPoint q = henon_eval(M, henon_eval(M, o.p1));
        CHECK(q.x == doctest::Approx(o.p1.x));
        CHECK(q.y == doctest::Approx(o.p1.y));
        CHECK(o.trace == doctest::Approx(2.0 - 4.0 * M));
        const Jacobian2 J = henon_jacobian(o.p2) * henon_jacobian(o.p1);
        CHECK(J.trace() == doctest::Approx(o.trace));
    }
    CHECK_THROWS_AS(two_periodic_orbit(0.0), Error);
    CHECK(two_periodic_orbit(1.5).stability.tag == StabilityTag::Saddle);
    CHECK(two_periodic_orbit(0.3).stability.tag == StabilityTag::EllipticGeneric);
    CHECK(two_periodic_orbit(0.5).stability.tag == StabilityTag::Resonance14);
    CHECK(two_periodic_orbit(0.75).stability.tag == StabilityTag::Resonance13);
    CHECK(two_periodic_orbit(0.625).stability.tag == StabilityTag::Twistless);
}

TEST_CASE("birkhoff coefficient: reference values") {
    CHECK(birkhoff_b1(0.25) == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(std::abs(birkhoff_b1(0.625)) <= 1e-10);
    CHECK(birkhoff_b1(0.6) < 0.0);
    CHECK(birkhoff_b1(0.65) > 0.0);
    CHECK_THROWS_AS(birkhoff_b1(0.5), Error);
    CHECK_THROWS_AS(birkhoff_b1(0.75), Error);
    CHECK_THROWS_AS(birkhoff_b1(1.2), Error);
}

TEST_CASE("rotation-number oracle agrees with the sign of B1") {
    // Twist of H^2 around p1: rotation number drifts away from phi with amplitude
    // in the direction given by the sign of B1.
    for (double M : {0.3, 0.4, 0.58, 0.68, 0.9}) {
        const auto o = two_periodic_orbit(M);
        const Jacobian2 J = henon_jacobian(o.p2) * henon_jacobian(o.p1);
        auto h2 = [M](PlanarPoint p) { return henon_eval(M, henon_eval(M, p)); };
        const double phi = std::acos(J.trace() / 2.0);
        const double w1 = oracle::rotation_number(h2, o.p1, J, 0.01, 40000);
        const double w2 = oracle::rotation_number(h2, o.p1, J, 0.02, 40000);
        const double b1 = birkhoff_b1(M);
        INFO("M=" << M << " phi=" << phi << " w1=" << w1 << " w2=" << w2 << " b1=" << b1);
        CHECK(((w2 - w1) > 0.0) == (b1 > 0.0));
    }
}

TEST_CASE("bifurcation values") {
    const auto v = bifurcation_values();
    auto find = [&](const std::string& name) {
        for (const auto& b : v)
            if (b.name == name) return b.M;
        FAIL("missing " << name);
        return 0.0;
    };
    CHECK(std::abs(find("fixed-point-birth")) <= 1e-9);
    CHECK(std::abs(find("period-doubling") - 1.0) <= 1e-9);
    CHECK(std::abs(find("resonance-1:4") - 0.5) <= 1e-9);
    CHECK(std::abs(find("resonance-1:3") - 0.75) <= 1e-9);
    CHECK(std::abs(find("twistless") - 0.625) <= 1e-6);
}

TEST_CASE("horseshoe certificate is sufficient only") {
    for (double M : {9.5, 10.0, 12.0}) CHECK(horseshoe_certificate(M));
    for (double M : {-1.0, 0.5, 2.0}) CHECK_FALSE(horseshoe_certificate(M));
}

TEST_CASE("trace classification") {
    CHECK(classify_trace(0.0, 1.0).tag == StabilityTag::Resonance14);
    CHECK(classify_trace(-1.0, 1.0).tag == StabilityTag::Resonance13);
    CHECK(classify_trace(-0.5, 1.0).tag == StabilityTag::Twistless);
    CHECK(classify_trace(2.0, 1.0).tag == StabilityTag::ParabolicPlus);
    CHECK(classify_trace(-2.0, 1.0).tag == StabilityTag::ParabolicMinus);
    CHECK(classify_trace(3.0, 1.0).tag == StabilityTag::Saddle);
    const auto e = classify_trace(0.4, 1.0);
    CHECK(e.tag == StabilityTag::EllipticGeneric);
    REQUIRE(e.phase);
    CHECK(*e.phase == doctest::Approx(std::acos(0.2)));
    CHECK(classify_trace(0.0, -1.0).tag == StabilityTag::ParabolicPlus);
    CHECK(classify_trace(0.3, -1.0).tag == StabilityTag::Saddle);
}

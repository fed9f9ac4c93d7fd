#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hnm/error.hpp"
#include "hnm/rescale.hpp"
#include "oracles.hpp"

using namespace hnm;

namespace {

FamilyHandle cubic_family(double lambda) {
    LocalMapParams l;
    l.lambda = lambda;
    l.beta = {1.0};
    RecipeSpec r;
    r.p = {0.3};
    r.q = {1.0, 1.0};
    return tune_to(build_family(l, r), -0.1, -0.4);
}

}  // namespace

TEST_CASE("M <-> mu round trip") {
    const auto f = cubic_family(0.5);
    for (int k : {6, 10, 14})
        for (double M : {-0.5, 0.0, 0.7, 1.0}) {
            const double mu = mu_from_m(f, k, M);
            CHECK(m_from_mu(f, k, mu).M == doctest::Approx(M).epsilon(1e-12));
        }
}

TEST_CASE("precision floor where mu cancels the alpha term") {
    // M = -s0 puts mu exactly on -lambda^k y- alpha (...)
    const auto f = cubic_family(0.5);
    try {
        m_from_mu(f, 10, mu_from_m(f, 10, -f.s0));
        FAIL("expected precision floor");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PrecisionFloor);
    }
}

TEST_CASE("chain maps the return map close to the limit map") {
    for (double lam : {0.5, -0.5}) {
        const auto f = cubic_family(lam);
        for (int k : {8, 11}) {
            const double mu = mu_from_m(f, k, 0.4);
            const ScaledReturnMap srm(f, k, mu);
            const auto& ch = srm.chain();
            CHECK(ch.M == doctest::Approx(0.4).epsilon(0.05));
            const double res = grid_residual([&](PlanarPoint w) { return srm.eval(w, mu); }, ch.M, ch.cubic, 1.0, 11);
            const double lk = std::pow(std::abs(lam), k);
            CHECK(res <= 100.0 * k * lk * lk);
            // chain is affine and invertible
            const PlanarPoint w{0.3, -0.2};
            const PlanarPoint back = srm.from_original(srm.to_original(w));
            CHECK(back.x == doctest::Approx(w.x).epsilon(1e-9));
            CHECK(back.y == doctest::Approx(w.y).epsilon(1e-9));
        }
    }
}

TEST_CASE("scaled jacobian is the conjugated one") {
    const auto f = cubic_family(0.5);
    const double mu = mu_from_m(f, 9, 0.4);
    const ScaledReturnMap srm(f, 9, mu);
    const PlanarPoint w{0.2, 0.5};
    Jacobian2 J;
    srm.eval(w, mu, J);
    const Jacobian2 F = oracle::fd_jacobian([&](PlanarPoint q) { return srm.eval(q, mu); }, w, 1e-4);
    CHECK(J.xx == doctest::Approx(F.xx).epsilon(1e-5));
    CHECK(J.xy == doctest::Approx(F.xy).epsilon(1e-5));
    CHECK(J.yx == doctest::Approx(F.yx).epsilon(1e-5));
    CHECK(J.yy == doctest::Approx(F.yy).epsilon(1e-5));
    CHECK(J.det() == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("near henon and residual helper") {
    CHECK(grid_residual([](PlanarPoint w) { return near_henon(0.3, 0.0, w); }, 0.3, 0.0) == 0.0);
    const PlanarPoint q = near_henon(0.3, 0.1, {0.5, 2.0});
    CHECK(q.x == 2.0);
    CHECK(q.y == doctest::Approx(0.3 + 0.5 - 4.0 + 0.8));
    const double c = fit_cubic_coefficient([](PlanarPoint w) { return near_henon(0.2, 0.05, w); }, 0.2);
    CHECK(c == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("cubic coefficient scales like f03/d^2 lambda^k") {
    const auto rep = convergence_report(cubic_family(0.5), {8, 10, 12}, 0.4, 2);
    CHECK(rep.bounded);
    for (const auto& r : rep.rows) CHECK(r.cubic_ratio == doctest::Approx(1.0).epsilon(0.1));
}

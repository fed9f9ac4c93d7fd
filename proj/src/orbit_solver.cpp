#include "hnm/orbit_solver.hpp"

#include <array>
#include <cmath>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

namespace hnm {

const char* bifurcation_name(BifurcationKind kind) { return kind == BifurcationKind::Plus ? "plus" : "minus"; }

namespace {

constexpr double kAccept = 1e-10;
constexpr int kMaxSteps = 50;

// T_k^period in rescaled coordinates with its Jacobian.
PlanarPoint power(const ScaledReturnMap& srm, double mu, PlanarPoint w, int period, Jacobian2& J) {
    J = Jacobian2::identity();
    for (int i = 0; i < period; ++i) {
        Jacobian2 Ji;
        w = srm.eval(w, mu, Ji);
        J = Ji * J;
    }
    return w;
}

OrbitRecord record_at(const ScaledReturnMap& srm, double mu, PlanarPoint w, int period) {
    Jacobian2 J;
    OrbitRecord rec;
    rec.mu = mu;
    rec.residual = (power(srm, mu, w, period, J) - w).norm_inf();
    PlanarPoint p = w;
    for (int i = 0; i < period; ++i) {
        rec.scaled.push_back(p);
        rec.points.push_back(srm.to_original(p));
        p = srm.eval(p, mu);
    }
    rec.trace = J.trace();
    rec.det = J.det();
    const std::complex<double> disc = std::sqrt(std::complex<double>(rec.trace * rec.trace - 4.0 * rec.det));
    rec.nu1 = 0.5 * (rec.trace + disc);
    rec.nu2 = 0.5 * (rec.trace - disc);
    rec.stability = classify_trace(rec.trace, rec.det, 1e-9);
    const FamilyHandle& f = srm.return_map().family();
    rec.period_label = period * (srm.return_map().k() + f.global.n0);
    return rec;
}

OrbitRecord newton(const ScaledReturnMap& srm, double mu, PlanarPoint w, int period) {
    auto residual = [&](PlanarPoint p, Jacobian2& J) { return power(srm, mu, p, period, J) - p; };
    Jacobian2 J;
    PlanarPoint F;
    try {
        F = residual(w, J);
    } catch (const EscapeError&) {
        throw Error(ErrorCode::NewtonDiverged, "Newton diverged: seed escaped");
    }
    double nF = F.norm_inf();
    for (int step = 0; step < kMaxSteps && nF > 1e-12; ++step) {
        const Jacobian2 A{J.xx - 1.0, J.xy, J.yx, J.yy - 1.0};
        if (std::abs(A.det()) < 1e-14) throw Error(ErrorCode::SingularJacobian, "singular Jacobian in Newton step");
        const PlanarPoint d = A.inverse().apply(F);
        double t = 1.0;
        bool moved = false;
        for (int h = 0; h < 12; ++h, t *= 0.5) {
            const PlanarPoint trial{w.x - t * d.x, w.y - t * d.y};
            try {
                Jacobian2 Jt;
                const PlanarPoint Ft = residual(trial, Jt);
                if (Ft.norm_inf() < nF || (t < 1.0 / 1024 && Ft.finite())) {
                    w = trial;
                    F = Ft;
                    J = Jt;
                    moved = Ft.norm_inf() < nF;
                    nF = Ft.norm_inf();
                    break;
                }
            } catch (const EscapeError&) {
            }
        }
        if (!moved && nF <= kAccept) break;
        if (std::abs(w.x) + std::abs(w.y) > 1e6) break;
    }
    if (!(nF <= kAccept)) throw Error(ErrorCode::NewtonDiverged, "Newton diverged after 50 damped steps");
    return record_at(srm, mu, w, period);
}

}  // namespace

OrbitRecord find_fixed_point(const ScaledReturnMap& srm, double mu, PlanarPoint seed) {
    return newton(srm, mu, seed, 1);
}

OrbitRecord find_two_periodic(const ScaledReturnMap& srm, double mu, PlanarPoint seed) {
    OrbitRecord rec = newton(srm, mu, seed, 2);
    const PlanarPoint a = rec.scaled[0], b = rec.scaled[1];
    if ((a - b).norm_inf() < 1e-6)
        throw Error(ErrorCode::CollapsedToFixedPoint, "2-periodic search collapsed to a fixed point");
    return rec;
}

OrbitRecord find_fixed_point(const ReturnMap& rm, PlanarPoint seed) {
    const ScaledReturnMap srm(rm.family(), rm.k(), rm.mu());
    return find_fixed_point(srm, rm.mu(), srm.from_original(seed));
}

OrbitRecord find_two_periodic(const ReturnMap& rm, PlanarPoint seed) {
    const ScaledReturnMap srm(rm.family(), rm.k(), rm.mu());
    return find_two_periodic(srm, rm.mu(), srm.from_original(seed));
}

double predicted_bifurcation(const FamilyHandle& family, int k, BifurcationKind kind) {
    return mu_from_m(family, k, kind == BifurcationKind::Plus ? 0.0 : 1.0);
}

double chain_parameter(const ScaledReturnMap& srm, const FamilyHandle& family, double mu) {
    const RescaleChain& ch = srm.chain();
    const double lk = ch.lambda_k;
    return ch.M - family.taylor.d * (mu - ch.mu_ref) / (lk * lk);
}

double phase_of_elliptic(const OrbitRecord& record) {
    if (record.points.size() != 2 || !(std::abs(record.trace) < 2.0))
        throw Error(ErrorCode::NotElliptic, "not elliptic: need a 2-orbit with |trace| < 2");
    return std::acos(record.trace / 2.0);
}

namespace {

BifurcationPoint locate_plus(const FamilyHandle& f, int k) {
    BifurcationPoint bp;
    bp.kind = BifurcationKind::Plus;
    bp.k = k;
    bp.predicted = predicted_bifurcation(f, k, BifurcationKind::Plus);
    const ScaledReturnMap srm(f, k, bp.predicted);
    const double lk = srm.chain().lambda_k;
    const double mscale = lk * lk / std::abs(f.taylor.d);
    auto mu_of = [&](double m) { return bp.predicted + m * mscale; };

    // unknowns (X, Y, m): fixed point with trace 0
    auto eqs = [&](double X, double Y, double m, Jacobian2& J) {
        const PlanarPoint r = srm.eval({X, Y}, mu_of(m), J);
        return std::array<double, 3>{r.x - X, r.y - Y, J.trace()};
    };
    // seed the trace-zero point from the chain's own parameter
    double X = 0.0, Y = 0.0;
    double m = (srm.chain().M) * std::abs(f.taylor.d) / f.taylor.d;
    double nF = INFINITY;
    for (int it = 0; it < kMaxSteps; ++it) {
        Jacobian2 J;
        const auto F = eqs(X, Y, m, J);
        nF = std::max({std::abs(F[0]), std::abs(F[1]), std::abs(F[2])});
        if (nF <= 1e-12) break;
        constexpr double h = 1e-5;
        Jacobian2 Jp, Jm;
        const double tX = (eqs(X + h, Y, m, Jp)[2] - eqs(X - h, Y, m, Jm)[2]) / (2 * h);
        const double tY = (eqs(X, Y + h, m, Jp)[2] - eqs(X, Y - h, m, Jm)[2]) / (2 * h);
        const auto Fp = eqs(X, Y, m + h, Jp), Fm = eqs(X, Y, m - h, Jm);
        Eigen::Matrix3d A;
        A << J.xx - 1.0, J.xy, (Fp[0] - Fm[0]) / (2 * h),
             J.yx, J.yy - 1.0, (Fp[1] - Fm[1]) / (2 * h),
             tX, tY, (Fp[2] - Fm[2]) / (2 * h);
        const Eigen::Vector3d d = A.fullPivLu().solve(Eigen::Vector3d(F[0], F[1], F[2]));
        if (!d.allFinite()) throw Error(ErrorCode::SingularJacobian, "singular bordered system");
        X -= d(0);
        Y -= d(1);
        m -= d(2);
        if (d.cwiseAbs().maxCoeff() < 1e-14) break;
    }
    Jacobian2 J;
    const auto F = eqs(X, Y, m, J);
    nF = std::max({std::abs(F[0]), std::abs(F[1])});
    if (!(nF <= kAccept) || !(std::abs(F[2]) <= 1e-8))
        throw Error(ErrorCode::NewtonDiverged, "bordered Newton for the plus bifurcation did not converge");
    bp.mu = mu_of(m);
    bp.condition = F[2];
    bp.orbit = record_at(srm, bp.mu, {X, Y}, 1);
    return bp;
}

BifurcationPoint locate_minus(const FamilyHandle& f, int k) {
    BifurcationPoint bp;
    bp.kind = BifurcationKind::Minus;
    bp.k = k;
    bp.predicted = predicted_bifurcation(f, k, BifurcationKind::Minus);
    const ScaledReturnMap srm(f, k, bp.predicted);
    const double lk = srm.chain().lambda_k;
    const double mscale = lk * lk / std::abs(f.taylor.d);
    auto mu_of = [&](double m) { return bp.predicted + m * mscale; };

    PlanarPoint seed{-1.0, 1.0};
    auto cond = [&](double m) {
        const double mu = mu_of(m);
        const double M = chain_parameter(srm, f, mu);
        OrbitRecord r;
        try {
            r = find_two_periodic(srm, mu, seed);
        } catch (const Error&) {
            const double s = std::sqrt(std::max(M, 1e-3));
            r = find_two_periodic(srm, mu, {-s, s});
        }
        // keep the branch through p1 = (-sqrt M, sqrt M)
        seed = r.scaled[0].x < r.scaled[1].x ? r.scaled[0] : r.scaled[1];
        return r.trace + 2.0;
    };
    const double lo = -0.3, hi = 0.3;
    const double flo = cond(lo), fhi = cond(hi);
    if (!(flo * fhi < 0.0)) throw Error(ErrorCode::BracketFailed, "bracket failed: no sign change of trace + 2");
    std::uintmax_t iters = 100;
    auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-11; };
    const auto [a, b] = boost::math::tools::toms748_solve(cond, lo, hi, flo, fhi, tol, iters);
    const double m = 0.5 * (a + b);
    bp.mu = mu_of(m);
    bp.condition = cond(m);
    bp.orbit = find_two_periodic(srm, bp.mu, seed);
    return bp;
}

}  // namespace

BifurcationPoint locate_bifurcation(const FamilyHandle& family, int k, BifurcationKind kind) {
    return kind == BifurcationKind::Plus ? locate_plus(family, k) : locate_minus(family, k);
}

}  // namespace hnm

#include "hnm/henon.hpp"

#include <array>
#include <cmath>
#include <complex>

#include <boost/math/tools/roots.hpp>

namespace hnm {

const char* stability_name(StabilityTag tag) {
    switch (tag) {
        case StabilityTag::Saddle: return "saddle";
        case StabilityTag::EllipticGeneric: return "elliptic-generic";
        case StabilityTag::ParabolicPlus: return "parabolic-plus";
        case StabilityTag::ParabolicMinus: return "parabolic-minus";
        case StabilityTag::Resonance14: return "resonance-1:4";
        case StabilityTag::Resonance13: return "resonance-1:3";
        case StabilityTag::Twistless: return "twistless";
    }
    return "unknown";
}

StabilityClass classify_trace(double trace, double det, double tol) {
    StabilityClass out;
    if (det < 0.0) {
        out.tag = std::abs(trace) <= tol ? StabilityTag::ParabolicPlus : StabilityTag::Saddle;
        return out;
    }
    if (std::abs(trace - 2.0) <= tol) {
        out.tag = StabilityTag::ParabolicPlus;
    } else if (std::abs(trace + 2.0) <= tol) {
        out.tag = StabilityTag::ParabolicMinus;
    } else if (std::abs(trace) > 2.0) {
        out.tag = StabilityTag::Saddle;
    } else {
        out.phase = std::acos(trace / 2.0);
        if (std::abs(trace) <= tol)
            out.tag = StabilityTag::Resonance14;
        else if (std::abs(trace + 1.0) <= tol)
            out.tag = StabilityTag::Resonance13;
        else if (std::abs(trace + 0.5) <= tol)
            out.tag = StabilityTag::Twistless;
        else
            out.tag = StabilityTag::EllipticGeneric;
    }
    return out;
}

PlanarPoint henon_eval(double M, PlanarPoint p) { return {p.y, M + p.x - p.y * p.y}; }

Jacobian2 henon_jacobian(PlanarPoint p) { return {0.0, 1.0, 1.0, -2.0 * p.y}; }

MapExpr henon_map(double M) {
    // (x, y) -> (x + M - y^2, y) -> swap
    return MapExpr({stage::VerticalShear{Polynomial({M, 0.0, -1.0})}, stage::Swap{}});
}

std::vector<HenonFixedPoint> fixed_points(double M) {
    std::vector<HenonFixedPoint> out;
    if (M < 0.0) return out;
    const double s = std::sqrt(M);
    for (double y : (M == 0.0 ? std::vector<double>{0.0} : std::vector<double>{-s, s})) {
        // nu^2 + 2 y nu - 1 = 0
        const double r = std::sqrt(y * y + 1.0);
        out.push_back({{y, y}, -y + r, -y - r});
    }
    return out;
}

HenonTwoOrbit two_periodic_orbit(double M) {
    if (!(M > 0.0)) throw Error(ErrorCode::NoRealOrbit, "no real 2-periodic orbit for M <= 0");
    const double s = std::sqrt(M);
    HenonTwoOrbit o;
    o.p1 = {-s, s};
    o.p2 = {s, -s};
    o.trace = 2.0 - 4.0 * M;
    o.stability = classify_trace(o.trace, 1.0);
    return o;
}

namespace {

using cplx = std::complex<double>;

// Dense bivariate polynomial in (w, wbar) truncated at total degree 3.
struct Poly3 {
    std::array<std::array<cplx, 4>, 4> c{};

    cplx& operator()(int j, int k) { return c[j][k]; }
    cplx operator()(int j, int k) const { return c[j][k]; }

    Poly3 operator*(const Poly3& o) const {
        Poly3 r;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; a + b < 4; ++b) {
                if (c[a][b] == cplx{}) continue;
                for (int p = 0; a + p < 4; ++p)
                    for (int q = 0; a + b + p + q < 4; ++q) r.c[a + p][b + q] += c[a][b] * o.c[p][q];
            }
        return r;
    }
    Poly3 operator+(const Poly3& o) const {
        Poly3 r = *this;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) r.c[a][b] += o.c[a][b];
        return r;
    }
    Poly3 scaled(cplx s) const {
        Poly3 r = *this;
        for (auto& row : r.c)
            for (auto& v : row) v *= s;
        return r;
    }
    /// conj(p(w, wbar)) as a polynomial in (w, wbar)
    Poly3 conj_swap() const {
        Poly3 r;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) r.c[b][a] = std::conj(c[a][b]);
        return r;
    }
};

}  // namespace

double birkhoff_b1(double M) {
    if (!(M > 0.0 && M < 1.0)) throw Error(ErrorCode::InvalidArgument, "birkhoff_b1 needs 0 < M < 1");
    if (std::abs(M - 0.5) < 1e-9 || std::abs(M - 0.75) < 1e-9)
        throw Error(ErrorCode::Resonant, "resonant: strong resonance at M = 1/2 or 3/4");

    const double s = std::sqrt(M);
    // H^2 around p1 = (-s, s) in shifted coordinates (u, v):
    //   v1 = u - 2 s v - v^2,  (u, v) -> (v1, v + 2 s v1 - v1^2)
    const double a11 = 1.0, a12 = -2.0 * s, a22 = 1.0 - 4.0 * M;
    const double half_tr = 0.5 * (a11 + a22);
    const cplx lam(half_tr, std::sqrt(1.0 - half_tr * half_tr));

    cplx v0 = a12, v1 = lam - a11;
    const double om = std::imag(v0 * std::conj(v1) - v1 * std::conj(v0));
    const double nrm = std::sqrt(std::abs(om));
    v0 /= nrm;
    v1 /= nrm;
    // p = w v + conj(w v); inverse row for w
    const cplx detP = v0 * std::conj(v1) - std::conj(v0) * v1;
    const cplx pi0 = std::conj(v1) / detP, pi1 = -std::conj(v0) / detP;

    Poly3 U, V;
    U(1, 0) = v0;
    U(0, 1) = std::conj(v0);
    V(1, 0) = v1;
    V(0, 1) = std::conj(v1);

    const Poly3 v1p = U + V.scaled(-2.0 * s) + (V * V).scaled(-1.0);
    const Poly3 X = v1p;
    const Poly3 Y = V + v1p.scaled(2.0 * s) + (v1p * v1p).scaled(-1.0);
    const Poly3 W = X.scaled(pi0) + Y.scaled(pi1);

    // Quadratic normal-form step, then the resonant cubic coefficient.
    Poly3 h;
    for (int j = 0; j <= 2; ++j) {
        const int k = 2 - j;
        h(j, k) = W(j, k) / (std::pow(lam, j) * std::pow(std::conj(lam), k) - lam);
    }
    Poly3 w, wb;
    w(1, 0) = 1.0;
    wb(0, 1) = 1.0;
    const Poly3 z = w + h, zb = wb + h.conj_swap();
    const Poly3 zz = z * z, zzb = z * zb, zbzb = zb * zb;
    const Poly3 full = zz.scaled(W(2, 0)) + zzb.scaled(W(1, 1)) + zbzb.scaled(W(0, 2));
    const cplx c21 = W(2, 1) + full(2, 1);
    return std::imag(c21 / lam);
}

namespace {

// Outward-rounded interval arithmetic, just enough for the covering check.
struct Interval {
    double lo, hi;
};

double down(double v) { return std::nextafter(v, -INFINITY); }
double up(double v) { return std::nextafter(v, INFINITY); }

Interval add(Interval a, Interval b) { return {down(a.lo + b.lo), up(a.hi + b.hi)}; }

Interval sqr(Interval a) {
    const double l2 = a.lo * a.lo, h2 = a.hi * a.hi;
    if (a.lo >= 0.0) return {down(l2), up(h2)};
    if (a.hi <= 0.0) return {down(h2), up(l2)};
    return {0.0, up(std::max(l2, h2))};
}

Interval neg(Interval a) { return {-a.hi, -a.lo}; }

// y' = M + x - y^2 over a box
Interval henon_y(double M, Interval x, Interval y) { return add(add(Interval{M, M}, x), neg(sqr(y))); }

}  // namespace

bool horseshoe_certificate(double M) {
    if (!std::isfinite(M) || M <= 0.0) return false;
    // R0 solves R^2 = M + 2R; the strip pair is X x (+-[a, R]).
    const double R0 = 1.0 + std::sqrt(1.0 + M);
    const double R = R0 * (1.0 + 1e-3);
    const double Rx = R * (1.0 + 1e-6);
    const double gap = M - R - Rx;
    if (!(gap > 0.0)) return false;
    const double a = 0.5 * std::sqrt(gap);
    if (!(a > 0.0 && a < R && R < Rx)) return false;

    constexpr int kPieces = 64;
    for (int sign : {-1, 1}) {
        const Interval Yj = sign > 0 ? Interval{a, R} : Interval{-R, -a};
        // x' = y must land strictly inside X.
        if (!(Yj.lo > -Rx && Yj.hi < Rx)) return false;
        for (double yedge : {a, R}) {
            const double ye = sign * yedge;
            for (int i = 0; i < kPieces; ++i) {
                const Interval xs{-Rx + 2.0 * Rx * i / kPieces, -Rx + 2.0 * Rx * (i + 1) / kPieces};
                const Interval img = henon_y(M, {down(xs.lo), up(xs.hi)}, {ye, ye});
                // inner edge goes above both strips, outer edge below both
                if (yedge == a ? !(img.lo > R) : !(img.hi < -R)) return false;
            }
        }
    }
    return true;
}

std::vector<HenonBifurcation> bifurcation_values() {
    using boost::math::tools::toms748_solve;
    auto tol = [](double l, double r) { return std::abs(r - l) <= 1e-14; };
    auto root = [&](auto f, double lo, double hi) {
        std::uintmax_t it = 200;
        auto [l, r] = toms748_solve(f, lo, hi, tol, it);
        return 0.5 * (l + r);
    };
    auto trace = [](double M) { return 2.0 - 4.0 * M; };
    // det(DH - I) at the fixed point (s, s), s = sign(M) sqrt|M| continued through 0
    auto fixed_plus_one = [](double M) { return 2.0 * std::copysign(std::sqrt(std::abs(M)), M); };

    std::vector<HenonBifurcation> out;
    out.push_back({"fixed-point-birth", root(fixed_plus_one, -1.0, 0.75), "fixed point with multipliers +1, -1"});
    out.push_back({"period-doubling", root([&](double M) { return trace(M) + 2.0; }, 0.1, 1.7), "trace D(H^2) = -2"});
    out.push_back({"resonance-1:4", root([&](double M) { return trace(M); }, 0.1, 0.9), "trace D(H^2) = 0"});
    out.push_back({"resonance-1:3", root([&](double M) { return trace(M) + 1.0; }, 0.6, 0.9), "trace D(H^2) = -1"});
    out.push_back({"twistless", root([](double M) { return birkhoff_b1(M); }, 0.55, 0.7), "first Birkhoff coefficient = 0"});
    return out;
}

}  // namespace hnm

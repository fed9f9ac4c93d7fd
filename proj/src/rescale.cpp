#include "hnm/rescale.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "hnm/parallel.hpp"

namespace hnm {

namespace {

// lambda^k y- alpha (1 + k beta1 lambda^k x+ y-)
double alpha_term(const FamilyHandle& f, int k) {
    const double lk = std::pow(f.lambda(), k);
    return lk * f.y_minus() * f.alpha * (1.0 + k * f.local.beta1() * lk * f.x_plus() * f.y_minus());
}

}  // namespace

RescaledParam m_from_mu(const FamilyHandle& f, int k, double mu) {
    const double lk = std::pow(f.lambda(), k);
    const double t = alpha_term(f, k);
    // two-sum keeps the rounding error of mu + t
    const double s = mu + t;
    const double bb = s - mu;
    const double err = (mu - (s - bb)) + (t - bb);
    if (t != 0.0 && std::abs(s) < 1e3 * std::numeric_limits<double>::epsilon() * std::abs(t))
        throw Error(ErrorCode::PrecisionFloor, "precision floor: mu cancels the alpha term to rounding level");
    RescaledParam r;
    r.M = -f.taylor.d * ((s + err) / (lk * lk)) - f.s0;
    r.correction_cubic = f.taylor.f03 / (f.taylor.d * f.taylor.d) * lk;
    return r;
}

double mu_from_m(const FamilyHandle& f, int k, double M) {
    const double lk = std::pow(f.lambda(), k);
    return -alpha_term(f, k) - (M + f.s0) * (lk * lk) / f.taylor.d;
}

namespace {

struct Quadratic {
    // value and derivatives at 0 for both components
    PlanarPoint f0, fx, fy, fxx, fxy, fyy;  // fxx, fyy are halved second derivatives
};

Quadratic quadratic_taylor(const std::function<PlanarPoint(PlanarPoint)>& G, double h) {
    auto d1 = [&](double hh) {
        const PlanarPoint gx = G({hh, 0}) - G({-hh, 0});
        const PlanarPoint gy = G({0, hh}) - G({0, -hh});
        return std::pair{(1.0 / (2 * hh)) * gx, (1.0 / (2 * hh)) * gy};
    };
    auto [ax, ay] = d1(h);
    auto [bx, by] = d1(h / 2);
    Quadratic q;
    q.f0 = G({0, 0});
    q.fx = (1.0 / 3.0) * (4.0 * bx - ax);
    q.fy = (1.0 / 3.0) * (4.0 * by - ay);
    const double h2 = h * h;
    q.fxx = (0.5 / h2) * (G({h, 0}) - 2.0 * q.f0 + G({-h, 0}));
    q.fyy = (0.5 / h2) * (G({0, h}) - 2.0 * q.f0 + G({0, -h}));
    q.fxy = (0.25 / h2) * (G({h, h}) - G({h, -h}) - G({-h, h}) + G({-h, -h}));
    return q;
}

Affine2 affine(double a, double b, double c, double d, double ox, double oy) { return {{a, b, c, d}, {ox, oy}}; }

}  // namespace

RescaleChain build_chain(const FamilyHandle& f, int k, double mu_ref, int refine_steps) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "rescaling needs k >= 1");
    const TaylorData& t = f.taylor;
    const double xp = f.x_plus(), ym = f.y_minus();
    RescaleChain ch;
    ch.k = k;
    ch.mu_ref = mu_ref;
    const double lk = std::pow(f.lambda(), k);
    ch.lambda_k = lk;
    ch.D = t.d + lk * t.f12 * xp;
    ch.sigma = 0.5 * t.f11 * xp;
    ch.nu1 = -t.e02 / (t.b * t.d) * lk;
    ch.nu2 = ch.nu1 - t.a * lk;
    const double beta_corr = 1.0 + k * f.local.beta1() * lk * xp * ym;
    ch.M1 = mu_ref + lk * (t.c * xp - ym) * beta_corr + lk * lk * xp * (t.a * t.c + t.f20 * xp);
    ch.M2 = -ch.D * ch.M1 / (lk * lk);
    ch.M3 = ch.M2 + 0.25 * (t.f11 * xp) * (t.f11 * xp);
    ch.cubic = t.f03 / (t.d * t.d) * lk;

    // Linear proxy of the exit coordinate y_k around the homoclinic point.
    const double ustar = lk * xp * ym;
    const double Bstar = f.local.series()(ustar);
    const double sk = std::pow(Bstar, -k);

    const Affine2 shift1 = affine(1.0, 0.0, 0.0, sk / lk, -xp - lk * xp * t.a, -ym);
    const Affine2 scale = affine(-ch.D / (t.b * lk), 0.0, 0.0, -ch.D / lk, -ch.sigma, -ch.sigma);
    const Affine2 mix = affine(1.0, ch.nu1, -ch.nu2, 1.0, -0.5 * t.a * lk - ch.nu1 * ch.M3, -0.5 * t.a * lk);
    ch.staged = mix.after(scale.after(shift1));

    const ReturnMap rm(f, k);
    const Affine2 staged_inv = ch.staged.inverse();
    auto R = [&](PlanarPoint w) { return ch.staged.apply(rm.eval_at(staged_inv.apply(w), mu_ref)); };

    Jacobian2 A = Jacobian2::identity();
    PlanarPoint tr{0.0, 0.0};
    double M = ch.M3;
    for (int it = 0; it < refine_steps; ++it) {
        const Affine2 cur{A, tr};
        const Affine2 cur_inv = cur.inverse();
        auto G = [&](PlanarPoint w) { return cur_inv.apply(R(cur.apply(w))); };
        const Quadratic q = quadratic_taylor(G, 0.25);
        // E = G - H_M, first-order homological solve
        const double E1_0 = q.f0.x, E1_Y = q.fy.x - 1.0, E1_YY = q.fyy.x;
        const double E2_0 = q.f0.y - M, E2_Y = q.fy.y, E2_XY = q.fxy.y, E2_YY = q.fyy.y + 1.0;
        const double p12 = -E1_YY, p21 = 0.5 * E2_XY, p22 = E2_YY, p11 = p22 + E1_Y;
        const double t2 = 0.5 * (E2_Y + p12 - p21);
        const double t1 = E1_0 + t2 - p12 * M;
        const double dM = E2_0 + t1 - p22 * M - t2;
        const Jacobian2 P{1.0 + p11, p12, p21, 1.0 + p22};
        tr = A.apply({t1, t2}) + tr;
        A = A * P;
        M += dM;
    }
    ch.M = M;
    ch.refinement = {A, tr};
    ch.from_original = ch.refinement.inverse().after(ch.staged);
    ch.to_original = ch.from_original.inverse();
    return ch;
}

ScaledReturnMap::ScaledReturnMap(const FamilyHandle& family, int k, double mu_ref, int refine_steps)
    : rm_(family, k), chain_(build_chain(family, k, mu_ref, refine_steps)) {}

PlanarPoint ScaledReturnMap::eval(PlanarPoint w, double mu) const {
    return chain_.from_original.apply(rm_.eval_at(chain_.to_original.apply(w), mu));
}

PlanarPoint ScaledReturnMap::eval(PlanarPoint w, double mu, Jacobian2& jac) const {
    Jacobian2 J;
    const PlanarPoint r = rm_.eval_at(chain_.to_original.apply(w), mu, J);
    jac = chain_.from_original.lin * J * chain_.to_original.lin;
    return chain_.from_original.apply(r);
}

PlanarPoint near_henon(double M, double cubic, PlanarPoint w) {
    return {w.y, M + w.x - w.y * w.y + cubic * w.y * w.y * w.y};
}

double grid_residual(const std::function<PlanarPoint(PlanarPoint)>& map, double M, double cubic, double half, int n) {
    double sup = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const PlanarPoint w{-half + 2.0 * half * i / (n - 1), -half + 2.0 * half * j / (n - 1)};
            const PlanarPoint r = map(w) - near_henon(M, cubic, w);
            sup = std::max(sup, r.norm_inf());
        }
    return sup;
}

double fit_cubic_coefficient(const std::function<PlanarPoint(PlanarPoint)>& map, double M) {
    constexpr int n = 31;
    Eigen::MatrixXd A(n, 5);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        const double y = -1.5 + 3.0 * i / (n - 1);
        double p = 1.0;
        for (int j = 0; j < 5; ++j, p *= y) A(i, j) = p;
        b(i) = map({0.0, y}).y - (M - y * y);
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    return c(3);
}

ConvergenceReport convergence_report(const FamilyHandle& family, const std::vector<int>& ks, double M, int threads) {
    ConvergenceReport rep;
    rep.rows.resize(ks.size());
    parallel_for(ks.size(), threads, [&](std::size_t i) {
        const int k = ks[i];
        ConvergenceRow& row = rep.rows[i];
        row.k = k;
        row.M = M;
        row.mu = mu_from_m(family, k, M);
        const ScaledReturnMap srm(family, k, row.mu);
        row.M_chain = srm.chain().M;
        auto G = [&](PlanarPoint w) { return srm.eval(w, row.mu); };
        const double cubic = srm.chain().cubic;
        row.sup_residual = grid_residual(G, row.M_chain, cubic);
        const double lk = std::pow(family.lambda(), k);
        row.normalized = row.sup_residual / (k * lk * lk);
        row.cubic_ratio = cubic != 0.0 ? fit_cubic_coefficient(G, row.M_chain) / cubic : 0.0;
    });
    double head = 0, tail = 0;
    const std::size_t third = std::max<std::size_t>(1, rep.rows.size() / 3);
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        rep.normalized_max = std::max(rep.normalized_max, rep.rows[i].normalized);
        if (i < third) head = std::max(head, rep.rows[i].normalized);
        if (i >= rep.rows.size() - third) tail = std::max(tail, rep.rows[i].normalized);
    }
    rep.bounded = std::isfinite(rep.normalized_max) && tail <= 1.5 * head;
    return rep;
}

}  // namespace hnm

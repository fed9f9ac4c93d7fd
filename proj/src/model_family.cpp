#include "hnm/model_family.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <functional>

namespace hnm {

Polynomial LocalMapParams::series() const {
    std::vector<double> c{1.0};
    c.insert(c.end(), beta.begin(), beta.end());
    return Polynomial(std::move(c));
}

MapExpr LocalMapParams::as_map() const {
    if (beta.empty()) return MapExpr({stage::Diagonal{lambda}});
    return MapExpr({stage::Moser{lambda, series()}});
}

void LocalMapParams::validate() const {
    if (!std::isfinite(lambda) || lambda == 0.0 || std::abs(lambda) >= 1.0)
        throw Error(ErrorCode::InvalidArgument, "lambda must satisfy 0 < |lambda| < 1");
    for (double b : beta)
        if (!std::isfinite(b)) throw Error(ErrorCode::InvalidArgument, "Moser coefficients must be finite");
}

const char* recipe_name(RecipeKind kind) {
    return kind == RecipeKind::HenonLike ? "henon-like" : "shear-sandwich";
}

RecipeKind recipe_from_name(const std::string& name) {
    if (name == "henon-like" || name == "i") return RecipeKind::HenonLike;
    if (name == "shear-sandwich" || name == "ii") return RecipeKind::ShearSandwich;
    throw Error(ErrorCode::Config, "unknown recipe '" + name + "'");
}

void RecipeSpec::validate() const {
    if (!(x_plus > 0.0) || !std::isfinite(x_plus)) throw Error(ErrorCode::InvalidArgument, "x_plus must be > 0");
    if (!(y_minus > 0.0) || !std::isfinite(y_minus)) throw Error(ErrorCode::InvalidArgument, "y_minus must be > 0");
    if (c == 0.0 || !std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "c must be finite and nonzero");
    auto finite = [](const std::vector<double>& v) {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    };
    if (!finite(p) || !finite(q) || !std::isfinite(g1) || !std::isfinite(g2) || !std::isfinite(h2))
        throw Error(ErrorCode::InvalidArgument, "recipe coefficients must be finite");
}

namespace {

// Q(eta) from q = {q2, q3, ...}
Polynomial q_poly(const RecipeSpec& r, double scale) {
    std::vector<double> c{0.0, 0.0};
    for (double v : r.q) c.push_back(scale * v);
    return Polynomial(std::move(c));
}

}  // namespace

GlobalMapSpec make_global(const RecipeSpec& r, double mu) {
    r.validate();
    const double b = r.b();
    MapExpr m;
    m.then(stage::Translate{0.0, -r.y_minus});
    if (r.kind == RecipeKind::HenonLike) {
        std::vector<double> pc{0.0, b};
        pc.insert(pc.end(), r.p.begin(), r.p.end());
        Polynomial P(std::move(pc));
        m.then(stage::VerticalShear{q_poly(r, 1.0) * P.derivative()});
        m.then(stage::Swap{});
        m.then(stage::CotangentLift{P});
    } else {
        m.then(stage::VerticalShear{q_poly(r, b)});
        m.then(stage::Swap{});
        m.then(stage::Diagonal{b});
        m.then(stage::VerticalShear{Polynomial({0.0, r.g1, r.g2})});
        m.then(stage::HorizontalShear{Polynomial({0.0, 0.0, r.h2})});
    }
    m.then(stage::Translate{r.x_plus, 0.0});
    return GlobalMapSpec{r.x_plus, r.y_minus, mu, r.n0, std::move(m)};
}

namespace {

// Central-difference weights for derivative orders 0..3 on offsets -2..2.
constexpr std::array<std::array<double, 5>, 4> kStencil{{
    {0.0, 0.0, 1.0, 0.0, 0.0},
    {0.0, -0.5, 0.0, 0.5, 0.0},
    {0.0, 1.0, -2.0, 1.0, 0.0},
    {-0.5, 1.0, 0.0, -1.0, 0.5},
}};

constexpr double kFactorial[4] = {1.0, 1.0, 2.0, 6.0};

struct Extractor {
    const GlobalMapSpec& g;

    PlanarPoint fg(double x, double eta) const {
        PlanarPoint q = g.eval_at({x, g.y_minus + eta}, 0.0);
        return {q.x - g.x_plus, q.y};
    }

    PlanarPoint raw(int i, int j, double h) const {
        PlanarPoint acc{0.0, 0.0};
        for (int a = 0; a < 5; ++a) {
            const double wa = kStencil[i][a];
            if (wa == 0.0) continue;
            for (int b = 0; b < 5; ++b) {
                const double wb = kStencil[j][b];
                if (wb == 0.0) continue;
                acc = acc + (wa * wb) * fg((a - 2) * h, (b - 2) * h);
            }
        }
        const double s = std::pow(h, i + j);
        return {acc.x / s, acc.y / s};
    }

    // Taylor coefficient of x^i eta^j for both components.
    PlanarPoint coeff(int i, int j) const {
        constexpr double h0 = 0.02;
        const PlanarPoint d0 = raw(i, j, h0), d1 = raw(i, j, h0 / 2), d2 = raw(i, j, h0 / 4);
        auto rich = [](PlanarPoint lo, PlanarPoint hi, double f) {
            return PlanarPoint{(f * hi.x - lo.x) / (f - 1), (f * hi.y - lo.y) / (f - 1)};
        };
        const PlanarPoint r1a = rich(d0, d1, 4.0), r1b = rich(d1, d2, 4.0);
        const PlanarPoint r2 = rich(r1a, r1b, 16.0);
        for (auto [lvl1, lvl2] : {std::pair{r1b.x, r2.x}, std::pair{r1b.y, r2.y}}) {
            if (!(std::abs(lvl1 - lvl2) <= 1e-6 * std::max(1.0, std::abs(lvl2))))
                throw Error(ErrorCode::IllConditioned, "ill-conditioned extraction: Richardson levels disagree");
        }
        const double f = kFactorial[i] * kFactorial[j];
        return {r2.x / f, r2.y / f};
    }
};

}  // namespace

TaylorData extract_taylor(const GlobalMapSpec& global) {
    if (global.stages.swap_count() % 2 == 0)
        throw Error(ErrorCode::OrientableGlobalMap, "orientable global map: even number of swaps");
    Extractor ex{global};
    TaylorData t;
    const PlanarPoint c10 = ex.coeff(1, 0), c01 = ex.coeff(0, 1);
    const PlanarPoint c20 = ex.coeff(2, 0), c11 = ex.coeff(1, 1), c02 = ex.coeff(0, 2);
    const PlanarPoint c30 = ex.coeff(3, 0), c21 = ex.coeff(2, 1), c12 = ex.coeff(1, 2), c03 = ex.coeff(0, 3);
    t.a = c10.x;
    t.b = c01.x;
    t.c = c10.y;
    t.d = c02.y;
    t.e20 = c20.x;
    t.e11 = c11.x;
    t.e02 = c02.x;
    t.f20 = c20.y;
    t.f11 = c11.y;
    t.f30 = c30.y;
    t.f21 = c21.y;
    t.f12 = c12.y;
    t.f03 = c03.y;
    if (!(std::abs(c01.y) <= 1e-8) || !(std::abs(t.d) > 1e-8))
        throw Error(ErrorCode::NotTangency, "not a tangency: need G_y(0) = 0 and d != 0");
    return t;
}

double alpha_of(const TaylorData& t, double x_plus, double y_minus) { return t.c * x_plus / y_minus - 1.0; }

double s0_of(const TaylorData& t, double x_plus) {
    const double g = t.f11 * x_plus;
    return t.d * x_plus * (t.a * t.c + t.f20 * x_plus) - 0.25 * g * g;
}

double alpha_invariant(const FamilyHandle& h) { return alpha_of(h.taylor, h.x_plus(), h.y_minus()); }
double s0_invariant(const FamilyHandle& h) { return s0_of(h.taylor, h.x_plus()); }

FamilyHandle build_family(const LocalMapParams& local, const RecipeSpec& recipe, double mu) {
    local.validate();
    FamilyHandle h;
    h.local = local;
    h.recipe = recipe;
    h.global = make_global(recipe, mu);
    h.taylor = extract_taylor(h.global);
    if (std::abs(h.taylor.b * h.taylor.c - 1.0) > 1e-10)
        throw Error(ErrorCode::IllConditioned, "extracted bc deviates from 1");
    h.alpha = alpha_invariant(h);
    h.s0 = s0_invariant(h);
    return h;
}

FamilyHandle FamilyHandle::with_mu(double mu) const {
    FamilyHandle out = *this;
    out.global.mu = mu;
    return out;
}

namespace {

double& shape_knob(RecipeSpec& r) {
    if (r.kind == RecipeKind::ShearSandwich) return r.g1;
    if (r.p.empty()) r.p.push_back(0.0);
    return r.p.front();
}

}  // namespace

FamilyHandle tune_to(const FamilyHandle& h, double alpha_target, double s0_target) {
    RecipeSpec r = h.recipe;
    r.c = (1.0 + alpha_target) * r.y_minus / r.x_plus;
    if (r.c == 0.0 || !std::isfinite(r.c))
        throw Error(ErrorCode::TargetUnreachable, "target unreachable: alpha = -1 forces c = 0");

    auto s0_at = [&](double knob) {
        RecipeSpec t = r;
        shape_knob(t) = knob;
        try {
            return s0_of(extract_taylor(make_global(t, 0.0)), t.x_plus);
        } catch (const Error&) {
            // the secant wandered to a knob value the extraction cannot handle
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    // s0 is quadratic in the knob with a stationary point, so start away from zero
    // on the side of the current value.
    double k0 = shape_knob(r);
    if (std::abs(k0) < 0.1) k0 = (k0 < 0.0 ? -0.5 : 0.5);
    double k1 = 1.2 * k0;
    double r0 = s0_at(k0) - s0_target, r1 = s0_at(k1) - s0_target;
    for (int it = 0; it < 80 && std::abs(r1) > 1e-12; ++it) {
        const double den = r1 - r0;
        if (den == 0.0 || !std::isfinite(den)) break;
        double k2 = k1 - r1 * (k1 - k0) / den;
        if (!std::isfinite(k2) || std::abs(k2) > 1e6) break;
        double r2 = s0_at(k2) - s0_target;
        // overshoot into a region the extraction rejects: pull back toward k1
        for (int back = 0; back < 30 && !std::isfinite(r2); ++back) {
            k2 = 0.5 * (k1 + k2);
            r2 = s0_at(k2) - s0_target;
        }
        if (!std::isfinite(r2)) break;
        k0 = k1;
        r0 = r1;
        k1 = k2;
        r1 = r2;
    }
    if (!(std::abs(r1) <= 1e-9))
        throw Error(ErrorCode::TargetUnreachable, "target unreachable: s0 knob cannot realize the requested value");
    shape_knob(r) = k1;
    FamilyHandle out = build_family(h.local, r, h.global.mu);
    if (std::abs(out.alpha - alpha_target) > 1e-8 || std::abs(out.s0 - s0_target) > 1e-8)
        throw Error(ErrorCode::TargetUnreachable, "target unreachable: tuned invariants miss the target");
    return out;
}

}  // namespace hnm

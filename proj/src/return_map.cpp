#include "hnm/return_map.hpp"

#include <cmath>
#include <deque>

#include "hnm/parallel.hpp"

namespace hnm {

namespace {

struct PowFactors {
    double xk_scale;  // lambda^k B^k
    double B;
    double dB;
};

// lambda^k B(u)^k in the log domain, signs tracked separately.
PowFactors pow_factors(const LocalMapParams& local, double u, int k) {
    const Polynomial s = local.series();
    const double B = s(u);
    if (B == 0.0 || !std::isfinite(B)) throw EscapeError(0, "orbit escaped: Moser factor vanished");
    const double logmag = k * (std::log(std::abs(local.lambda)) + std::log(std::abs(B)));
    const bool neg = (k % 2 == 1) && ((local.lambda < 0.0) != (B < 0.0));
    const double mag = std::exp(logmag);
    return {neg ? -mag : mag, B, s.derivative(u)};
}

void check(PlanarPoint q) {
    if (!q.finite() || std::abs(q.x) + std::abs(q.y) > kEscapeThreshold)
        throw EscapeError(0, "orbit escaped under T0^k");
}

}  // namespace

PlanarPoint t0_pow_closed(const LocalMapParams& local, PlanarPoint p, int k) {
    if (k < 0) throw Error(ErrorCode::InvalidArgument, "k must be non-negative");
    if (k == 0) return p;
    const PowFactors f = pow_factors(local, p.x * p.y, k);
    PlanarPoint q{p.x * f.xk_scale, p.y / f.xk_scale};
    check(q);
    return q;
}

PlanarPoint t0_pow_closed(const LocalMapParams& local, PlanarPoint p, int k, Jacobian2& jac) {
    if (k < 0) throw Error(ErrorCode::InvalidArgument, "k must be non-negative");
    if (k == 0) {
        jac = Jacobian2::identity();
        return p;
    }
    const double u = p.x * p.y;
    const PowFactors f = pow_factors(local, u, k);
    const double L = f.xk_scale;  // lambda^k B^k
    const double kd = static_cast<double>(k);
    jac.xx = L * (f.B + kd * u * f.dB) / f.B;
    jac.xy = L * p.x * p.x * kd * f.dB / f.B;
    jac.yx = -p.y * p.y * kd * f.dB / (L * f.B);
    jac.yy = (f.B - kd * u * f.dB) / (L * f.B);
    PlanarPoint q{p.x * L, p.y / L};
    check(q);
    return q;
}

CrossSolution cross_solve(const LocalMapParams& local, int k, double x0, double yk) {
    const double lk = std::pow(local.lambda, k);
    const double w = lk * x0 * yk;
    const Polynomial s = local.series();
    double u = w;
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
        const double B = s(u);
        if (!(B > 0.0)) break;
        const double Bk = std::pow(B, k);
        const double f = u - w * Bk;
        const double df = 1.0 - w * k * Bk / B * s.derivative(u);
        if (df == 0.0 || !std::isfinite(df)) break;
        const double step = f / df;
        u -= step;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(u))) {
            ok = true;
            break;
        }
    }
    if (!ok || !std::isfinite(u))
        throw Error(ErrorCode::CrossFormSolveFailed, "cross-form solve failed to converge");
    const double Bk = std::pow(s(u), k);
    return {lk * yk * Bk, lk * x0 * Bk, u};
}

CrossFormReport validate_cross_form(const LocalMapParams& local, const std::vector<int>& ks, int samples) {
    local.validate();
    CrossFormReport rep;
    rep.beta1 = local.beta1();
    const int n = std::max(2, samples);
    for (int k : ks) {
        const double lk = std::pow(local.lambda, k);
        CrossFormRow row;
        row.k = k;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double x0 = 0.5 + static_cast<double>(i) / (n - 1);
                const double yk = 0.5 + static_cast<double>(j) / (n - 1);
                const CrossSolution cs = cross_solve(local, k, x0, yk);
                const double R1 = 1.0 + rep.beta1 * k * lk * x0 * yk;
                const double r = std::max(std::abs(cs.xk - lk * x0 * R1), std::abs(cs.y0 - lk * yk * R1));
                row.sup_residual = std::max(row.sup_residual, r);
            }
        }
        row.normalized = row.sup_residual / (lk * lk);

        // coefficient of w = lambda^k x0 y_k, extrapolated to w -> 0 by a linear fit in w
        double sw = 0, sc = 0, sww = 0, swc = 0;
        const int m = 5;
        for (int j = 0; j < m; ++j) {
            const double yk = 0.5 + 0.25 * j;
            const CrossSolution cs = cross_solve(local, k, 1.0, yk);
            const double w = lk * yk;
            const double c = (cs.xk / lk - 1.0) / w;
            sw += w;
            sc += c;
            sww += w * w;
            swc += w * c;
        }
        const double slope = (m * swc - sw * sc) / (m * sww - sw * sw);
        row.coefficient = (sc - slope * sw) / m;
        rep.rows.push_back(row);
    }
    // slope of the coefficient against k
    double sk = 0, sc = 0, skk = 0, skc = 0;
    for (const auto& r : rep.rows) {
        sk += r.k;
        sc += r.coefficient;
        skk += static_cast<double>(r.k) * r.k;
        skc += r.k * r.coefficient;
        rep.normalized_max = std::max(rep.normalized_max, r.normalized);
    }
    const double nr = static_cast<double>(rep.rows.size());
    rep.beta1_fit = rep.rows.size() >= 2 ? (nr * skc - sk * sc) / (nr * skk - sk * sk) : 0.0;
    // bounded: no growth from the first third of the range to the last
    const std::size_t third = std::max<std::size_t>(1, rep.rows.size() / 3);
    double head = 0, tail = 0;
    for (std::size_t i = 0; i < third; ++i) head = std::max(head, rep.rows[i].normalized);
    for (std::size_t i = rep.rows.size() - third; i < rep.rows.size(); ++i)
        tail = std::max(tail, rep.rows[i].normalized);
    rep.bounded = std::isfinite(rep.normalized_max) && tail <= 1.5 * head + 1e-300;
    return rep;
}

ReturnMap::ReturnMap(FamilyHandle family, int k) : family_(std::move(family)), k_(k) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "return map needs k >= 1");
}

PlanarPoint ReturnMap::eval_at(PlanarPoint p, double mu) const {
    return family_.global.eval_at(t0_pow_closed(family_.local, p, k_), mu);
}

PlanarPoint ReturnMap::eval_at(PlanarPoint p, double mu, Jacobian2& jac) const {
    Jacobian2 j0, j1;
    const PlanarPoint q = t0_pow_closed(family_.local, p, k_, j0);
    PlanarPoint r = family_.global.stages.eval(q, j1);
    jac = j1 * j0;
    return {r.x, r.y + mu};
}

ReturnMap build_return_map(const FamilyHandle& family, int k) { return ReturnMap(family, k); }

double default_window(const FamilyHandle& family) {
    return std::min(family.x_plus(), family.y_minus()) / 10.0;
}

std::pair<Strip, Strip> strips(const FamilyHandle& family, int k, double window) {
    if (!(window > 0.0)) throw Error(ErrorCode::InvalidArgument, "window must be positive");
    const double xp = family.x_plus(), ym = family.y_minus();
    Strip s0, s1;
    s0.which = Strip::Which::Sigma0;
    s1.which = Strip::Which::Sigma1;
    s0.k = s1.k = k;
    constexpr int kEdge = 16;
    const double xs[4] = {xp - window, xp + window, xp + window, xp - window};
    const double ys[4] = {ym - window, ym - window, ym + window, ym + window};
    for (int e = 0; e < 4; ++e) {
        for (int i = 0; i < kEdge; ++i) {
            const double t = static_cast<double>(i) / kEdge;
            const double x0 = xs[e] + t * (xs[(e + 1) % 4] - xs[e]);
            const double yk = ys[e] + t * (ys[(e + 1) % 4] - ys[e]);
            const CrossSolution cs = cross_solve(family.local, k, x0, yk);
            s0.boundary.push_back({x0, cs.y0});
            s1.boundary.push_back({cs.xk, yk});
        }
    }
    for (Strip* s : {&s0, &s1}) {
        s->xmin = s->ymin = INFINITY;
        s->xmax = s->ymax = -INFINITY;
        for (auto p : s->boundary) {
            s->xmin = std::min(s->xmin, p.x);
            s->xmax = std::max(s->xmax, p.x);
            s->ymin = std::min(s->ymin, p.y);
            s->ymax = std::max(s->ymax, p.y);
        }
    }
    if (std::max(std::abs(s0.ymin), std::abs(s0.ymax)) > window ||
        std::max(std::abs(s1.xmin), std::abs(s1.xmax)) > window)
        throw Error(ErrorCode::StripOutsideWindow, "strip outside window: k too small for the window size");
    const CrossSolution c = cross_solve(family.local, k, xp, ym);
    s0.distance = std::abs(c.y0);
    s1.distance = std::abs(c.xk);
    return {s0, s1};
}

const char* horseshoe_name(HorseshoeTag tag) {
    switch (tag) {
        case HorseshoeTag::Empty: return "empty";
        case HorseshoeTag::Regular: return "regular";
        case HorseshoeTag::ParityAlternating: return "parity-alternating";
        case HorseshoeTag::AlphaNegativeHorseshoes: return "alpha-negative-horseshoes";
        case HorseshoeTag::AlphaPositiveTrivial: return "alpha-positive-trivial";
        case HorseshoeTag::Inconclusive: return "inconclusive";
        case HorseshoeTag::Unexpected: return "unexpected";
    }
    return "unknown";
}

std::optional<HorseshoeTag> expected_horseshoe(double lambda, double c, double d, double alpha) {
    if (c < 0.0) {
        if (lambda > 0.0) return d < 0.0 ? HorseshoeTag::Empty : HorseshoeTag::Regular;
        if (d > 0.0) return HorseshoeTag::ParityAlternating;
        return std::nullopt;
    }
    if (lambda > 0.0 && d > 0.0) {
        if (alpha < 0.0) return HorseshoeTag::AlphaNegativeHorseshoes;
        if (alpha > 0.0) return HorseshoeTag::AlphaPositiveTrivial;
    }
    return std::nullopt;
}

namespace {

int expected_count(HorseshoeTag tag, int k) {
    switch (tag) {
        case HorseshoeTag::Empty:
        case HorseshoeTag::AlphaPositiveTrivial: return 0;
        case HorseshoeTag::Regular:
        case HorseshoeTag::AlphaNegativeHorseshoes: return 2;
        case HorseshoeTag::ParityAlternating: return k % 2 == 0 ? 2 : 0;
        default: return -1;
    }
}

struct Components {
    int count = 0;
    std::vector<PlanarPoint> centroids;  // in (x0, y_k)
};

Components label(const std::vector<char>& mask, int nx, int ny, double x_lo, double dx, double y_lo, double dy) {
    Components out;
    std::vector<char> seen(mask.size(), 0);
    std::deque<int> queue;
    for (int start = 0; start < nx * ny; ++start) {
        if (!mask[start] || seen[start]) continue;
        ++out.count;
        double sx = 0, sy = 0;
        int cells = 0;
        queue.push_back(start);
        seen[start] = 1;
        while (!queue.empty()) {
            const int id = queue.front();
            queue.pop_front();
            const int i = id / ny, j = id % ny;
            sx += x_lo + (i + 0.5) * dx;
            sy += y_lo + (j + 0.5) * dy;
            ++cells;
            const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
            for (auto& q : nb) {
                if (q[0] < 0 || q[0] >= nx || q[1] < 0 || q[1] >= ny) continue;
                const int nid = q[0] * ny + q[1];
                if (mask[nid] && !seen[nid]) {
                    seen[nid] = 1;
                    queue.push_back(nid);
                }
            }
        }
        out.centroids.push_back({sx / cells, sy / cells});
    }
    return out;
}

// Vertical cone |dx| <= |dy| in strip-scaled coordinates (x, y / lambda^k)
// must map into itself with expansion.
bool cone_check(const ReturnMap& rm, PlanarPoint p) {
    Jacobian2 J;
    rm.eval_at(p, 0.0, J);
    const double lk = std::pow(rm.family().lambda(), rm.k());
    const Jacobian2 Js{J.xx, J.xy * lk, J.yx / lk, J.yy};
    for (PlanarPoint v : {PlanarPoint{1.0, 1.0}, PlanarPoint{-1.0, 1.0}, PlanarPoint{0.0, 1.0}}) {
        const PlanarPoint w = Js.apply(v);
        if (!(std::abs(w.x) <= std::abs(w.y) && std::abs(w.y) >= 2.0)) return false;
    }
    return true;
}

}  // namespace

HorseshoeEvidence count_intersection(const FamilyHandle& family, int k, double window) {
    const ReturnMap rm(family, k);
    const double xp = family.x_plus(), ym = family.y_minus();
    HorseshoeEvidence ev;
    ev.k = k;

    auto inside = [&](double x0, double yk) {
        try {
            const CrossSolution cs = cross_solve(family.local, k, x0, yk);
            const PlanarPoint q = rm.eval_at({x0, cs.y0}, 0.0);
            if (std::abs(q.x - xp) > window) return false;
            const PlanarPoint qk = t0_pow_closed(family.local, q, k);
            return std::abs(qk.y - ym) <= window;
        } catch (const Error&) {
            return false;
        }
    };

    std::vector<int> history;
    Components last;
    int nx = 16, ny = 128;
    for (; ny <= 8192; nx = std::min(2 * nx, 128), ny *= 2) {
        const double dx = 2.0 * window / nx, dy = 2.0 * window / ny;
        std::vector<char> mask(static_cast<std::size_t>(nx) * ny);
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j)
                mask[i * ny + j] = inside(xp - window + (i + 0.5) * dx, ym - window + (j + 0.5) * dy);
        last = label(mask, nx, ny, xp - window, dx, ym - window, dy);
        history.push_back(last.count);
        ev.resolution = ny;
        const std::size_t h = history.size();
        if (h >= 3 && history[h - 1] == history[h - 2] && history[h - 2] == history[h - 3]) {
            ev.components = last.count;
            break;
        }
    }
    for (auto c : last.centroids) {
        const CrossSolution cs = cross_solve(family.local, k, c.x, c.y);
        ev.cone_ok = ev.cone_ok && cone_check(rm, {c.x, cs.y0});
    }
    return ev;
}

HorseshoeClass classify_horseshoe(const FamilyHandle& family, const std::vector<int>& ks, double window, int threads) {
    HorseshoeClass out;
    const double lambda = family.lambda(), c = family.taylor.c, d = family.taylor.d, alpha = family.alpha;
    out.expected = expected_horseshoe(lambda, c, d, alpha);
    out.evidence.resize(ks.size());
    parallel_for(ks.size(), threads, [&](std::size_t i) { out.evidence[i] = count_intersection(family, ks[i], window); });

    bool all0 = true, all2 = true, parity = true;
    for (auto& ev : out.evidence) {
        if (out.expected) ev.expected = expected_count(*out.expected, ev.k);
        if (ev.components < 0) {
            ++out.inconclusive;
            continue;
        }
        if (ev.expected >= 0 && ev.components != ev.expected) ++out.misclassified;
        all0 = all0 && ev.components == 0;
        all2 = all2 && ev.components == 2;
        parity = parity && ev.components == (ev.k % 2 == 0 ? 2 : 0);
    }
    if (out.inconclusive > 0)
        out.tag = HorseshoeTag::Inconclusive;
    else if (all0)
        out.tag = (c > 0.0 && alpha > 0.0) ? HorseshoeTag::AlphaPositiveTrivial : HorseshoeTag::Empty;
    else if (all2)
        out.tag = (c > 0.0 && alpha < 0.0) ? HorseshoeTag::AlphaNegativeHorseshoes : HorseshoeTag::Regular;
    else if (parity)
        out.tag = HorseshoeTag::ParityAlternating;
    else
        out.tag = HorseshoeTag::Unexpected;
    return out;
}

}  // namespace hnm

#include "hnm/atlas.hpp"

#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "hnm/parallel.hpp"

namespace hnm {

namespace {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    return den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
}

// Continues the 2-orbit through p1 = (-sqrt M, sqrt M) across mu values.
struct TwoOrbitTracker {
    const ScaledReturnMap& srm;
    const FamilyHandle& family;
    std::optional<PlanarPoint> seed;

    OrbitRecord at(double mu) {
        const double M = chain_parameter(srm, family, mu);
        const double s = std::sqrt(std::max(M, 1e-4));
        OrbitRecord r;
        if (seed) {
            try {
                r = find_two_periodic(srm, mu, *seed);
            } catch (const Error&) {
                r = find_two_periodic(srm, mu, {-s, s});
            }
        } else {
            r = find_two_periodic(srm, mu, {-s, s});
        }
        seed = r.scaled[0].x < r.scaled[1].x ? r.scaled[0] : r.scaled[1];
        return r;
    }
};

struct MarkTarget {
    const char* flag;
    double cos_phi;
};

constexpr MarkTarget kMarks[] = {{"resonance-1:4", 0.0}, {"resonance-1:3", -0.5}, {"twistless", -0.25}};

CascadeRecord cascade_one(const FamilyHandle& f, int k, int phi_points) {
    CascadeRecord rec;
    rec.k = k;
    try {
        rec.plus = locate_bifurcation(f, k, BifurcationKind::Plus);
        rec.minus = locate_bifurcation(f, k, BifurcationKind::Minus);
        rec.lo = std::min(rec.plus.mu, rec.minus.mu);
        rec.hi = std::max(rec.plus.mu, rec.minus.mu);
        const double lk = std::pow(f.lambda(), k);
        const double l2 = lk * lk;
        rec.width = rec.hi - rec.lo;
        rec.width_scaled = rec.width / (l2 / std::abs(f.taylor.d));
        rec.plus_dev = std::abs(rec.plus.mu - rec.plus.predicted) / l2;
        rec.minus_dev = std::abs(rec.minus.mu - rec.minus.predicted) / l2;
        rec.C = std::max(rec.plus_dev, rec.minus_dev) / (k * std::abs(lk));

        const double mid = 0.5 * (rec.plus.mu + rec.minus.mu);
        const ScaledReturnMap srm(f, k, mid);
        TwoOrbitTracker tr{srm, f, std::nullopt};
        for (int i = 0; i < phi_points; ++i) {
            const double t = (i + 1.0) / (phi_points + 1.0);
            const double mu = rec.plus.mu + t * (rec.minus.mu - rec.plus.mu);
            const OrbitRecord o = tr.at(mu);
            rec.phi.push_back({mu, o.trace, std::acos(std::clamp(o.trace / 2.0, -1.0, 1.0))});
        }
        bool inc = true, dec = true;
        for (std::size_t i = 1; i < rec.phi.size(); ++i) {
            inc = inc && rec.phi[i].phi > rec.phi[i - 1].phi;
            dec = dec && rec.phi[i].phi < rec.phi[i - 1].phi;
        }
        rec.phi_monotone = inc || dec;

        for (const auto& target : kMarks) {
            ResonanceMark mark{target.flag, target.cos_phi, 0.0, false};
            const double tstar = 2.0 * target.cos_phi;
            for (std::size_t i = 1; i < rec.phi.size() && !mark.found; ++i) {
                const double a = rec.phi[i - 1].trace - tstar, b = rec.phi[i].trace - tstar;
                if (a * b > 0.0) continue;
                TwoOrbitTracker local{srm, f, std::nullopt};
                local.at(rec.phi[i - 1].mu);
                auto g = [&](double mu) { return local.at(mu).trace - tstar; };
                std::uintmax_t iters = 100;
                const double scale = std::abs(rec.phi[i].mu - rec.phi[i - 1].mu);
                auto tol = [scale](double l, double r) { return std::abs(r - l) <= 1e-12 * scale; };
                double m0 = rec.phi[i - 1].mu, m1 = rec.phi[i].mu, g0 = a, g1 = b;
                if (m0 > m1) std::swap(m0, m1), std::swap(g0, g1);  // toms748 wants an ordered bracket
                const auto [l, r] = boost::math::tools::toms748_solve(g, m0, m1, g0, g1, tol, iters);
                mark.mu = 0.5 * (l + r);
                mark.found = true;
            }
            rec.marks.push_back(mark);
        }
        rec.ok = true;
    } catch (const Error& e) {
        rec.error = std::string(error_code_name(e.code())) + ": " + e.what();
    }
    return rec;
}

}  // namespace

CascadeResult run_cascade(const FamilyHandle& family, const std::vector<int>& ks, int phi_points, int threads) {
    CascadeResult out;
    out.records.resize(ks.size());
    parallel_for(ks.size(), threads, [&](std::size_t i) { out.records[i] = cascade_one(family, ks[i], phi_points); });

    out.disjoint = true;
    out.contains_zero_all = true;
    std::vector<double> kk, cc;
    for (std::size_t i = 0; i < out.records.size(); ++i) {
        const auto& a = out.records[i];
        if (!a.ok) {
            out.disjoint = out.contains_zero_all = false;
            continue;
        }
        out.contains_zero_all = out.contains_zero_all && a.lo <= 0.0 && 0.0 <= a.hi;
        kk.push_back(a.k);
        cc.push_back(a.C);
        for (std::size_t j = i + 1; j < out.records.size(); ++j) {
            const auto& b = out.records[j];
            if (b.ok && a.lo <= b.hi && b.lo <= a.hi) out.disjoint = false;
        }
        if (i > 0) {
            const auto& p = out.records[i - 1];
            out.width_ratios.push_back(p.ok && p.width > 0.0 ? a.width / p.width : NAN);
        }
    }
    out.C_non_increasing = kk.size() >= 2 && ls_slope(kk, cc) <= 0.0;
    return out;
}

StripMap2D run_strip_atlas(const FamilyHandle& tmpl, const std::vector<int>& ks, double eps, int alpha_points,
                           int threads) {
    if (alpha_points < 2 || !(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "strip atlas needs eps > 0 and >= 2 alpha points");
    StripMap2D out;
    const int n = alpha_points;
    for (int i = 0; i < n; ++i) out.alphas.push_back(eps * (2.0 * i - (n - 1)) / (n - 1));

    std::vector<FamilyHandle> fams(n);
    parallel_for(n, threads, [&](std::size_t i) { fams[i] = tune_to(tmpl, out.alphas[i], tmpl.s0); });

    out.curves.resize(ks.size());
    parallel_for(ks.size(), threads, [&](std::size_t ik) {
        StripCurve& cur = out.curves[ik];
        const int k = ks[ik];
        cur.k = k;
        cur.slope_expected = -std::pow(tmpl.lambda(), k) * tmpl.y_minus();
        std::vector<double> xs, ys;
        for (int i = 0; i < n; ++i) {
            CurvePoint p;
            p.alpha = out.alphas[i];
            try {
                p.mu_plus = locate_bifurcation(fams[i], k, BifurcationKind::Plus).mu;
                p.mu_minus = locate_bifurcation(fams[i], k, BifurcationKind::Minus).mu;
                p.ok = true;
                xs.push_back(p.alpha);
                ys.push_back(p.mu_plus);
            } catch (const Error&) {
                ++cur.failures;
            }
            cur.points.push_back(p);
        }
        cur.slope_fit = ls_slope(xs, ys);
        for (int i = 1; i < n; ++i) {
            const auto &a = cur.points[i - 1], &b = cur.points[i];
            if (a.ok && b.ok && (a.mu_plus * b.mu_plus <= 0.0 || a.mu_minus * b.mu_minus <= 0.0)) cur.crosses_axis = true;
        }
    });

    const double lam = std::abs(tmpl.lambda());
    int kmax = 0;
    for (int k : ks) kmax = std::max(kmax, k);
    out.disjoint_threshold = 10.0 * std::pow(lam, 8);
    out.band_halfwidth = std::pow(lam, kmax) * std::min(std::abs(tmpl.s0), std::abs(1.0 + tmpl.s0)) /
                         (std::abs(tmpl.taylor.d) * tmpl.y_minus());

    const std::size_t m = ks.size();
    out.intersections.assign(m, std::vector<int>(m, 0));
    out.disjoint_outside = true;
    bool any_band = false, band_ok = true;
    for (int i = 0; i < n; ++i) {
        const double a = out.alphas[i];
        bool all_zero = true;
        for (std::size_t p = 0; p < m; ++p) {
            const auto& P = out.curves[p].points[i];
            if (!P.ok) {
                all_zero = false;
                continue;
            }
            const double plo = std::min(P.mu_plus, P.mu_minus), phi = std::max(P.mu_plus, P.mu_minus);
            all_zero = all_zero && plo <= 0.0 && 0.0 <= phi;
            for (std::size_t q = p + 1; q < m; ++q) {
                const auto& Q = out.curves[q].points[i];
                if (!Q.ok) continue;
                const double qlo = std::min(Q.mu_plus, Q.mu_minus), qhi = std::max(Q.mu_plus, Q.mu_minus);
                const bool meet = plo <= qhi && qlo <= phi;
                if (meet) {
                    ++out.intersections[p][q];
                    ++out.intersections[q][p];
                    if (std::abs(a) >= out.disjoint_threshold) out.disjoint_outside = false;
                } else if (std::abs(a) <= out.band_halfwidth) {
                    band_ok = false;
                }
            }
        }
        if (std::abs(a) <= out.band_halfwidth) {
            any_band = true;
            band_ok = band_ok && all_zero;
        }
    }
    out.intersect_in_band = any_band && band_ok;
    return out;
}

std::vector<std::string> resonance_flags(double s0) {
    std::vector<std::string> flags;
    constexpr double tol = 1e-6;
    if (std::abs(s0 + 0.5) <= tol) flags.emplace_back("resonance-1:4");
    if (std::abs(s0 + 0.75) <= tol) flags.emplace_back("resonance-1:3");
    if (std::abs(s0 + 0.625) <= tol) flags.emplace_back("twistless");
    if (std::abs(s0 + 1.0 / std::sqrt(2.0)) <= tol) flags.emplace_back("listed-exception-minus-1-over-sqrt2");
    return flags;
}

ResonanceCertificate certify_global_resonance(const FamilyHandle& family, const std::vector<int>& ks, int threads) {
    if (!(family.s0 > -1.0 && family.s0 < 0.0))
        throw Error(ErrorCode::NotInResonanceWindow, "not in resonance window: need -1 < s0 < 0");
    if (std::abs(family.alpha) > 1e-8)
        throw Error(ErrorCode::InvalidArgument, "global resonance needs a family tuned to alpha = 0");
    ResonanceCertificate cert;
    cert.s0 = family.s0;
    cert.ks = ks;
    cert.flags = resonance_flags(family.s0);
    cert.rows.resize(ks.size());
    parallel_for(ks.size(), threads, [&](std::size_t i) {
        ResonanceRow& row = cert.rows[i];
        row.k = ks[i];
        try {
            const ScaledReturnMap srm(family, row.k, 0.0);
            const double M = srm.chain().M;
            const double s = std::sqrt(std::max(M, 1e-4));
            row.orbit = find_two_periodic(srm, 0.0, {-s, s});
            row.trace = row.orbit.trace;
            row.cos_phi = row.trace / 2.0;
            row.elliptic = std::abs(row.trace) < 2.0;
            row.margin = 2.0 - std::abs(row.trace);
            row.error = std::abs(row.cos_phi - (1.0 + 2.0 * family.s0));
            row.C = row.error / (row.k * std::pow(std::abs(family.lambda()), row.k));
            if (!row.elliptic) row.message = "2-orbit at mu = 0 is not elliptic";
        } catch (const Error& e) {
            row.message = std::string(error_code_name(e.code())) + ": " + e.what();
        }
    });
    bool all = true;
    for (const auto& r : cert.rows) all = all && r.elliptic;
    cert.verdict = !all ? "failed" : (cert.flags.empty() ? "certified" : "withheld");
    return cert;
}

}  // namespace hnm

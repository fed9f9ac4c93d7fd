#include "hnm/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "hnm/atlas.hpp"
#include "hnm/svg.hpp"

namespace hnm {

using nlohmann::json;

namespace {

// %.17g keeps CSV round-trippable and byte-stable.
std::string num(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : cols_(header.size()) { row_strings(header); }
    template <class... Ts>
    void row(const Ts&... vs) {
        std::vector<std::string> cells{cell(vs)...};
        row_strings(cells);
    }
    std::string str() const { return out_.str(); }

private:
    static std::string cell(double v) { return num(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(bool v) { return v ? "true" : "false"; }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    void row_strings(const std::vector<std::string>& cells) {
        if (cells.size() != cols_) throw Error(ErrorCode::InvalidArgument, "csv row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }
    std::size_t cols_;
    std::ostringstream out_;
};

json j_point(PlanarPoint p) { return json::array({p.x, p.y}); }

json j_complex(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

json j_stability(const StabilityClass& s) {
    json j{{"tag", stability_name(s.tag)}};
    j["phase"] = s.phase ? json(*s.phase) : json(nullptr);
    return j;
}

json j_orbit(const OrbitRecord& o) {
    json pts = json::array(), sc = json::array();
    for (auto p : o.points) pts.push_back(j_point(p));
    for (auto p : o.scaled) sc.push_back(j_point(p));
    return {{"points", pts},     {"scaled", sc},          {"period", o.period_label},
            {"nu1", j_complex(o.nu1)}, {"nu2", j_complex(o.nu2)}, {"trace", o.trace},
            {"det", o.det},      {"stability", j_stability(o.stability)},
            {"residual", o.residual}, {"mu", o.mu}};
}

json j_taylor(const TaylorData& t) {
    return {{"a", t.a},     {"b", t.b},     {"c", t.c},     {"d", t.d},     {"e20", t.e20},
            {"e11", t.e11}, {"e02", t.e02}, {"f20", t.f20}, {"f11", t.f11}, {"f30", t.f30},
            {"f21", t.f21}, {"f12", t.f12}, {"f03", t.f03}};
}

json j_family(const FamilyHandle& h) {
    const auto& r = h.recipe;
    return {{"recipe", recipe_name(r.kind)},
            {"lambda", h.local.lambda},
            {"beta", h.local.beta},
            {"x_plus", r.x_plus},
            {"y_minus", r.y_minus},
            {"n0", r.n0},
            {"c", r.c},
            {"p", r.p},
            {"q", r.q},
            {"g1", r.g1},
            {"g2", r.g2},
            {"h2", r.h2},
            {"mu", h.global.mu},
            {"alpha", h.alpha},
            {"s0", h.s0},
            {"taylor", j_taylor(h.taylor)}};
}

json j_bif(const BifurcationPoint& b) {
    return {{"kind", bifurcation_name(b.kind)}, {"k", b.k},
            {"mu", b.mu},                       {"predicted", b.predicted},
            {"condition", b.condition},         {"orbit", j_orbit(b.orbit)}};
}

std::vector<int> k_range(const RunConfig& cfg, int lo, int hi) {
    const int a = cfg.integer(cfg.experiment, "k_min", lo);
    const int b = cfg.integer(cfg.experiment, "k_max", hi);
    if (a < 1 || b < a || b > 60) throw Error(ErrorCode::Config, "k range must satisfy 1 <= k_min <= k_max <= 60");
    std::vector<int> ks(b - a + 1);
    std::iota(ks.begin(), ks.end(), a);
    return ks;
}

void default_family(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (!cfg.has(cfg.family, key)) cfg.family[key] = value;
}

struct Product {
    json payload;
    json warnings = json::array();
    std::string csv, svg;
};

// ---- henon ---------------------------------------------------------------

Product run_henon(const RunConfig& cfg) {
    Product out;
    const auto& e = cfg.experiment;
    const double m_min = cfg.number(e, "m_min", 0.05), m_max = cfg.number(e, "m_max", 0.95);
    const int n = cfg.integer(e, "m_points", 91);
    if (n < 2 || !(m_max > m_min)) throw Error(ErrorCode::Config, "B1 scan needs m_points >= 2 and m_max > m_min");

    json bifs = json::array();
    for (const auto& b : bifurcation_values()) bifs.push_back({{"name", b.name}, {"M", b.M}, {"condition", b.condition}});

    Csv csv({"M", "b1", "status"});
    json scan = json::array();
    std::vector<PlanarPoint> curve;
    for (int i = 0; i < n; ++i) {
        const double M = m_min + (m_max - m_min) * i / (n - 1);
        try {
            const double b1 = birkhoff_b1(M);
            scan.push_back({{"M", M}, {"b1", b1}});
            csv.row(M, b1, "ok");
            curve.push_back({M, b1});
        } catch (const Error& err) {
            scan.push_back({{"M", M}, {"b1", nullptr}, {"skipped", error_code_name(err.code())}});
            csv.row(M, std::nan(""), error_code_name(err.code()));
        }
    }

    json certs = json::array();
    std::vector<double> cert_ms{-1.0, 0.5, 2.0, 8.5, 9.5, 10.0, 12.0};
    if (cfg.has(e, "M")) cert_ms.push_back(cfg.number(e, "M", 0.0));
    for (double M : cert_ms) certs.push_back({{"M", M}, {"certified", horseshoe_certificate(M)}});

    out.payload = {{"bifurcations", bifs}, {"b1_scan", scan}, {"horseshoe_certificates", certs}};

    if (cfg.has(e, "M")) {
        const double M = cfg.number(e, "M", 0.0);
        json rep{{"M", M}};
        json fps = json::array();
        for (const auto& f : fixed_points(M))
            fps.push_back({{"point", j_point(f.point)}, {"nu1", f.nu1}, {"nu2", f.nu2}});
        rep["fixed_points"] = fps;
        try {
            const auto o = two_periodic_orbit(M);
            rep["two_orbit"] = {{"p1", j_point(o.p1)}, {"p2", j_point(o.p2)}, {"trace", o.trace},
                                {"stability", j_stability(o.stability)}};
        } catch (const Error& err) {
            rep["two_orbit"] = nullptr;
            out.warnings.push_back(std::string("two_orbit: ") + err.what());
        }
        try {
            rep["b1"] = birkhoff_b1(M);
        } catch (const Error& err) {
            rep["b1"] = nullptr;
            out.warnings.push_back(std::string("b1: ") + err.what());
        }
        rep["horseshoe_certificate"] = horseshoe_certificate(M);
        out.payload["report"] = rep;
    }

    SvgPlot plot("First Birkhoff coefficient of the 2-orbit", "M", "B1");
    plot.polyline(curve, series_color(0));
    plot.segment({m_min, 0.0}, {m_max, 0.0}, "#999999", 1.0);
    out.svg = plot.render();
    out.csv = csv.str();
    return out;
}

// ---- family-check ---------------------------------------------------------

Product run_family_check(const RunConfig& cfg) {
    Product out;
    const FamilyHandle h = family_from_config(cfg);
    const int samples = cfg.integer(cfg.experiment, "samples", 100);
    if (samples < 1) throw Error(ErrorCode::Config, "samples must be positive");
    const auto& t = h.taylor;
    const double w = default_window(h);

    const double bc = t.b * t.c;
    const bool bc_ok = std::abs(bc - 1.0) <= 1e-10;
    const double ident = t.det_identity();
    const bool ident_ok = std::abs(ident) <= 1e-8;
    if (!bc_ok) out.warnings.push_back("bc differs from 1 by more than 1e-10");
    if (!ident_ok) out.warnings.push_back("determinant identity residual above 1e-8");

    // Det audit of T1 on a grid of the window around M- = (0, y-).
    const int side = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(samples)))));
    Csv csv({"x", "y", "det", "deviation"});
    std::vector<PlanarPoint> devs;
    double worst = 0.0;
    int count = 0;
    for (int i = 0; i < side && count < samples; ++i)
        for (int j = 0; j < side && count < samples; ++j, ++count) {
            const double sx = side == 1 ? 0.0 : -w + 2.0 * w * i / (side - 1);
            const double sy = side == 1 ? 0.0 : -w + 2.0 * w * j / (side - 1);
            const PlanarPoint p{sx, h.y_minus() + sy};
            const double det = h.global.jacobian(p).det();
            worst = std::max(worst, std::abs(det + 1.0));
            csv.row(p.x, p.y, det, det + 1.0);
            devs.push_back({static_cast<double>(count), det + 1.0});
        }
    const bool det_ok = worst <= 1e-10;
    if (!det_ok) out.warnings.push_back("det DT1 deviates from -1 by more than 1e-10");

    out.payload = {{"family", j_family(h)},
                   {"bc", bc},
                   {"bc_ok", bc_ok},
                   {"det_identity", ident},
                   {"det_identity_ok", ident_ok},
                   {"printed_identity", t.printed_identity()},
                   {"det_audit", {{"samples", count}, {"window", w}, {"max_deviation", worst}, {"ok", det_ok}}},
                   {"alpha_direct", alpha_invariant(h)},
                   {"s0_direct", s0_invariant(h)}};
    out.csv = csv.str();
    SvgPlot plot("det DT1 + 1 on the window around M-", "sample", "det + 1");
    plot.points(devs, series_color(0), 2.0);
    out.svg = plot.render();
    return out;
}

// ---- cross-form -----------------------------------------------------------

Product run_cross_form(const RunConfig& cfg) {
    Product out;
    const FamilyHandle h = family_from_config(cfg);
    const auto ks = k_range(cfg, 6, 16);
    const int samples = cfg.integer(cfg.experiment, "samples", 9);
    const auto rep = validate_cross_form(h.local, ks, samples);
    json rows = json::array();
    Csv csv({"k", "sup_residual", "normalized", "coefficient"});
    std::vector<PlanarPoint> norm, coef;
    for (const auto& r : rep.rows) {
        rows.push_back({{"k", r.k}, {"sup_residual", r.sup_residual}, {"normalized", r.normalized},
                        {"coefficient", r.coefficient}});
        csv.row(r.k, r.sup_residual, r.normalized, r.coefficient);
        norm.push_back({double(r.k), r.normalized});
        coef.push_back({double(r.k), r.coefficient});
    }
    if (!rep.bounded) out.warnings.push_back("normalized cross-form residual grows with k");
    out.payload = {{"lambda", h.local.lambda}, {"beta1", rep.beta1},          {"beta1_fit", rep.beta1_fit},
                   {"rows", rows},             {"normalized_max", rep.normalized_max}, {"bounded", rep.bounded}};
    out.csv = csv.str();
    SvgPlot plot("Cross-form residual / lambda^(2k) and fitted coefficient", "k", "value");
    plot.polyline(norm, series_color(0));
    plot.points(norm, series_color(0));
    plot.polyline(coef, series_color(1));
    plot.points(coef, series_color(1));
    plot.legend("normalized residual", series_color(0));
    plot.legend("coefficient of lambda^k x0 yk", series_color(1));
    out.svg = plot.render();
    return out;
}

// ---- classify -------------------------------------------------------------

// |d| large enough that both horseshoe legs (|eta| ~ sqrt(2 lambda^k / d)) fit a
// 0.05 window already at k = 8.
constexpr double kTableD = 4.0;

struct TableCase {
    std::string name;
    double lambda, c, q0;
};

Product run_classify(const RunConfig& cfg, int threads) {
    Product out;
    const FamilyHandle base = family_from_config(cfg);
    const auto ks = k_range(cfg, 8, 14);
    const double window = cfg.number(cfg.experiment, "window", 0.05);
    const double da = cfg.number(cfg.experiment, "alpha_offset", 0.2);
    if (!(window > 0.0) || !(da > 0.0)) throw Error(ErrorCode::Config, "window and alpha_offset must be positive");
    const double lam = std::abs(base.lambda());
    const double xp = base.x_plus(), ym = base.y_minus();

    const std::vector<TableCase> table{
        {"lambda>0,c<0,d<0", lam, -ym / xp, -kTableD},
        {"lambda>0,c<0,d>0", lam, -ym / xp, kTableD},
        {"lambda<0,c<0,d>0", -lam, -ym / xp, kTableD},
        {"c>0,alpha<0", lam, (1.0 - da) * ym / xp, kTableD},
        {"c>0,alpha>0", lam, (1.0 + da) * ym / xp, kTableD},
    };
    std::vector<HorseshoeClass> res(table.size());
    std::vector<FamilyHandle> fams;
    for (const auto& tc : table) {
        LocalMapParams local = base.local;
        local.lambda = tc.lambda;
        RecipeSpec r;
        r.kind = RecipeKind::HenonLike;
        r.x_plus = xp;
        r.y_minus = ym;
        r.n0 = base.recipe.n0;
        r.c = tc.c;
        r.p = {};
        r.q = {tc.q0};
        fams.push_back(build_family(local, r, 0.0));
    }
    for (std::size_t i = 0; i < table.size(); ++i) res[i] = classify_horseshoe(fams[i], ks, window, threads);

    json cases = json::array();
    Csv csv({"case", "k", "components", "expected", "cone_ok", "resolution"});
    SvgPlot plot("Components of strip meeting its preimage, mu = 0", "k", "components");
    int total_mis = 0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& hc = res[i];
        json ev = json::array();
        std::vector<PlanarPoint> pts;
        for (const auto& e : hc.evidence) {
            ev.push_back({{"k", e.k}, {"components", e.components}, {"expected", e.expected},
                          {"cone_ok", e.cone_ok}, {"resolution", e.resolution}});
            csv.row(table[i].name, e.k, e.components, e.expected, e.cone_ok, e.resolution);
            // small vertical offset per case so overlapping series stay visible
            pts.push_back({double(e.k), e.components + 0.04 * double(i)});
        }
        const auto& f = fams[i];
        cases.push_back({{"case", table[i].name},
                         {"lambda", f.lambda()},
                         {"c", f.taylor.c},
                         {"d", f.taylor.d},
                         {"alpha", f.alpha},
                         {"expected", hc.expected ? json(horseshoe_name(*hc.expected)) : json(nullptr)},
                         {"tag", horseshoe_name(hc.tag)},
                         {"misclassified", hc.misclassified},
                         {"inconclusive", hc.inconclusive},
                         {"evidence", ev}});
        total_mis += hc.misclassified;
        if (hc.misclassified) out.warnings.push_back(table[i].name + ": misclassified k values present");
        if (hc.inconclusive) out.warnings.push_back(table[i].name + ": inconclusive k values present");
        plot.polyline(pts, series_color(i));
        plot.points(pts, series_color(i));
        plot.legend(table[i].name, series_color(i));
    }
    out.payload = {{"window", window}, {"ks", ks}, {"cases", cases}, {"misclassified", total_mis}};
    out.csv = csv.str();
    out.svg = plot.render();
    return out;
}

// ---- cascade --------------------------------------------------------------

Product run_cascade_cmd(const RunConfig& cfg, int threads) {
    Product out;
    const FamilyHandle h = family_from_config(cfg);
    const auto ks = k_range(cfg, 8, 14);
    const int phi_points = cfg.integer(cfg.experiment, "phi_points", 20);
    const auto res = run_cascade(h, ks, phi_points, threads);

    json recs = json::array();
    Csv csv({"k", "ok", "mu_plus", "mu_minus", "predicted_plus", "predicted_minus", "width", "width_scaled",
             "plus_dev", "minus_dev", "C", "phi_monotone"});
    SvgPlot plot("Intervals e_k^2 scaled by lambda^(2k)/|d|", "k", "mu lambda^(-2k)");
    for (std::size_t i = 0; i < res.records.size(); ++i) {
        const auto& r = res.records[i];
        json marks = json::array();
        for (const auto& m : r.marks)
            marks.push_back({{"flag", m.flag}, {"cos_phi", m.cos_phi}, {"mu", m.mu}, {"found", m.found}});
        json phi = json::array();
        for (const auto& s : r.phi) phi.push_back({{"mu", s.mu}, {"trace", s.trace}, {"phi", s.phi}});
        json rec{{"k", r.k}, {"ok", r.ok}};
        if (!r.ok) {
            rec["error"] = r.error;
            out.warnings.push_back("k=" + std::to_string(r.k) + ": " + r.error);
        } else {
            rec.update({{"plus", j_bif(r.plus)},
                        {"minus", j_bif(r.minus)},
                        {"interval", {r.lo, r.hi}},
                        {"width", r.width},
                        {"width_scaled", r.width_scaled},
                        {"plus_dev", r.plus_dev},
                        {"minus_dev", r.minus_dev},
                        {"C", r.C},
                        {"phi", phi},
                        {"phi_monotone", r.phi_monotone},
                        {"marks", marks}});
            if (!r.phi_monotone) out.warnings.push_back("k=" + std::to_string(r.k) + ": phase not monotone");
            const double s = std::pow(std::abs(h.lambda()), 2 * r.k);
            plot.segment({double(r.k), r.lo / s}, {double(r.k), r.hi / s}, series_color(0), 4.0);
        }
        recs.push_back(rec);
        csv.row(r.k, r.ok, r.plus.mu, r.minus.mu, r.plus.predicted, r.minus.predicted, r.width, r.width_scaled,
                r.plus_dev, r.minus_dev, r.C, r.phi_monotone);
    }
    if (!res.disjoint) out.warnings.push_back("cascade intervals overlap");
    if (!res.C_non_increasing) out.warnings.push_back("deviation constant C increases with k");
    out.payload = {{"family", j_family(h)},
                   {"records", recs},
                   {"disjoint", res.disjoint},
                   {"contains_zero_all", res.contains_zero_all},
                   {"width_ratios", res.width_ratios},
                   {"lambda_squared", h.lambda() * h.lambda()},
                   {"C_non_increasing", res.C_non_increasing}};
    out.csv = csv.str();
    out.svg = plot.render();
    return out;
}

// ---- atlas2d --------------------------------------------------------------

Product run_atlas2d(const RunConfig& cfg, int threads) {
    Product out;
    const FamilyHandle h = family_from_config(cfg);
    const auto ks = k_range(cfg, 8, 12);
    const double eps = cfg.number(cfg.experiment, "alpha_eps", 0.05);
    const int pts = cfg.integer(cfg.experiment, "alpha_points", 41);
    const auto map = run_strip_atlas(h, ks, eps, pts, threads);

    json curves = json::array();
    Csv csv({"k", "alpha", "mu_plus", "mu_minus", "ok"});
    SvgPlot plot("Strips L_k^2+- in the (alpha, mu) plane", "alpha", "mu");
    for (std::size_t i = 0; i < map.curves.size(); ++i) {
        const auto& c = map.curves[i];
        json cp = json::array();
        std::vector<PlanarPoint> plus, minus;
        for (const auto& p : c.points) {
            cp.push_back({{"alpha", p.alpha}, {"mu_plus", p.mu_plus}, {"mu_minus", p.mu_minus}, {"ok", p.ok}});
            csv.row(c.k, p.alpha, p.mu_plus, p.mu_minus, p.ok);
            if (p.ok) {
                plus.push_back({p.alpha, p.mu_plus});
                minus.push_back({p.alpha, p.mu_minus});
            }
        }
        curves.push_back({{"k", c.k},
                          {"points", cp},
                          {"slope_fit", c.slope_fit},
                          {"slope_expected", c.slope_expected},
                          {"crosses_axis", c.crosses_axis},
                          {"failures", c.failures}});
        if (c.failures) out.warnings.push_back("k=" + std::to_string(c.k) + ": " + std::to_string(c.failures) + " alpha samples failed");
        plot.polyline(plus, series_color(i));
        plot.polyline(minus, series_color(i), 1.0);
        plot.legend("k=" + std::to_string(c.k), series_color(i));
    }
    if (!map.disjoint_outside) out.warnings.push_back("strips overlap outside the resonance band");
    if (!map.intersect_in_band) out.warnings.push_back("strips do not all meet mu = 0 inside the band");
    out.payload = {{"alphas", map.alphas},
                   {"curves", curves},
                   {"disjoint_threshold", map.disjoint_threshold},
                   {"band_halfwidth", map.band_halfwidth},
                   {"disjoint_outside", map.disjoint_outside},
                   {"intersect_in_band", map.intersect_in_band},
                   {"intersections", map.intersections}};
    out.csv = csv.str();
    out.svg = plot.render();
    return out;
}

// ---- resonance ------------------------------------------------------------

Product run_resonance(const RunConfig& cfg, int threads) {
    Product out;
    const FamilyHandle h = family_from_config(cfg);
    const auto ks = k_range(cfg, 8, 14);
    const auto cert = certify_global_resonance(h, ks, threads);
    json rows = json::array();
    Csv csv({"k", "elliptic", "trace", "cos_phi", "error", "C", "margin"});
    std::vector<PlanarPoint> cosphi;
    for (const auto& r : cert.rows) {
        json row{{"k", r.k}, {"elliptic", r.elliptic}, {"trace", r.trace}, {"cos_phi", r.cos_phi},
                 {"error", r.error}, {"C", r.C}, {"margin", r.margin}};
        if (!r.message.empty()) {
            row["message"] = r.message;
            out.warnings.push_back("k=" + std::to_string(r.k) + ": " + r.message);
        }
        if (r.elliptic) row["orbit"] = j_orbit(r.orbit);
        rows.push_back(row);
        csv.row(r.k, r.elliptic, r.trace, r.cos_phi, r.error, r.C, r.margin);
        if (r.elliptic) cosphi.push_back({double(r.k), r.cos_phi});
    }
    for (const auto& f : cert.flags) out.warnings.push_back("degenerate s0: " + f);
    out.payload = {{"family", j_family(h)},
                   {"s0", cert.s0},
                   {"limit_cos_phi", 1.0 + 2.0 * cert.s0},
                   {"ks", cert.ks},
                   {"rows", rows},
                   {"flags", cert.flags},
                   {"verdict", cert.verdict}};
    out.csv = csv.str();
    SvgPlot plot("cos phi of the elliptic 2-orbit at mu = 0", "k", "cos phi");
    plot.polyline(cosphi, series_color(0));
    plot.points(cosphi, series_color(0));
    if (!ks.empty())
        plot.segment({double(ks.front()), 1.0 + 2.0 * cert.s0}, {double(ks.back()), 1.0 + 2.0 * cert.s0}, "#999999", 1.0);
    out.svg = plot.render();
    return out;
}

// ---- rescale-verify -------------------------------------------------------

Product run_rescale_verify(const RunConfig& cfg, int threads) {
    Product out;
    const FamilyHandle h = family_from_config(cfg);
    const auto ks = k_range(cfg, 8, 14);
    const double M = cfg.number(cfg.experiment, "M", 0.4);
    const auto rep = convergence_report(h, ks, M, threads);
    json rows = json::array();
    Csv csv({"k", "M", "M_chain", "mu", "sup_residual", "normalized", "cubic_ratio"});
    std::vector<PlanarPoint> norm, ratio;
    for (const auto& r : rep.rows) {
        rows.push_back({{"k", r.k}, {"M", r.M}, {"M_chain", r.M_chain}, {"mu", r.mu},
                        {"sup_residual", r.sup_residual}, {"normalized", r.normalized},
                        {"cubic_ratio", r.cubic_ratio}});
        csv.row(r.k, r.M, r.M_chain, r.mu, r.sup_residual, r.normalized, r.cubic_ratio);
        norm.push_back({double(r.k), r.normalized});
        ratio.push_back({double(r.k), r.cubic_ratio});
    }
    if (!rep.bounded) out.warnings.push_back("normalized rescaling residual grows with k");
    if (h.taylor.f03 == 0.0) out.warnings.push_back("f03 = 0: cubic coefficient check is vacuous");
    out.payload = {{"family", j_family(h)}, {"M", M}, {"rows", rows},
                   {"normalized_max", rep.normalized_max}, {"bounded", rep.bounded}};
    out.csv = csv.str();
    SvgPlot plot("Rescaled return map vs limit map", "k", "value");
    plot.polyline(norm, series_color(0));
    plot.points(norm, series_color(0));
    plot.polyline(ratio, series_color(1));
    plot.points(ratio, series_color(1));
    plot.legend("residual / (k lambda^(2k))", series_color(0));
    plot.legend("cubic coefficient ratio", series_color(1));
    out.svg = plot.render();
    return out;
}

// Per-subcommand family defaults, applied before validation so they show up in the echo.
void apply_defaults(const std::string& sub, RunConfig& cfg) {
    if (sub == "cascade") {
        default_family(cfg, "alpha", "-0.1");
        default_family(cfg, "s0", "-0.4");
    } else if (sub == "atlas2d") {
        default_family(cfg, "s0", "-0.4");
    } else if (sub == "resonance") {
        default_family(cfg, "alpha", "0");
        default_family(cfg, "s0", "-0.4");
    } else if (sub == "rescale-verify") {
        default_family(cfg, "beta", "1");
        default_family(cfg, "p", "0.3");
        default_family(cfg, "q", "1 1");
    }
}

json envelope_head(const std::string& sub) {
    return {{"schema_version", kSchemaVersion}, {"tool", "hnm"}, {"version", HNM_VERSION}, {"subcommand", sub}};
}

json config_echo(const RunConfig& cfg) {
    return {{"family", cfg.family}, {"experiment", cfg.experiment}, {"output", cfg.output}};
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorCode::Config, "cannot write " + p.string());
    f << text;
}

std::vector<std::string> formats(const RunConfig& cfg) {
    if (!cfg.has(cfg.output, "formats")) return {"json", "csv", "svg"};
    std::string f = cfg.output.at("formats");
    std::replace(f.begin(), f.end(), ',', ' ');
    std::istringstream in(f);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

}  // namespace

RunResult run_subcommand(const std::string& sub, RunConfig cfg, int threads) {
    RunResult res;
    const auto t0 = std::chrono::steady_clock::now();
    json env = envelope_head(sub);
    try {
        experiment_keys(sub);  // unknown subcommand -> Config error
        apply_defaults(sub, cfg);
        cfg.validate(sub);
        if (threads < 1) throw Error(ErrorCode::Config, "threads must be >= 1");
        env["config"] = config_echo(cfg);
        Product p;
        if (sub == "henon") p = run_henon(cfg);
        else if (sub == "family-check") p = run_family_check(cfg);
        else if (sub == "cross-form") p = run_cross_form(cfg);
        else if (sub == "classify") p = run_classify(cfg, threads);
        else if (sub == "cascade") p = run_cascade_cmd(cfg, threads);
        else if (sub == "atlas2d") p = run_atlas2d(cfg, threads);
        else if (sub == "resonance") p = run_resonance(cfg, threads);
        else p = run_rescale_verify(cfg, threads);
        env["warnings"] = p.warnings;
        env["payload"] = p.payload;
        res.status = 0;
        res.envelope = env.dump(2) + "\n";
        res.csv = p.csv;
        res.svg = p.svg;
    } catch (const Error& e) {
        res.status = is_validation_error(e.code()) ? 1 : 2;
        json err{{"code", error_code_name(e.code())}, {"message", e.what()}};
        if (const auto* esc = dynamic_cast<const EscapeError*>(&e)) err["stage"] = esc->stage();
        env["config"] = config_echo(cfg);
        env["status"] = res.status;
        env["error"] = err;
        res.envelope = env.dump(2) + "\n";
    } catch (const std::exception& e) {
        res.status = 2;
        env["config"] = config_echo(cfg);
        env["status"] = 2;
        env["error"] = {{"code", "internal"}, {"message", e.what()}};
        res.envelope = env.dump(2) + "\n";
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

namespace {

RunResult write_outputs(const std::string& sub, const RunConfig& cfg, RunResult res, const std::string& out_dir,
                        int threads) {
    std::string dir = out_dir;
    if (dir.empty()) dir = cfg.has(cfg.output, "dir") ? cfg.output.at("dir") : "out";
    std::vector<std::string> fmts;
    try {
        fmts = formats(cfg);
    } catch (...) {
        fmts = {"json", "csv", "svg"};
    }
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        res.status = 1;
        json env = envelope_head(sub);
        env["status"] = 1;
        env["error"] = {{"code", "config"}, {"message", "cannot create output directory " + dir}};
        res.envelope = env.dump(2) + "\n";
        return res;
    }
    const fs::path base(dir);
    // Leftovers from an earlier run would contradict this one.
    for (const char* ext : {".json", ".csv", ".svg"}) fs::remove(base / (sub + ext), ec);
    fs::remove(base / "error.json", ec);
    if (res.status == 0) {
        for (const auto& f : fmts) {
            if (f == "json") write_file(base / (sub + ".json"), res.envelope);
            else if (f == "csv") write_file(base / (sub + ".csv"), res.csv);
            else if (f == "svg") write_file(base / (sub + ".svg"), res.svg);
        }
    } else {
        write_file(base / "error.json", res.envelope);
    }
    json timing{{"subcommand", sub}, {"wall_clock_seconds", res.seconds}, {"threads", threads}};
    write_file(base / "timing.json", timing.dump(2) + "\n");
    return res;
}

}  // namespace

RunResult run_to_directory(const std::string& sub, RunConfig cfg, const std::string& out_dir, int threads) {
    RunResult res = run_subcommand(sub, cfg, threads);
    return write_outputs(sub, cfg, std::move(res), out_dir, threads);
}

RunResult run_from_text(const std::string& sub, const std::string& ini_text, const std::vector<std::string>& overrides,
                        const std::string& out_dir, int threads) {
    RunConfig cfg;
    try {
        cfg = RunConfig::parse(ini_text);
        for (const auto& o : overrides) cfg.apply_override(o);
    } catch (const Error& e) {
        RunResult res;
        res.status = is_validation_error(e.code()) ? 1 : 2;
        json env = envelope_head(sub);
        env["status"] = res.status;
        env["error"] = {{"code", error_code_name(e.code())}, {"message", e.what()}};
        res.envelope = env.dump(2) + "\n";
        return write_outputs(sub, RunConfig{}, std::move(res), out_dir, threads);
    }
    return run_to_directory(sub, cfg, out_dir, threads);
}

}  // namespace hnm

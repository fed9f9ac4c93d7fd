#include "hnm/hnm.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "hnm/config.hpp"
#include "hnm/henon.hpp"
#include "hnm/orbit_solver.hpp"
#include "hnm/runner.hpp"

struct hnm_family {
    hnm::FamilyHandle h;
};

struct hnm_return_map {
    hnm::ReturnMap rm;
};

namespace {

thread_local std::string g_last_error;

hnm_status to_status(hnm::ErrorCode c) {
    using hnm::ErrorCode;
    switch (c) {
        case ErrorCode::InvalidArgument: return HNM_ERR_INVALID_ARGUMENT;
        case ErrorCode::Config: return HNM_ERR_CONFIG;
        case ErrorCode::Escape: return HNM_ERR_ESCAPE;
        case ErrorCode::NotTangency: return HNM_ERR_NOT_TANGENCY;
        case ErrorCode::OrientableGlobalMap: return HNM_ERR_ORIENTABLE;
        case ErrorCode::IllConditioned: return HNM_ERR_ILL_CONDITIONED;
        case ErrorCode::TargetUnreachable: return HNM_ERR_TARGET_UNREACHABLE;
        case ErrorCode::NoRealOrbit: return HNM_ERR_NO_REAL_ORBIT;
        case ErrorCode::Resonant: return HNM_ERR_RESONANT;
        case ErrorCode::CrossFormSolveFailed: return HNM_ERR_CROSS_FORM;
        case ErrorCode::StripOutsideWindow: return HNM_ERR_STRIP_OUTSIDE_WINDOW;
        case ErrorCode::NewtonDiverged: return HNM_ERR_NEWTON_DIVERGED;
        case ErrorCode::SingularJacobian: return HNM_ERR_SINGULAR_JACOBIAN;
        case ErrorCode::CollapsedToFixedPoint: return HNM_ERR_COLLAPSED;
        case ErrorCode::BracketFailed: return HNM_ERR_BRACKET_FAILED;
        case ErrorCode::NotElliptic: return HNM_ERR_NOT_ELLIPTIC;
        case ErrorCode::PrecisionFloor: return HNM_ERR_PRECISION_FLOOR;
        case ErrorCode::NotInResonanceWindow: return HNM_ERR_NOT_IN_RESONANCE_WINDOW;
    }
    return HNM_ERR_INTERNAL;
}

// Runs fn, mapping exceptions to status codes.
template <class Fn>
hnm_status guard(Fn&& fn) {
    try {
        g_last_error.clear();
        fn();
        return HNM_OK;
    } catch (const hnm::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return HNM_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown exception";
        return HNM_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p) throw hnm::Error(hnm::ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* hnm_version(void) { return HNM_VERSION; }

const char* hnm_last_error(void) { return g_last_error.c_str(); }

const char* hnm_status_name(hnm_status status) {
    switch (status) {
        case HNM_OK: return "ok";
        case HNM_ERR_INTERNAL: return "internal";
        default: break;
    }
    for (int c = 0; c <= static_cast<int>(hnm::ErrorCode::NotInResonanceWindow); ++c)
        if (to_status(static_cast<hnm::ErrorCode>(c)) == status) return hnm::error_code_name(static_cast<hnm::ErrorCode>(c));
    return "unknown";
}

void hnm_string_free(char* s) { std::free(s); }

hnm_status hnm_family_from_config(const char* ini_text, hnm_family** out) {
    return guard([&] {
        need(out, "out");
        *out = nullptr;
        hnm::RunConfig cfg = hnm::RunConfig::parse(ini_text ? ini_text : "");
        for (const auto& [k, v] : cfg.family)
            if (std::find(hnm::family_keys().begin(), hnm::family_keys().end(), k) == hnm::family_keys().end())
                throw hnm::Error(hnm::ErrorCode::Config, "unknown [family] key '" + k + "'");
        *out = new hnm_family{hnm::family_from_config(cfg)};
    });
}

void hnm_family_free(hnm_family* family) { delete family; }

hnm_status hnm_family_taylor(const hnm_family* family, hnm_taylor* out) {
    return guard([&] {
        need(family, "family");
        need(out, "out");
        const auto& t = family->h.taylor;
        *out = {t.a, t.b, t.c, t.d, t.e20, t.e11, t.e02, t.f20, t.f11, t.f30, t.f21, t.f12, t.f03};
    });
}

hnm_status hnm_family_invariants(const hnm_family* family, double* alpha, double* s0) {
    return guard([&] {
        need(family, "family");
        if (alpha) *alpha = family->h.alpha;
        if (s0) *s0 = family->h.s0;
    });
}

hnm_status hnm_family_lambda(const hnm_family* family, double* lambda) {
    return guard([&] {
        need(family, "family");
        need(lambda, "lambda");
        *lambda = family->h.lambda();
    });
}

hnm_status hnm_family_with_mu(const hnm_family* family, double mu, hnm_family** out) {
    return guard([&] {
        need(family, "family");
        need(out, "out");
        *out = new hnm_family{family->h.with_mu(mu)};
    });
}

hnm_status hnm_return_map_create(const hnm_family* family, int k, hnm_return_map** out) {
    return guard([&] {
        need(family, "family");
        need(out, "out");
        *out = new hnm_return_map{hnm::build_return_map(family->h, k)};
    });
}

void hnm_return_map_free(hnm_return_map* map) { delete map; }

hnm_status hnm_return_map_eval(const hnm_return_map* map, double x, double y, double* xo, double* yo) {
    return guard([&] {
        need(map, "map");
        need(xo, "xo");
        need(yo, "yo");
        const auto p = map->rm.eval({x, y});
        *xo = p.x;
        *yo = p.y;
    });
}

hnm_status hnm_return_map_jacobian(const hnm_return_map* map, double x, double y, double jac[4]) {
    return guard([&] {
        need(map, "map");
        need(jac, "jac");
        hnm::Jacobian2 j;
        map->rm.eval({x, y}, j);
        jac[0] = j.xx;
        jac[1] = j.xy;
        jac[2] = j.yx;
        jac[3] = j.yy;
    });
}

hnm_status hnm_henon_eval(double M, double x, double y, double* xo, double* yo) {
    return guard([&] {
        need(xo, "xo");
        need(yo, "yo");
        const auto p = hnm::henon_eval(M, {x, y});
        *xo = p.x;
        *yo = p.y;
    });
}

hnm_status hnm_henon_birkhoff_b1(double M, double* out) {
    return guard([&] {
        need(out, "out");
        *out = hnm::birkhoff_b1(M);
    });
}

hnm_status hnm_henon_horseshoe_certificate(double M, int* certified) {
    return guard([&] {
        need(certified, "certified");
        *certified = hnm::horseshoe_certificate(M) ? 1 : 0;
    });
}

hnm_status hnm_m_from_mu(const hnm_family* family, int k, double mu, double* M) {
    return guard([&] {
        need(family, "family");
        need(M, "M");
        *M = hnm::m_from_mu(family->h, k, mu).M;
    });
}

hnm_status hnm_mu_from_m(const hnm_family* family, int k, double M, double* mu) {
    return guard([&] {
        need(family, "family");
        need(mu, "mu");
        *mu = hnm::mu_from_m(family->h, k, M);
    });
}

hnm_status hnm_locate_bifurcation(const hnm_family* family, int k, hnm_bifurcation_kind kind, double* mu,
                                  double* predicted) {
    return guard([&] {
        need(family, "family");
        need(mu, "mu");
        if (kind != HNM_BIF_PLUS && kind != HNM_BIF_MINUS)
            throw hnm::Error(hnm::ErrorCode::InvalidArgument, "unknown bifurcation kind");
        const auto b = hnm::locate_bifurcation(family->h, k,
                                               kind == HNM_BIF_PLUS ? hnm::BifurcationKind::Plus : hnm::BifurcationKind::Minus);
        *mu = b.mu;
        if (predicted) *predicted = b.predicted;
    });
}

hnm_status hnm_run(const char* subcommand, const char* config_text, const char* const* overrides, size_t n_overrides,
                   const char* out_dir, int threads, int* exit_status, char** envelope) {
    if (envelope) *envelope = nullptr;
    return guard([&] {
        need(subcommand, "subcommand");
        need(exit_status, "exit_status");
        if (n_overrides > 0) need(overrides, "overrides");
        std::vector<std::string> ovs;
        for (size_t i = 0; i < n_overrides; ++i) {
            need(overrides[i], "override");
            ovs.emplace_back(overrides[i]);
        }
        const auto res =
            hnm::run_from_text(subcommand, config_text ? config_text : "", ovs, out_dir ? out_dir : "", threads);
        *exit_status = res.status;
        if (envelope) *envelope = dup(res.envelope);
        if (res.status != 0) g_last_error = res.envelope;
    });
}

}  // extern "C"

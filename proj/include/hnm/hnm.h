#ifndef HNM_H
#define HNM_H

/* C interface to the homoclinic-tangency model library. All functions return
 * an hnm_status; on failure hnm_last_error() describes the problem for the
 * calling thread. Strings handed out by the library are freed with
 * hnm_string_free. */

#include <stddef.h>

#if defined(HNM_BUILDING_LIBRARY)
#define HNM_API __attribute__((visibility("default")))
#else
#define HNM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hnm_status {
    HNM_OK = 0,
    HNM_ERR_INVALID_ARGUMENT = 1,
    HNM_ERR_CONFIG = 2,
    HNM_ERR_ESCAPE = 3,
    HNM_ERR_NOT_TANGENCY = 4,
    HNM_ERR_ORIENTABLE = 5,
    HNM_ERR_ILL_CONDITIONED = 6,
    HNM_ERR_TARGET_UNREACHABLE = 7,
    HNM_ERR_NO_REAL_ORBIT = 8,
    HNM_ERR_RESONANT = 9,
    HNM_ERR_CROSS_FORM = 10,
    HNM_ERR_STRIP_OUTSIDE_WINDOW = 11,
    HNM_ERR_NEWTON_DIVERGED = 12,
    HNM_ERR_SINGULAR_JACOBIAN = 13,
    HNM_ERR_COLLAPSED = 14,
    HNM_ERR_BRACKET_FAILED = 15,
    HNM_ERR_NOT_ELLIPTIC = 16,
    HNM_ERR_PRECISION_FLOOR = 17,
    HNM_ERR_NOT_IN_RESONANCE_WINDOW = 18,
    HNM_ERR_INTERNAL = 99
} hnm_status;

typedef struct hnm_family hnm_family;
typedef struct hnm_return_map hnm_return_map;

typedef struct hnm_taylor {
    double a, b, c, d;
    double e20, e11, e02;
    double f20, f11, f30, f21, f12, f03;
} hnm_taylor;

typedef enum hnm_bifurcation_kind { HNM_BIF_PLUS = 0, HNM_BIF_MINUS = 1 } hnm_bifurcation_kind;

HNM_API const char* hnm_version(void);
HNM_API const char* hnm_last_error(void);
HNM_API const char* hnm_status_name(hnm_status status);
HNM_API void hnm_string_free(char* s);

/* Family from INI text ([family] section; other sections are ignored here). */
HNM_API hnm_status hnm_family_from_config(const char* ini_text, hnm_family** out);
HNM_API void hnm_family_free(hnm_family* family);
HNM_API hnm_status hnm_family_taylor(const hnm_family* family, hnm_taylor* out);
HNM_API hnm_status hnm_family_invariants(const hnm_family* family, double* alpha, double* s0);
HNM_API hnm_status hnm_family_lambda(const hnm_family* family, double* lambda);
/* Copy at a new splitting parameter. */
HNM_API hnm_status hnm_family_with_mu(const hnm_family* family, double mu, hnm_family** out);

HNM_API hnm_status hnm_return_map_create(const hnm_family* family, int k, hnm_return_map** out);
HNM_API void hnm_return_map_free(hnm_return_map* map);
HNM_API hnm_status hnm_return_map_eval(const hnm_return_map* map, double x, double y, double* xo, double* yo);
/* jac is row-major [dx'/dx, dx'/dy, dy'/dx, dy'/dy]. */
HNM_API hnm_status hnm_return_map_jacobian(const hnm_return_map* map, double x, double y, double jac[4]);

HNM_API hnm_status hnm_henon_eval(double M, double x, double y, double* xo, double* yo);
HNM_API hnm_status hnm_henon_birkhoff_b1(double M, double* out);
HNM_API hnm_status hnm_henon_horseshoe_certificate(double M, int* certified);

HNM_API hnm_status hnm_m_from_mu(const hnm_family* family, int k, double mu, double* M);
HNM_API hnm_status hnm_mu_from_m(const hnm_family* family, int k, double M, double* mu);

HNM_API hnm_status hnm_locate_bifurcation(const hnm_family* family, int k, hnm_bifurcation_kind kind, double* mu,
                                          double* predicted);

/* Runs a CLI subcommand. `overrides` are key=value strings. Writes output files
 * into out_dir (NULL: [output] dir or "out"). *envelope, when non-NULL, receives
 * the envelope or error JSON. *exit_status gets 0, 1 (validation) or 2 (numerical). */
HNM_API hnm_status hnm_run(const char* subcommand, const char* config_text, const char* const* overrides,
                           size_t n_overrides, const char* out_dir, int threads, int* exit_status, char** envelope);

#ifdef __cplusplus
}
#endif

#endif

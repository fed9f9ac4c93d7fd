/* Plain-C consumer of the shared library. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "hnm/hnm.h"

static int failures = 0;

#define EXPECT(cond)                                                   \
    do {                                                               \
        if (!(cond)) {                                                 \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                                \
        }                                                              \
    } while (0)

int main(void) {
    EXPECT(strlen(hnm_version()) > 0);

    hnm_family* f = NULL;
    EXPECT(hnm_family_from_config("[family]\nlambda = 0.5\nalpha = -0.1\ns0 = -0.4\n", &f) == HNM_OK);
    EXPECT(f != NULL);

    double alpha = 0, s0 = 0, lam = 0;
    EXPECT(hnm_family_invariants(f, &alpha, &s0) == HNM_OK);
    EXPECT(fabs(alpha + 0.1) < 1e-8 && fabs(s0 + 0.4) < 1e-8);
    EXPECT(hnm_family_lambda(f, &lam) == HNM_OK && lam == 0.5);

    hnm_taylor t;
    EXPECT(hnm_family_taylor(f, &t) == HNM_OK);
    EXPECT(fabs(t.b * t.c - 1.0) < 1e-10);

    hnm_return_map* rm = NULL;
    EXPECT(hnm_return_map_create(f, 10, &rm) == HNM_OK);
    double jac[4];
    EXPECT(hnm_return_map_jacobian(rm, 1.0, pow(0.5, 10), jac) == HNM_OK);
    EXPECT(fabs(jac[0] * jac[3] - jac[1] * jac[2] + 1.0) < 1e-10);
    double xo, yo;
    EXPECT(hnm_return_map_eval(rm, 1.0, pow(0.5, 10), &xo, &yo) == HNM_OK);
    EXPECT(isfinite(xo) && isfinite(yo));
    hnm_return_map_free(rm);

    double M = 0, mu = 0, pred = 0;
    EXPECT(hnm_mu_from_m(f, 10, 0.7, &mu) == HNM_OK);
    EXPECT(hnm_m_from_mu(f, 10, mu, &M) == HNM_OK);
    EXPECT(fabs(M - 0.7) < 1e-10);
    EXPECT(hnm_locate_bifurcation(f, 10, HNM_BIF_PLUS, &mu, &pred) == HNM_OK);
    EXPECT(fabs(mu - pred) < 1e-3 * fabs(pred));

    double b1 = 1;
    EXPECT(hnm_henon_birkhoff_b1(0.625, &b1) == HNM_OK && fabs(b1) < 1e-10);
    EXPECT(hnm_henon_birkhoff_b1(0.5, &b1) == HNM_ERR_RESONANT);
    EXPECT(strlen(hnm_last_error()) > 0);
    EXPECT(strcmp(hnm_status_name(HNM_ERR_RESONANT), "resonant") == 0);
    int cert = 0;
    EXPECT(hnm_henon_horseshoe_certificate(10.0, &cert) == HNM_OK && cert == 1);

    /* error paths */
    hnm_family* g = NULL;
    EXPECT(hnm_family_from_config("[family]\nq = 0\n", &g) == HNM_ERR_NOT_TANGENCY);
    EXPECT(g == NULL);
    EXPECT(hnm_family_from_config("[family]\nbogus = 1\n", &g) == HNM_ERR_CONFIG);
    EXPECT(hnm_family_taylor(NULL, &t) == HNM_ERR_INVALID_ARGUMENT);
    EXPECT(hnm_return_map_create(f, 0, &rm) == HNM_ERR_INVALID_ARGUMENT);

    int status = -1;
    char* env = NULL;
    const char* ov[] = {"M=0.625", "output.formats=json"};
    EXPECT(hnm_run("henon", "", ov, 2, "capi_out", 1, &status, &env) == HNM_OK);
    EXPECT(status == 0);
    EXPECT(env != NULL && strstr(env, "\"schema_version\"") != NULL);
    hnm_string_free(env);
    env = NULL;
    const char* bad[] = {"nonsense=1"};
    EXPECT(hnm_run("henon", "", bad, 1, "capi_out", 1, &status, &env) == HNM_OK);
    EXPECT(status == 1);
    EXPECT(env != NULL && strstr(env, "\"error\"") != NULL);
    hnm_string_free(env);

    hnm_family_free(f);
    if (failures) fprintf(stderr, "%d failure(s)\n", failures);
    return failures ? 1 : 0;
}

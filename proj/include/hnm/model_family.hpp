#pragma once

// Homoclinic model families: a saddle map T0 in Moser form plus an
// orientation-reversing global map T1 built from exact stages.

#include <string>
#include <vector>

#include "hnm/map_core.hpp"

namespace hnm {

struct LocalMapParams {
    double lambda = 0.5;
    std::vector<double> beta;  ///< beta_1..beta_n of B(u) = 1 + beta_1 u + ...

    double beta1() const { return beta.empty() ? 0.0 : beta.front(); }
    Polynomial series() const;
    MapExpr as_map() const;
    void validate() const;
};

struct TaylorData {
    double a = 0, b = 0, c = 0, d = 0;
    double e20 = 0, e11 = 0, e02 = 0;
    double f20 = 0, f11 = 0, f30 = 0, f21 = 0, f12 = 0, f03 = 0;

    /// 2ad - b f11 - 2 e02 c, zero for every det -1 map.
    double det_identity() const { return 2 * a * d - b * f11 - 2 * e02 * c; }
    /// The alternative sign arrangement 2a + 2e02/(bd) - b f11/d; kept only as a diagnostic.
    double printed_identity() const { return 2 * a + 2 * e02 / (b * d) - b * f11 / d; }
};

enum class RecipeKind { HenonLike, ShearSandwich };

const char* recipe_name(RecipeKind kind);
RecipeKind recipe_from_name(const std::string& name);

/// Declarative description of T1.
///
/// henon-like:      x' = x+ + P(eta), y' = mu + x/P'(eta) + Q(eta), eta = y - y-
///                  with P = b eta + p[0] eta^2 + p[1] eta^3 + ..., b = 1/c.
/// shear-sandwich:  (x, eta) -> (x + b Q(eta), eta) -> swap -> diag(b)
///                  -> X += g1 Y + g2 Y^2 -> Y += h2 X^2 -> translate.
/// In both, Q = q[0] eta^2 + q[1] eta^3 + ...
struct RecipeSpec {
    RecipeKind kind = RecipeKind::HenonLike;
    double x_plus = 1.0;
    double y_minus = 1.0;
    int n0 = 1;
    double c = 1.0;
    std::vector<double> p;
    std::vector<double> q{1.0};
    double g1 = 0.0, g2 = 0.0, h2 = 0.0;

    double b() const { return 1.0 / c; }
    void validate() const;
};

/// T1 at splitting parameter mu. `stages` excludes mu; it enters as a final
/// vertical offset so that re-evaluating at another mu is free.
struct GlobalMapSpec {
    double x_plus = 1.0;
    double y_minus = 1.0;
    double mu = 0.0;
    int n0 = 1;
    MapExpr stages;

    PlanarPoint eval(PlanarPoint p) const { return eval_at(p, mu); }
    PlanarPoint eval_at(PlanarPoint p, double mu_value) const {
        PlanarPoint q = stages.eval(p);
        return {q.x, q.y + mu_value};
    }
    Jacobian2 jacobian(PlanarPoint p) const { return stages.jacobian(p); }
};

GlobalMapSpec make_global(const RecipeSpec& recipe, double mu);

struct FamilyHandle {
    LocalMapParams local;
    RecipeSpec recipe;
    GlobalMapSpec global;
    TaylorData taylor;
    double alpha = 0.0;
    double s0 = 0.0;

    double lambda() const { return local.lambda; }
    double x_plus() const { return global.x_plus; }
    double y_minus() const { return global.y_minus; }
    FamilyHandle with_mu(double mu) const;
};

FamilyHandle build_family(const LocalMapParams& local, const RecipeSpec& recipe, double mu = 0.0);

/// Richardson-extrapolated central differences of F = x' - x+ and G = y' - mu at (0, y-).
TaylorData extract_taylor(const GlobalMapSpec& global);

double alpha_invariant(const FamilyHandle& h);
double s0_invariant(const FamilyHandle& h);
double alpha_of(const TaylorData& t, double x_plus, double y_minus);
double s0_of(const TaylorData& t, double x_plus);

/// Retune c (with b = 1/c) for alpha and the recipe's shape knob (p[0] or g1) for s0.
FamilyHandle tune_to(const FamilyHandle& h, double alpha_target, double s0_target);

}  // namespace hnm

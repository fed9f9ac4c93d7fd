#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hnm/model_family.hpp"

namespace hnm {

/// T0^k through the integral u = xy: x_k = lambda^k x B(u)^k, y_k = lambda^-k y B(u)^-k.
PlanarPoint t0_pow_closed(const LocalMapParams& local, PlanarPoint p, int k);
PlanarPoint t0_pow_closed(const LocalMapParams& local, PlanarPoint p, int k, Jacobian2& jac);

/// Given (x0, y_k), solve u = lambda^k x0 y_k B(u)^k and return the cross pair.
struct CrossSolution {
    double y0 = 0.0;
    double xk = 0.0;
    double u = 0.0;
};
CrossSolution cross_solve(const LocalMapParams& local, int k, double x0, double yk);

struct CrossFormRow {
    int k = 0;
    double sup_residual = 0.0;
    double normalized = 0.0;   ///< sup_residual / lambda^{2k}
    double coefficient = 0.0;  ///< measured coefficient of lambda^k x0 y_k in x_k/(lambda^k x0) - 1
};

struct CrossFormReport {
    std::vector<CrossFormRow> rows;
    double beta1 = 0.0;
    double beta1_fit = 0.0;  ///< slope of coefficient against k
    double normalized_max = 0.0;
    bool bounded = false;
};

/// Samples (x0, y_k) on an n x n grid of [0.5, 1.5]^2.
CrossFormReport validate_cross_form(const LocalMapParams& local, const std::vector<int>& ks, int samples = 9);

/// T_k = T1 o T0^k on the strip sigma_k^0.
class ReturnMap {
public:
    ReturnMap(FamilyHandle family, int k);

    const FamilyHandle& family() const { return family_; }
    int k() const { return k_; }
    double mu() const { return family_.global.mu; }

    PlanarPoint eval(PlanarPoint p) const { return eval_at(p, mu()); }
    PlanarPoint eval(PlanarPoint p, Jacobian2& jac) const { return eval_at(p, mu(), jac); }
    PlanarPoint eval_at(PlanarPoint p, double mu) const;
    PlanarPoint eval_at(PlanarPoint p, double mu, Jacobian2& jac) const;

private:
    FamilyHandle family_;
    int k_;
};

ReturnMap build_return_map(const FamilyHandle& family, int k);

/// Default half-width of the windows around M+ = (x+, 0) and M- = (0, y-).
double default_window(const FamilyHandle& family);

struct Strip {
    enum class Which { Sigma0, Sigma1 } which = Which::Sigma0;
    int k = 0;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    std::vector<PlanarPoint> boundary;
    /// distance of the centre line to the axis it accumulates on
    double distance = 0.0;
};

std::pair<Strip, Strip> strips(const FamilyHandle& family, int k, double window);

enum class HorseshoeTag { Empty, Regular, ParityAlternating, AlphaNegativeHorseshoes, AlphaPositiveTrivial, Inconclusive, Unexpected };

const char* horseshoe_name(HorseshoeTag tag);

struct HorseshoeEvidence {
    int k = 0;
    int components = -1;  ///< -1 when the count did not stabilise
    int expected = -1;    ///< from the sign table, -1 if it has no entry
    bool cone_ok = true;  ///< cone-field spot check on each component
    int resolution = 0;
};

struct HorseshoeClass {
    HorseshoeTag tag = HorseshoeTag::Inconclusive;
    std::optional<HorseshoeTag> expected;
    std::vector<HorseshoeEvidence> evidence;
    int misclassified = 0;
    int inconclusive = 0;
};

/// Sign-table prediction; nullopt where the table has no entry.
std::optional<HorseshoeTag> expected_horseshoe(double lambda, double c, double d, double alpha);

/// Components of sigma_k^0 meeting T_k^{-1}(sigma_k^0) at mu = 0, one k at a time.
HorseshoeEvidence count_intersection(const FamilyHandle& family, int k, double window);

HorseshoeClass classify_horseshoe(const FamilyHandle& family, const std::vector<int>& ks, double window, int threads = 1);

}  // namespace hnm

#pragma once

// Affine conjugation of T_k to the near-Henon form
//   X' = Y,  Y' = M + X - Y^2 + (f03/d^2) lambda^k Y^3 + O(k lambda^{2k}).

#include <functional>
#include <vector>

#include "hnm/return_map.hpp"

namespace hnm {

struct RescaledParam {
    double M = 0.0;
    double correction_cubic = 0.0;  ///< f03/d^2 lambda^k
};

/// M = -d lambda^{-2k} (mu + lambda^k y- alpha (1 + k beta1 lambda^k x+ y-)) - s0
RescaledParam m_from_mu(const FamilyHandle& family, int k, double mu);
double mu_from_m(const FamilyHandle& family, int k, double M);

struct RescaleChain {
    int k = 0;
    double mu_ref = 0.0;
    double lambda_k = 0.0;
    double D = 0.0;       ///< d + lambda^k f12 x+
    double sigma = 0.0;   ///< f11 x+ / 2
    double nu1 = 0.0, nu2 = 0.0;
    double M1 = 0.0, M2 = 0.0, M3 = 0.0;
    double M = 0.0;       ///< parameter of the refined normal form
    double cubic = 0.0;   ///< f03/d^2 lambda^k
    Affine2 staged;       ///< original -> (X, Y) through shift1, scale, shift2, mix, shift3
    Affine2 refinement;   ///< refined coordinates -> staged coordinates
    Affine2 from_original;
    Affine2 to_original;
};

/// Builds the chain at mu_ref; `refine_steps` affine corrections remove the
/// remaining first-order terms of the quadratic Taylor part.
RescaleChain build_chain(const FamilyHandle& family, int k, double mu_ref, int refine_steps = 3);

class ScaledReturnMap {
public:
    ScaledReturnMap(const FamilyHandle& family, int k, double mu_ref, int refine_steps = 3);

    const ReturnMap& return_map() const { return rm_; }
    const RescaleChain& chain() const { return chain_; }

    PlanarPoint eval(PlanarPoint w, double mu) const;
    PlanarPoint eval(PlanarPoint w, double mu, Jacobian2& jac) const;
    PlanarPoint to_original(PlanarPoint w) const { return chain_.to_original.apply(w); }
    PlanarPoint from_original(PlanarPoint p) const { return chain_.from_original.apply(p); }

private:
    ReturnMap rm_;
    RescaleChain chain_;
};

/// The limit map with cubic correction.
PlanarPoint near_henon(double M, double cubic, PlanarPoint w);

/// sup over an n x n grid of [-half, half]^2 of |map(w) - near_henon(M, cubic, w)|.
double grid_residual(const std::function<PlanarPoint(PlanarPoint)>& map, double M, double cubic,
                     double half = 2.0, int n = 21);

/// Least-squares Y^3 coefficient of Y'(0, Y) - (M - Y^2) on [-1.5, 1.5].
double fit_cubic_coefficient(const std::function<PlanarPoint(PlanarPoint)>& map, double M);

struct ConvergenceRow {
    int k = 0;
    double M = 0.0;         ///< requested
    double M_chain = 0.0;   ///< after refinement
    double mu = 0.0;
    double sup_residual = 0.0;
    double normalized = 0.0;  ///< sup_residual / (k lambda^{2k})
    double cubic_ratio = 0.0; ///< fitted Y^3 coefficient / (f03/d^2 lambda^k); 0 when f03 = 0
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    double normalized_max = 0.0;
    bool bounded = false;
};

ConvergenceReport convergence_report(const FamilyHandle& family, const std::vector<int>& ks, double M, int threads = 1);

}  // namespace hnm

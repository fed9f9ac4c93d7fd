#pragma once

#include <complex>
#include <vector>

#include "hnm/henon.hpp"
#include "hnm/rescale.hpp"

namespace hnm {

struct OrbitRecord {
    std::vector<PlanarPoint> points;  ///< original coordinates
    std::vector<PlanarPoint> scaled;  ///< rescaled (X, Y)
    int period_label = 0;             ///< k + n0 or 2(k + n0)
    std::complex<double> nu1, nu2;
    double trace = 0.0;
    double det = 0.0;
    StabilityClass stability;
    double residual = 0.0;  ///< sup norm in rescaled coordinates
    double mu = 0.0;
};

enum class BifurcationKind { Plus, Minus };

const char* bifurcation_name(BifurcationKind kind);

struct BifurcationPoint {
    BifurcationKind kind = BifurcationKind::Plus;
    double mu = 0.0;
    int k = 0;
    double predicted = 0.0;  ///< mu from the asymptotic formula
    double condition = 0.0;  ///< trace DT_k (plus) or trace DT_k^2 + 2 (minus) at mu
    OrbitRecord orbit;
};

/// Newton in rescaled coordinates; seeds are rescaled points.
OrbitRecord find_fixed_point(const ScaledReturnMap& srm, double mu, PlanarPoint seed);
OrbitRecord find_two_periodic(const ScaledReturnMap& srm, double mu, PlanarPoint seed);

/// Same, with the seed given in original coordinates and the chain built at rm.mu().
OrbitRecord find_fixed_point(const ReturnMap& rm, PlanarPoint seed);
OrbitRecord find_two_periodic(const ReturnMap& rm, PlanarPoint seed);

/// Asymptotic prediction: M = 0 for plus, M = 1 for minus.
double predicted_bifurcation(const FamilyHandle& family, int k, BifurcationKind kind);

BifurcationPoint locate_bifurcation(const FamilyHandle& family, int k, BifurcationKind kind);

/// Rescaled parameter of the chain at mu, to first order around its reference.
double chain_parameter(const ScaledReturnMap& srm, const FamilyHandle& family, double mu);

/// arccos(trace/2) of D(T_k^2) for an elliptic 2-orbit.
double phase_of_elliptic(const OrbitRecord& record);

}  // namespace hnm

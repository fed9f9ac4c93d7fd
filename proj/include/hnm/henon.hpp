#pragma once

// The limit map H(x, y) = (y, M + x - y^2), det -1.

#include <optional>
#include <string>
#include <vector>

#include "hnm/map_core.hpp"

namespace hnm {

enum class StabilityTag {
    Saddle,
    EllipticGeneric,
    ParabolicPlus,
    ParabolicMinus,
    Resonance14,
    Resonance13,
    Twistless,
};

const char* stability_name(StabilityTag tag);

struct StabilityClass {
    StabilityTag tag = StabilityTag::Saddle;
    std::optional<double> phase;
};

/// Tag from the trace of a det +1 (or det -1) derivative. `tol` widens the
/// special-value tests (trace 0, -1, -1/2, +-2).
StabilityClass classify_trace(double trace, double det, double tol = 1e-9);

PlanarPoint henon_eval(double M, PlanarPoint p);
Jacobian2 henon_jacobian(PlanarPoint p);
MapExpr henon_map(double M);

struct HenonFixedPoint {
    PlanarPoint point;
    double nu1 = 0.0, nu2 = 0.0;  ///< real multipliers, nu1 >= nu2
};

std::vector<HenonFixedPoint> fixed_points(double M);

struct HenonTwoOrbit {
    PlanarPoint p1, p2;
    double trace = 0.0;  ///< trace of D(H^2) at p1, equals 2 - 4M
    StabilityClass stability;
};

HenonTwoOrbit two_periodic_orbit(double M);

/// First Birkhoff (twist) coefficient of the 2-orbit as a fixed point of H^2.
/// Vanishes at M = 5/8; negative on (0, 5/8).
double birkhoff_b1(double M);

/// Covering-relation certificate of a full 2-shift. Only sufficiency is claimed.
bool horseshoe_certificate(double M);

struct HenonBifurcation {
    std::string name;
    double M = 0.0;
    std::string condition;
};

/// Special parameter values, each located by root finding.
std::vector<HenonBifurcation> bifurcation_values();

}  // namespace hnm

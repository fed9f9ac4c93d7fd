#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hnm/orbit_solver.hpp"

namespace hnm {

struct PhiSample {
    double mu = 0.0;
    double trace = 0.0;
    double phi = 0.0;
};

struct ResonanceMark {
    std::string flag;    ///< "resonance-1:4", "resonance-1:3", "twistless"
    double cos_phi = 0;  ///< 0, -1/2, -1/4
    double mu = 0.0;
    bool found = false;
};

struct CascadeRecord {
    int k = 0;
    bool ok = false;
    std::string error;
    BifurcationPoint plus, minus;
    double lo = 0.0, hi = 0.0;  ///< e_k^2 as an interval
    double width = 0.0;
    double width_scaled = 0.0;  ///< width / (lambda^{2k}/|d|)
    double plus_dev = 0.0;      ///< |mu_plus - predicted| / lambda^{2k}
    double minus_dev = 0.0;
    double C = 0.0;             ///< max deviation / (k |lambda|^k)
    std::vector<PhiSample> phi;
    bool phi_monotone = false;
    std::vector<ResonanceMark> marks;
};

struct CascadeResult {
    std::vector<CascadeRecord> records;
    bool disjoint = false;
    bool contains_zero_all = false;
    std::vector<double> width_ratios;  ///< |e_{k+1}| / |e_k|, aligned with records[1..]
    bool C_non_increasing = false;
};

CascadeResult run_cascade(const FamilyHandle& family, const std::vector<int>& ks, int phi_points = 20, int threads = 1);

struct CurvePoint {
    double alpha = 0.0;
    double mu_plus = 0.0;
    double mu_minus = 0.0;
    bool ok = false;
};

struct StripCurve {
    int k = 0;
    std::vector<CurvePoint> points;
    double slope_fit = 0.0;       ///< d mu_plus / d alpha
    double slope_expected = 0.0;  ///< -lambda^k y-
    bool crosses_axis = false;    ///< some L_k^{2+-} changes sign over the alpha range
    int failures = 0;
};

struct StripMap2D {
    std::vector<double> alphas;
    std::vector<StripCurve> curves;
    double disjoint_threshold = 0.0;  ///< |alpha| beyond which strips must not meet
    double band_halfwidth = 0.0;      ///< |alpha| within which all strips must contain mu = 0
    bool disjoint_outside = false;
    bool intersect_in_band = false;
    std::vector<std::vector<int>> intersections;  ///< count of alpha samples where strips i, j overlap
};

StripMap2D run_strip_atlas(const FamilyHandle& family_template, const std::vector<int>& ks, double eps = 0.05,
                           int alpha_points = 41, int threads = 1);

struct ResonanceRow {
    int k = 0;
    bool elliptic = false;
    double trace = 0.0;
    double cos_phi = 0.0;
    double error = 0.0;  ///< |cos phi - (1 + 2 s0)|
    double C = 0.0;      ///< error / (k |lambda|^k)
    double margin = 0.0; ///< 2 - |trace|
    std::string message;
    OrbitRecord orbit;
};

struct ResonanceCertificate {
    double s0 = 0.0;
    std::vector<int> ks;
    std::vector<ResonanceRow> rows;
    std::vector<std::string> flags;
    std::string verdict;  ///< certified, withheld, failed
};

/// Degeneracy flags for a limit value s0; empty when generic.
std::vector<std::string> resonance_flags(double s0);

ResonanceCertificate certify_global_resonance(const FamilyHandle& family, const std::vector<int>& ks, int threads = 1);

}  // namespace hnm

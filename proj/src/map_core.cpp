#include "hnm/map_core.hpp"

#include <string>

namespace hnm {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::Config: return "config";
        case ErrorCode::Escape: return "orbit_escaped";
        case ErrorCode::NotTangency: return "not_a_tangency";
        case ErrorCode::OrientableGlobalMap: return "orientable_global_map";
        case ErrorCode::IllConditioned: return "ill_conditioned_extraction";
        case ErrorCode::TargetUnreachable: return "target_unreachable";
        case ErrorCode::NoRealOrbit: return "no_real_orbit";
        case ErrorCode::Resonant: return "resonant";
        case ErrorCode::CrossFormSolveFailed: return "cross_form_solve_failed";
        case ErrorCode::StripOutsideWindow: return "strip_outside_window";
        case ErrorCode::NewtonDiverged: return "newton_diverged";
        case ErrorCode::SingularJacobian: return "singular_jacobian";
        case ErrorCode::CollapsedToFixedPoint: return "collapsed_to_fixed_point";
        case ErrorCode::BracketFailed: return "bracket_failed";
        case ErrorCode::NotElliptic: return "not_elliptic";
        case ErrorCode::PrecisionFloor: return "precision_floor";
        case ErrorCode::NotInResonanceWindow: return "not_in_resonance_window";
    }
    return "unknown";
}

bool is_validation_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::Config:
        case ErrorCode::NotTangency:
        case ErrorCode::OrientableGlobalMap:
        case ErrorCode::TargetUnreachable:
        case ErrorCode::NotInResonanceWindow:
        case ErrorCode::StripOutsideWindow:
            return true;
        default:
            return false;
    }
}

Jacobian2 Jacobian2::inverse() const {
    const double dt = det();
    if (dt == 0.0 || !std::isfinite(dt)) throw Error(ErrorCode::SingularJacobian, "singular 2x2 matrix");
    return {yy / dt, -xy / dt, -yx / dt, xx / dt};
}

Affine2 Affine2::inverse() const {
    const Jacobian2 li = lin.inverse();
    const PlanarPoint o = li.apply(offset);
    return {li, {-o.x, -o.y}};
}

Affine2 Affine2::after(const Affine2& inner) const {
    return {lin * inner.lin, lin.apply(inner.offset) + offset};
}

double Polynomial::operator()(double t) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
    return acc;
}

double Polynomial::derivative(double t) const {
    double acc = 0.0;
    for (std::size_t i = c_.size(); i-- > 1;) acc = acc * t + static_cast<double>(i) * c_[i];
    return acc;
}

double Polynomial::second_derivative(double t) const {
    double acc = 0.0;
    for (std::size_t i = c_.size(); i-- > 2;) acc = acc * t + static_cast<double>(i * (i - 1)) * c_[i];
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (c_.size() <= 1) return Polynomial({0.0});
    std::vector<double> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = static_cast<double>(i) * c_[i];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
    if (c_.empty() || other.c_.empty()) return Polynomial();
    std::vector<double> out(c_.size() + other.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < other.c_.size(); ++j) out[i + j] += c_[i] * other.c_[j];
    return Polynomial(std::move(out));
}

namespace {

// Each overload returns the stage image and writes its analytic derivative.
PlanarPoint apply(const stage::VerticalShear& s, PlanarPoint p, Jacobian2& j) {
    j = {1.0, s.g.derivative(p.y), 0.0, 1.0};
    return {p.x + s.g(p.y), p.y};
}

PlanarPoint apply(const stage::HorizontalShear& s, PlanarPoint p, Jacobian2& j) {
    j = {1.0, 0.0, s.h.derivative(p.x), 1.0};
    return {p.x, p.y + s.h(p.x)};
}

PlanarPoint apply(const stage::Swap&, PlanarPoint p, Jacobian2& j) {
    j = {0.0, 1.0, 1.0, 0.0};
    return {p.y, p.x};
}

PlanarPoint apply(const stage::Translate& s, PlanarPoint p, Jacobian2& j) {
    j = Jacobian2::identity();
    return {p.x + s.dx, p.y + s.dy};
}

PlanarPoint apply(const stage::Diagonal& s, PlanarPoint p, Jacobian2& j) {
    j = {s.lambda, 0.0, 0.0, 1.0 / s.lambda};
    return {s.lambda * p.x, p.y / s.lambda};
}

PlanarPoint apply(const stage::Moser& s, PlanarPoint p, Jacobian2& j) {
    const double u = p.x * p.y;
    const double B = s.series(u);
    const double dB = s.series.derivative(u);
    const double lam = s.lambda;
    // X = lam x B(u), Y = y / (lam B(u)), u = xy
    j.xx = lam * (B + u * dB);
    j.xy = lam * p.x * p.x * dB;
    j.yx = -p.y * p.y * dB / (lam * B * B);
    j.yy = (B - u * dB) / (lam * B * B);
    return {lam * p.x * B, p.y / (lam * B)};
}

PlanarPoint apply(const stage::CotangentLift& s, PlanarPoint p, Jacobian2& j) {
    const double dp = s.p.derivative(p.x);
    const double ddp = s.p.second_derivative(p.x);
    j = {dp, 0.0, -p.y * ddp / (dp * dp), 1.0 / dp};
    return {s.p(p.x), p.y / dp};
}

void check_escape(PlanarPoint q, std::size_t index) {
    if (!q.finite() || std::abs(q.x) + std::abs(q.y) > kEscapeThreshold)
        throw EscapeError(static_cast<int>(index), "orbit escaped at stage " + std::to_string(index));
}

}  // namespace

MapExpr::MapExpr(std::vector<Stage> stages) : stages_(std::move(stages)) {}

MapExpr& MapExpr::then(Stage s) {
    stages_.push_back(std::move(s));
    return *this;
}

MapExpr MapExpr::followed_by(const MapExpr& next) const {
    MapExpr out = *this;
    for (const auto& s : next.stages_) out.stages_.push_back(s);
    return out;
}

PlanarPoint MapExpr::eval(PlanarPoint p) const {
    Jacobian2 scratch;
    for (std::size_t i = 0; i < stages_.size(); ++i) {
        p = std::visit([&](const auto& s) { return apply(s, p, scratch); }, stages_[i]);
        check_escape(p, i);
    }
    return p;
}

PlanarPoint MapExpr::eval(PlanarPoint p, Jacobian2& jac) const {
    jac = Jacobian2::identity();
    Jacobian2 js;
    for (std::size_t i = 0; i < stages_.size(); ++i) {
        p = std::visit([&](const auto& s) { return apply(s, p, js); }, stages_[i]);
        check_escape(p, i);
        jac = js * jac;
    }
    return p;
}

Jacobian2 MapExpr::jacobian(PlanarPoint p) const {
    Jacobian2 j;
    eval(p, j);
    return j;
}

int MapExpr::swap_count() const {
    int n = 0;
    for (const auto& s : stages_) n += std::holds_alternative<stage::Swap>(s) ? 1 : 0;
    return n;
}

PlanarPoint iterate(const MapExpr& map, PlanarPoint p, int k) {
    if (k < 0) throw Error(ErrorCode::InvalidArgument, "iterate: k must be non-negative");
    for (int i = 0; i < k; ++i) p = map.eval(p);
    return p;
}

}  // namespace hnm

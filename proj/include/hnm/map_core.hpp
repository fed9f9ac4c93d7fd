#pragma once

// Exact planar-map primitives. Every stage has an analytic Jacobian whose
// determinant is +1 (shears, translations, diagonal, Moser, cotangent lift)
// or -1 (swap), so compositions are area-preserving by construction.

#include <cmath>
#include <span>
#include <variant>
#include <vector>

#include "hnm/error.hpp"

namespace hnm {

/// |x|+|y| above this is treated as an escaped orbit.
inline constexpr double kEscapeThreshold = 1e8;

struct PlanarPoint {
    double x = 0.0;
    double y = 0.0;

    friend PlanarPoint operator+(PlanarPoint a, PlanarPoint b) { return {a.x + b.x, a.y + b.y}; }
    friend PlanarPoint operator-(PlanarPoint a, PlanarPoint b) { return {a.x - b.x, a.y - b.y}; }
    friend PlanarPoint operator*(double s, PlanarPoint a) { return {s * a.x, s * a.y}; }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
    double norm_inf() const { return std::max(std::abs(x), std::abs(y)); }
};

/// 2x2 derivative matrix, row-major: [[xx, xy], [yx, yy]] = [[dX/dx, dX/dy], [dY/dx, dY/dy]].
struct Jacobian2 {
    double xx = 1.0, xy = 0.0, yx = 0.0, yy = 1.0;

    static Jacobian2 identity() { return {}; }
    double det() const { return xx * yy - xy * yx; }
    double trace() const { return xx + yy; }
    PlanarPoint apply(PlanarPoint v) const { return {xx * v.x + xy * v.y, yx * v.x + yy * v.y}; }
    Jacobian2 inverse() const;

    friend Jacobian2 operator*(const Jacobian2& a, const Jacobian2& b) {
        return {a.xx * b.xx + a.xy * b.yx, a.xx * b.xy + a.xy * b.yy,
                a.yx * b.xx + a.yy * b.yx, a.yx * b.xy + a.yy * b.yy};
    }
};

/// Affine planar map p -> lin * p + offset.
struct Affine2 {
    Jacobian2 lin;
    PlanarPoint offset;

    PlanarPoint apply(PlanarPoint p) const { return lin.apply(p) + offset; }
    Affine2 inverse() const;
    /// (*this) after `inner`.
    Affine2 after(const Affine2& inner) const;
};

/// Real polynomial c[0] + c[1] t + ... in Horner form.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

    double operator()(double t) const;
    double derivative(double t) const;
    double second_derivative(double t) const;
    Polynomial derivative() const;
    Polynomial operator*(const Polynomial& other) const;

    std::span<const double> coeffs() const { return c_; }
    double coeff(std::size_t i) const { return i < c_.size() ? c_[i] : 0.0; }
    std::size_t degree() const { return c_.empty() ? 0 : c_.size() - 1; }

private:
    std::vector<double> c_;
};

namespace stage {

/// (x, y) -> (x + g(y), y)
struct VerticalShear {
    Polynomial g;
};
/// (x, y) -> (x, y + h(x))
struct HorizontalShear {
    Polynomial h;
};
/// (x, y) -> (y, x); the only orientation-reversing stage.
struct Swap {};
/// (x, y) -> (x + dx, y + dy)
struct Translate {
    double dx = 0.0, dy = 0.0;
};
/// (x, y) -> (lambda x, y / lambda)
struct Diagonal {
    double lambda = 1.0;
};
/// (x, y) -> (lambda x B(xy), y / (lambda B(xy))), B(0) = 1. Preserves xy.
struct Moser {
    double lambda = 1.0;
    Polynomial series;
};
/// (x, y) -> (P(x), y / P'(x)): the point transformation x -> P(x) lifted to the plane.
struct CotangentLift {
    Polynomial p;
};

}  // namespace stage

using Stage = std::variant<stage::VerticalShear, stage::HorizontalShear, stage::Swap, stage::Translate,
                           stage::Diagonal, stage::Moser, stage::CotangentLift>;

/// Ordered composition of stages, applied first to last.
class MapExpr {
public:
    MapExpr() = default;
    explicit MapExpr(std::vector<Stage> stages);

    MapExpr& then(Stage s);
    /// this map followed by `next`
    MapExpr followed_by(const MapExpr& next) const;

    PlanarPoint eval(PlanarPoint p) const;
    Jacobian2 jacobian(PlanarPoint p) const;
    PlanarPoint eval(PlanarPoint p, Jacobian2& jac) const;

    std::size_t size() const { return stages_.size(); }
    const std::vector<Stage>& stages() const { return stages_; }
    int swap_count() const;
    /// (-1)^{#swaps}
    double expected_det() const { return swap_count() % 2 == 0 ? 1.0 : -1.0; }

private:
    std::vector<Stage> stages_;
};

/// k-fold composition of `map`; k = 0 is the identity.
PlanarPoint iterate(const MapExpr& map, PlanarPoint p, int k);

}  // namespace hnm

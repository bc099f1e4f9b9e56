#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace torwave {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

enum class CurveKind {
    circle,
    analytic_oval,
    // Unit-length ellipse in its native angle parameter. Not unit speed; it
    // exists to exercise validate_curve.
    native_ellipse,
};

/// gamma(t), gamma'(t), gamma''(t).
struct CurveJet {
    Vec2 pos;
    Vec2 vel;
    Vec2 acc;
};

inline constexpr double kTolUnitSpeed = 1e-9;
inline constexpr double kTolReparam = 1e-10;
inline constexpr std::size_t kReparamKnots = 4096;

/*!
 * Closed, unit-length, positively curved curve in the plane covering the
 * torus, parametrized on [0, 1) and extended with period 1.
 *
 * Immutable after construction; copies share the reparametrization table.
 */
class CurveDef {
  public:
    CurveKind kind() const noexcept { return kind_; }
    Vec2 center() const noexcept { return center_; }
    /// Native semi-axes (before the rescale to unit length); radius for a circle.
    double axis_a() const noexcept { return axis_a_; }
    double axis_b() const noexcept { return axis_b_; }
    double length() const noexcept { return 1.0; }
    double curvature_min() const noexcept { return curvature_min_; }
    double curvature_max() const noexcept { return curvature_max_; }

    /// Periodic evaluation; t is reduced to [0, 1) first.
    CurveJet jet(double t) const;
    /// Evaluation without argument reduction, for t in [0, 1].
    CurveJet jet_unreduced(double t) const;

    /// CLI form: "circle:cx,cy" or "oval:A,B,cx,cy".
    std::string describe() const;

    struct OvalTable;  // arc-length table, defined in curve.cpp

  private:
    friend CurveDef make_circle(Vec2 center);
    friend CurveDef make_analytic_oval(double a, double b, Vec2 center);
    friend CurveDef make_native_ellipse(double a, double b, Vec2 center);

    void scan_curvature();

    CurveKind kind_ = CurveKind::circle;
    Vec2 center_;
    double axis_a_ = 0.0;
    double axis_b_ = 0.0;
    double curvature_min_ = 0.0;
    double curvature_max_ = 0.0;
    std::shared_ptr<const OvalTable> oval_;
};

/// Circle of radius 1/(2 pi): gamma(t) = center + rho (cos 2 pi t, sin 2 pi t).
CurveDef make_circle(Vec2 center);

/// Ellipse (a cos s, b sin s) + center rescaled to unit length and
/// reparametrized by arc length. Requires a, b > 0 and a != b.
CurveDef make_analytic_oval(double a, double b, Vec2 center);

CurveDef make_native_ellipse(double a, double b, Vec2 center);

/// order 0, 1, 2 -> gamma, gamma', gamma''.
Vec2 curve_eval(const CurveDef& curve, double t, int order);

struct CurveValidation {
    std::size_t grid_size = 0;
    double max_unit_speed_defect = 0.0;
    double curvature_min = 0.0;
    double curvature_max = 0.0;
    double closure_defect = 0.0;     // |gamma(1) - gamma(0)|
    double closure_defect_d1 = 0.0;  // |gamma'(1) - gamma'(0)|
    bool passed = false;
};

CurveValidation validate_curve(const CurveDef& curve, std::size_t grid_size);

/// Parses the CLI curve string. Throws InvalidArgument on malformed input.
CurveDef parse_curve(std::string_view text);

}  // namespace torwave

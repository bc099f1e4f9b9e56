#include "torwave/curve.hpp"

#include <algorithm>
#include <charconv>
#include <numbers>
#include <vector>

#include <fmt/format.h>

#include "torwave/error.hpp"
#include "torwave/quadrature.hpp"

namespace torwave {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kCurvatureScan = 4096;

double reduce_unit(double t)
{
    const double r = t - std::floor(t);
    return r >= 1.0 ? 0.0 : r;  // guards t = -tiny
}

}  // namespace

/*
 * Arc-length inverse for the ellipse (a cos s, b sin s). Knots hold s at
 * t = i / K; between knots a cubic Hermite guess (exact knot slopes) is
 * polished by Newton on the local arc-length integral.
 */
struct CurveDef::OvalTable {
    double a = 0.0;
    double b = 0.0;
    double perimeter = 0.0;
    std::vector<double> knots;  // K + 1 entries, knots[K] = 2 pi

    double speed(double s) const { return std::hypot(a * std::sin(s), b * std::cos(s)); }

    double arc(double s0, double s1) const
    {
        return quad::integrate(quad::gauss_legendre_16(), [this](double s) { return speed(s); }, s0, s1);
    }

    // Solves arc(s0, s) = target for s in [lo, hi] by safeguarded Newton.
    double solve(double s0, double target, double guess, double lo, double hi) const
    {
        double s = std::clamp(guess, lo, hi);
        for (int iter = 0; iter < 60; ++iter) {
            const double g = arc(s0, s) - target;
            if (g > 0.0) hi = std::min(hi, s);
            if (g < 0.0) lo = std::max(lo, s);
            double next = s - g / speed(s);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - s) <= 1e-15 * (1.0 + std::abs(s))) return next;
            s = next;
        }
        const double residual = std::abs(arc(s0, s) - target) / perimeter;
        if (residual > kTolReparam) throw NumericError("analytic_oval: arc-length inversion did not converge");
        return s;
    }

    double native_param(double t) const
    {
        const std::size_t K = knots.size() - 1;
        const double x = t * static_cast<double>(K);
        const std::size_t i = std::min(static_cast<std::size_t>(x), K - 1);
        const double u = x - static_cast<double>(i);
        const double h = 1.0 / static_cast<double>(K);
        const double s0 = knots[i], s1 = knots[i + 1];
        const double d0 = perimeter / speed(s0) * h;
        const double d1 = perimeter / speed(s1) * h;
        const double u2 = u * u, u3 = u2 * u;
        const double guess = (2 * u3 - 3 * u2 + 1) * s0 + (u3 - 2 * u2 + u) * d0 + (-2 * u3 + 3 * u2) * s1 +
                             (u3 - u2) * d1;
        if (u == 0.0) return s0;
        return solve(s0, (t - static_cast<double>(i) * h) * perimeter, guess, s0, s1);
    }
};

CurveJet CurveDef::jet(double t) const { return jet_unreduced(reduce_unit(t)); }

CurveJet CurveDef::jet_unreduced(double t) const
{
    switch (kind_) {
    case CurveKind::circle: {
        const double rho = axis_a_;
        const double c = std::cos(kTwoPi * t), s = std::sin(kTwoPi * t);
        return {center_ + rho * Vec2{c, s}, Vec2{-s, c}, kTwoPi * Vec2{-c, -s}};
    }
    case CurveKind::native_ellipse: {
        const double scale = 1.0 / oval_->perimeter;
        const double c = std::cos(kTwoPi * t), s = std::sin(kTwoPi * t);
        const double a = axis_a_ * scale, b = axis_b_ * scale;
        return {center_ + Vec2{a * c, b * s}, kTwoPi * Vec2{-a * s, b * c},
                (kTwoPi * kTwoPi) * Vec2{-a * c, -b * s}};
    }
    case CurveKind::analytic_oval: {
        const auto& tab = *oval_;
        const double sig = tab.native_param(t);
        const double c = std::cos(sig), s = std::sin(sig);
        const double a = axis_a_, b = axis_b_;
        const double v = std::hypot(a * s, b * c);
        const double dv = (a * a - b * b) * s * c / v;
        const Vec2 tangent{-a * s / v, b * c / v};
        // d(tangent)/d(sigma) times d(sigma)/dt = P / v.
        const Vec2 dtangent = (1.0 / (v * v)) * (v * Vec2{-a * c, -b * s} - dv * Vec2{-a * s, b * c});
        const double scale = 1.0 / tab.perimeter;
        return {center_ + scale * Vec2{a * c, b * s}, tangent, (tab.perimeter / v) * dtangent};
    }
    }
    return {};
}

std::string CurveDef::describe() const
{
    switch (kind_) {
    case CurveKind::circle:
        return fmt::format("circle:{},{}", center_.x, center_.y);
    case CurveKind::analytic_oval:
        return fmt::format("oval:{},{},{},{}", axis_a_, axis_b_, center_.x, center_.y);
    case CurveKind::native_ellipse:
        return fmt::format("native-ellipse:{},{},{},{}", axis_a_, axis_b_, center_.x, center_.y);
    }
    return {};
}

void CurveDef::scan_curvature()
{
    curvature_min_ = INFINITY;
    curvature_max_ = 0.0;
    for (std::size_t j = 0; j < kCurvatureScan; ++j) {
        const double k = norm(jet_unreduced(static_cast<double>(j) / kCurvatureScan).acc);
        curvature_min_ = std::min(curvature_min_, k);
        curvature_max_ = std::max(curvature_max_, k);
    }
}

CurveDef make_circle(Vec2 center)
{
    CurveDef c;
    c.kind_ = CurveKind::circle;
    c.center_ = center;
    c.axis_a_ = c.axis_b_ = 1.0 / kTwoPi;
    c.curvature_min_ = c.curvature_max_ = kTwoPi;
    return c;
}

namespace {

std::shared_ptr<CurveDef::OvalTable> ellipse_perimeter(double a, double b)
{
    if (!(a > 0.0 && b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw InvalidArgument("oval: semi-axes must be positive and finite");
    }
    auto tab = std::make_shared<CurveDef::OvalTable>();
    tab->a = a;
    tab->b = b;
    tab->perimeter = quad::adaptive_integrate([&](double s) { return tab->speed(s); }, 0.0, kTwoPi,
                                              1e-14 * (a + b));
    return tab;
}

}  // namespace

CurveDef make_analytic_oval(double a, double b, Vec2 center)
{
    if (a == b) throw InvalidArgument("oval: A == B is a circle; use make_circle");
    auto tab = ellipse_perimeter(a, b);
    if (2.0 * std::max(a, b) / tab->perimeter >= 1.0) {
        throw InvalidArgument("oval: rescaled curve does not fit in the fundamental domain");
    }

    const std::size_t K = kReparamKnots;
    const double step = tab->perimeter / static_cast<double>(K);
    tab->knots.assign(K + 1, 0.0);
    for (std::size_t i = 1; i < K; ++i) {
        const double s0 = tab->knots[i - 1];
        const double guess = s0 + step / tab->speed(s0);
        // Speed is at least min(a, b), bounding the step in sigma.
        tab->knots[i] = tab->solve(s0, step, guess, s0, s0 + step / std::min(a, b));
    }
    const double last = tab->arc(tab->knots[K - 1], kTwoPi);
    if (std::abs(last - step) > kTolReparam * tab->perimeter) {
        throw NumericError("analytic_oval: reparametrization failed to close");
    }
    tab->knots[K] = kTwoPi;

    CurveDef c;
    c.kind_ = CurveKind::analytic_oval;
    c.center_ = center;
    c.axis_a_ = a;
    c.axis_b_ = b;
    c.oval_ = std::move(tab);
    c.scan_curvature();
    return c;
}

CurveDef make_native_ellipse(double a, double b, Vec2 center)
{
    CurveDef c;
    c.kind_ = CurveKind::native_ellipse;
    c.center_ = center;
    c.axis_a_ = a;
    c.axis_b_ = b;
    c.oval_ = ellipse_perimeter(a, b);
    c.scan_curvature();
    return c;
}

Vec2 curve_eval(const CurveDef& curve, double t, int order)
{
    const CurveJet j = curve.jet(t);
    switch (order) {
    case 0: return j.pos;
    case 1: return j.vel;
    case 2: return j.acc;
    default: throw InvalidArgument("curve_eval: order must be 0, 1 or 2");
    }
}

CurveValidation validate_curve(const CurveDef& curve, std::size_t grid_size)
{
    if (grid_size < 1000) throw InvalidArgument("validate_curve: grid_size must be at least 1000");
    CurveValidation r;
    r.grid_size = grid_size;
    r.curvature_min = INFINITY;
    for (std::size_t j = 0; j < grid_size; ++j) {
        const CurveJet jt = curve.jet_unreduced(static_cast<double>(j) / static_cast<double>(grid_size));
        r.max_unit_speed_defect = std::max(r.max_unit_speed_defect, std::abs(norm(jt.vel) - 1.0));
        const double k = norm(jt.acc);
        r.curvature_min = std::min(r.curvature_min, k);
        r.curvature_max = std::max(r.curvature_max, k);
    }
    const CurveJet start = curve.jet_unreduced(0.0);
    const CurveJet end = curve.jet_unreduced(1.0);
    r.closure_defect = norm(end.pos - start.pos);
    r.closure_defect_d1 = norm(end.vel - start.vel);
    r.passed = r.max_unit_speed_defect <= kTolUnitSpeed && r.curvature_min > 0.0 &&
               r.closure_defect <= kTolUnitSpeed && r.closure_defect_d1 <= kTolUnitSpeed;
    return r;
}

namespace {

std::vector<double> parse_numbers(std::string_view body, std::string_view text)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        const std::size_t comma = std::min(body.find(',', pos), body.size());
        const std::string_view field = body.substr(pos, comma - pos);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty() || !std::isfinite(v)) {
            throw InvalidArgument(fmt::format("bad curve description '{}'", text));
        }
        out.push_back(v);
        pos = comma + 1;
    }
    return out;
}

}  // namespace

CurveDef parse_curve(std::string_view text)
{
    const std::size_t colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw InvalidArgument(fmt::format("bad curve description '{}' (expected circle:cx,cy or oval:A,B,cx,cy)", text));
    }
    const std::string_view kind = text.substr(0, colon);
    const auto v = parse_numbers(text.substr(colon + 1), text);
    if (kind == "circle" && v.size() == 2) return make_circle({v[0], v[1]});
    if (kind == "oval" && v.size() == 4) return make_analytic_oval(v[0], v[1], {v[2], v[3]});
    throw InvalidArgument(fmt::format("bad curve description '{}' (expected circle:cx,cy or oval:A,B,cx,cy)", text));
}

}  // namespace torwave

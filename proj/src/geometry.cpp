#include "scatter/geometry.hpp"

#include <cmath>
#include <utility>

namespace scatter::geometry {

namespace {

// Radial shapes r(t)*(cos t, sin t) share the same derivative pattern:
//   p'  = r' e + r e',   p'' = (r'' - r) e + 2 r' e',
// with e = (cos t, sin t).
ParametricCurve radial_curve(std::function<std::array<double, 3>(double)> radial,
                             std::string label, const Vec2& center) {
    auto point = [center, radial](double t) {
        auto [r, dr, ddr] = radial(t);
        return Vec2(center.x() + r * std::cos(t), center.y() + r * std::sin(t));
    };
    auto tangent = [radial](double t) {
        auto [r, dr, ddr] = radial(t);
        double c = std::cos(t), s = std::sin(t);
        return Vec2(dr * c - r * s, dr * s + r * c);
    };
    auto second = [radial](double t) {
        auto [r, dr, ddr] = radial(t);
        double c = std::cos(t), s = std::sin(t);
        return Vec2((ddr - r) * c - 2.0 * dr * s, (ddr - r) * s + 2.0 * dr * c);
    };
    return {std::move(point), std::move(tangent), std::move(second),
            std::move(label), center};
}

void check_regular(const ParametricCurve& curve) {
    for (int i = 0; i < 256; ++i) {
        double t = kTwoPi * i / 256.0;
        if (!(curve.jacobian(t) > 1e-12))
            throw std::domain_error("make_shape: degenerate tangent on '" +
                                    curve.label() + "'");
    }
}

}  // namespace

ParametricCurve::ParametricCurve(Fn point, Fn tangent, Fn second_derivative,
                                 std::string label, Vec2 center)
    : point_(std::move(point)),
      tangent_(std::move(tangent)),
      second_(std::move(second_derivative)),
      label_(std::move(label)),
      center_(std::move(center)) {}

ShapeKind shape_kind_from_name(const std::string& name) {
    if (name == "circle") return ShapeKind::Circle;
    if (name == "apple") return ShapeKind::Apple;
    if (name == "kite") return ShapeKind::Kite;
    if (name == "peanut") return ShapeKind::Peanut;
    if (name == "rounded-square") return ShapeKind::RoundedSquare;
    if (name == "rounded-triangle") return ShapeKind::RoundedTriangle;
    throw ConfigError("unknown shape kind '" + name + "'");
}

std::string shape_kind_name(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::Circle: return "circle";
        case ShapeKind::Apple: return "apple";
        case ShapeKind::Kite: return "kite";
        case ShapeKind::Peanut: return "peanut";
        case ShapeKind::RoundedSquare: return "rounded-square";
        case ShapeKind::RoundedTriangle: return "rounded-triangle";
    }
    throw ConfigError("unknown shape kind");
}

ParametricCurve make_shape(ShapeKind kind, const Vec2& center, double radius) {
    switch (kind) {
        case ShapeKind::Circle: {
            if (!(radius > 0.0))
                throw std::domain_error("make_shape: circle radius must be positive");
            auto point = [center, radius](double t) {
                return Vec2(center.x() + radius * std::cos(t),
                            center.y() + radius * std::sin(t));
            };
            auto tangent = [radius](double t) {
                return Vec2(-radius * std::sin(t), radius * std::cos(t));
            };
            auto second = [radius](double t) {
                return Vec2(-radius * std::cos(t), -radius * std::sin(t));
            };
            return {point, tangent, second, "circle", center};
        }
        case ShapeKind::Apple: {
            auto radial = [](double t) -> std::array<double, 3> {
                double u = 0.5 + 0.4 * std::cos(t) + 0.1 * std::sin(2.0 * t);
                double du = -0.4 * std::sin(t) + 0.2 * std::cos(2.0 * t);
                double ddu = -0.4 * std::cos(t) - 0.4 * std::sin(2.0 * t);
                double v = 1.0 + 0.7 * std::cos(t);
                double dv = -0.7 * std::sin(t);
                double ddv = -0.7 * std::cos(t);
                double r = u / v;
                double dr = (du * v - u * dv) / (v * v);
                double ddr = (ddu * v - u * ddv) / (v * v) - 2.0 * dv * dr / v;
                return {r, dr, ddr};
            };
            auto c = radial_curve(radial, "apple", center);
            check_regular(c);
            return c;
        }
        case ShapeKind::Kite: {
            auto point = [center](double t) {
                return Vec2(center.x() + std::cos(t) + 0.65 * std::cos(2.0 * t) - 0.65,
                            center.y() + 1.5 * std::sin(t));
            };
            auto tangent = [](double t) {
                return Vec2(-std::sin(t) - 1.3 * std::sin(2.0 * t), 1.5 * std::cos(t));
            };
            auto second = [](double t) {
                return Vec2(-std::cos(t) - 2.6 * std::cos(2.0 * t), -1.5 * std::sin(t));
            };
            auto c = ParametricCurve(point, tangent, second, "kite", center);
            check_regular(c);
            return c;
        }
        case ShapeKind::Peanut: {
            auto radial = [](double t) -> std::array<double, 3> {
                // cos^2 t + 0.25 sin^2 t = 0.625 + 0.375 cos 2t
                double w = 0.625 + 0.375 * std::cos(2.0 * t);
                double dw = -0.75 * std::sin(2.0 * t);
                double ddw = -1.5 * std::cos(2.0 * t);
                double r = std::sqrt(w);
                double dr = 0.5 * dw / r;
                double ddr = 0.5 * ddw / r - 0.25 * dw * dw / (w * r);
                return {r, dr, ddr};
            };
            auto c = radial_curve(radial, "peanut", center);
            check_regular(c);
            return c;
        }
        case ShapeKind::RoundedSquare: {
            auto point = [center](double t) {
                double c3 = std::cos(t), s3 = std::sin(t);
                return Vec2(center.x() + 1.5 * (c3 * c3 * c3 + c3),
                            center.y() + 1.5 * (s3 * s3 * s3 + s3));
            };
            auto tangent = [](double t) {
                double c = std::cos(t), s = std::sin(t);
                return Vec2(-1.5 * s * (3.0 * c * c + 1.0), 1.5 * c * (3.0 * s * s + 1.0));
            };
            auto second = [](double t) {
                double c = std::cos(t), s = std::sin(t);
                return Vec2(-1.5 * c * (3.0 * c * c - 6.0 * s * s + 1.0),
                            1.5 * s * (6.0 * c * c - 3.0 * s * s - 1.0));
            };
            auto c = ParametricCurve(point, tangent, second, "rounded-square", center);
            check_regular(c);
            return c;
        }
        case ShapeKind::RoundedTriangle: {
            auto radial = [](double t) -> std::array<double, 3> {
                return {2.0 + 0.3 * std::cos(3.0 * t), -0.9 * std::sin(3.0 * t),
                        -2.7 * std::cos(3.0 * t)};
            };
            auto c = radial_curve(radial, "rounded-triangle", center);
            check_regular(c);
            return c;
        }
    }
    throw ConfigError("make_shape: unknown kind");
}

ParametricCurve reflect_through(const ParametricCurve& curve, const Vec2& z0) {
    Vec2 shift = 2.0 * z0;
    auto point = [curve, shift](double t) { return Vec2(shift - curve.point(t)); };
    auto tangent = [curve](double t) { return Vec2(-curve.tangent(t)); };
    auto second = [curve](double t) { return Vec2(-curve.second_derivative(t)); };
    return {point, tangent, second, curve.label() + "-reflected",
            Vec2(shift - curve.center())};
}

DirectionSet uniform_directions(int count) {
    if (count < 1) throw std::domain_error("uniform_directions: count must be >= 1");
    return DirectionSet{count};
}

SamplingGrid make_grid(double ax, double bx, double ay, double by, int nx, int ny) {
    if (!(bx > ax) || !(by > ay))
        throw std::domain_error("make_grid: degenerate rectangle");
    if (nx < 2 || ny < 2)
        throw std::domain_error("make_grid: need at least 2 points per axis");
    return SamplingGrid{ax, bx, ay, by, nx, ny};
}

}  // namespace scatter::geometry

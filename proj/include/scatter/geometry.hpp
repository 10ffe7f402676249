#ifndef SCATTER_GEOMETRY_HPP
#define SCATTER_GEOMETRY_HPP

#include <string>

#include "scatter/common.hpp"

namespace scatter::geometry {

// Smooth closed boundary curve, 2*pi-periodic and counterclockwise, with
// analytic first and second parameter derivatives. The outward unit normal
// is the tangent rotated clockwise by pi/2.
class ParametricCurve {
public:
    using Fn = std::function<Vec2(double)>;

    ParametricCurve(Fn point, Fn tangent, Fn second_derivative,
                    std::string label, Vec2 center);

    Vec2 point(double t) const { return point_(t); }
    Vec2 tangent(double t) const { return tangent_(t); }
    Vec2 second_derivative(double t) const { return second_(t); }

    double jacobian(double t) const { return tangent_(t).norm(); }
    Vec2 outward_normal(double t) const {
        Vec2 d = tangent_(t);
        return Vec2(d.y(), -d.x()) / d.norm();
    }

    const std::string& label() const { return label_; }
    const Vec2& center() const { return center_; }

private:
    Fn point_, tangent_, second_;
    std::string label_;
    Vec2 center_;
};

enum class ShapeKind { Circle, Apple, Kite, Peanut, RoundedSquare, RoundedTriangle };

ShapeKind shape_kind_from_name(const std::string& name);  // kebab-case names
std::string shape_kind_name(ShapeKind kind);

// Builds one of the catalogued boundary shapes. `radius` applies to the
// circle only; the other shapes have fixed parametrizations.
ParametricCurve make_shape(ShapeKind kind, const Vec2& center, double radius = 1.0);

// Central symmetry through z0: x -> 2 z0 - x. A point reflection is a
// rotation by pi, so orientation and the outward-normal convention survive.
ParametricCurve reflect_through(const ParametricCurve& curve, const Vec2& z0);

struct DirectionSet {
    int count = 0;
    double angle(int j) const { return kTwoPi * j / count; }
    Vec2 direction(int j) const {
        double a = angle(j);
        return {std::cos(a), std::sin(a)};
    }
};

DirectionSet uniform_directions(int count);

// Row-major rectangular lattice, corners included; index = iy*nx + ix.
struct SamplingGrid {
    double ax = 0, bx = 0, ay = 0, by = 0;
    int nx = 0, ny = 0;

    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    double dx() const { return (bx - ax) / (nx - 1); }
    double dy() const { return (by - ay) / (ny - 1); }
    Vec2 point(int ix, int iy) const {
        return {ax + ix * dx(), ay + iy * dy()};
    }
    Vec2 point(std::size_t flat) const {
        return point(static_cast<int>(flat % nx), static_cast<int>(flat / nx));
    }
};

SamplingGrid make_grid(double ax, double bx, double ay, double by, int nx, int ny);

}  // namespace scatter::geometry

#endif

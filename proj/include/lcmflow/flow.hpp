#pragma once

#include "lcmflow/image.hpp"

#include <cmath>

namespace lcmflow {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};

/// Per-pixel displacement (u, v) in pixels.
struct FlowField {
    Image u;
    Image v;

    FlowField() = default;
    FlowField(int width, int height) : u(width, height), v(width, height) {}
    FlowField(Image u_, Image v_);

    static FlowField constant(int width, int height, double du, double dv);

    int width() const { return u.width(); }
    int height() const { return u.height(); }
    std::size_t size() const { return u.size(); }

    Vec2 at(int x, int y) const { return {u(x, y), v(x, y)}; }
    bool same_shape(const Image& img) const { return u.same_shape(img); }
    bool same_shape(const FlowField& o) const { return u.same_shape(o.u); }
    bool all_finite() const { return u.all_finite() && v.all_finite(); }
    double max_magnitude() const;

    bool operator==(const FlowField&) const = default;
};

/// Bicubic upsampling to a finer level; components are rescaled by the
/// per-axis size ratio.
FlowField resize_flow(const FlowField& w, int new_width, int new_height);

} // namespace lcmflow

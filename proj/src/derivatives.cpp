#include "lcmflow/derivatives.hpp"

#include "lcmflow/error.hpp"
#include "parallel_for.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lcmflow {

namespace {

void require_stencil_size(const Image& img) {
    if (img.width() < 5 || img.height() < 5)
        throw DimensionError("derivatives need at least 5x5 pixels, got " +
                             std::to_string(img.width()) + "x" + std::to_string(img.height()));
}

} // namespace

Image derivative_x(const Image& img) {
    require_stencil_size(img);
    Image out(img.width(), img.height());
    const int w = img.width();
    parallel_for_rows(img.height(), [&](int y) {
        for (int x = 0; x < w; ++x) {
            out(x, y) = (8.0 * (img.clamped(x + 1, y) - img.clamped(x - 1, y)) -
                         (img.clamped(x + 2, y) - img.clamped(x - 2, y))) /
                        12.0;
        }
    });
    return out;
}

Image derivative_y(const Image& img) {
    require_stencil_size(img);
    Image out(img.width(), img.height());
    const int w = img.width();
    parallel_for_rows(img.height(), [&](int y) {
        for (int x = 0; x < w; ++x) {
            out(x, y) = (8.0 * (img.clamped(x, y + 1) - img.clamped(x, y - 1)) -
                         (img.clamped(x, y + 2) - img.clamped(x, y - 2))) /
                        12.0;
        }
    });
    return out;
}

SpatialDerivatives spatial_derivatives(const Image& img) {
    SpatialDerivatives d;
    d.dx = derivative_x(img);
    d.dy = derivative_y(img);
    d.dxx = derivative_x(d.dx);
    d.dyy = derivative_y(d.dy);
    d.dxy = derivative_y(d.dx);
    return d;
}

FramePair::FramePair(Image first_, Image second_)
    : first(std::move(first_)), second(std::move(second_)) {
    if (!first.same_shape(second)) throw DimensionError("frame pair dimensions differ");
    first_d = spatial_derivatives(first);
    second_d = spatial_derivatives(second);
}

DerivativeSet warped_derivatives(const FramePair& pair, const FlowField& w) {
    if (!w.same_shape(pair.first))
        throw DimensionError("flow field does not match the image pair dimensions");
    const int width = pair.first.width();
    const int height = pair.first.height();
    DerivativeSet d{Image(width, height), Image(width, height), Image(width, height),
                    Image(width, height), Image(width, height), Image(width, height),
                    Image(width, height), Image(width, height)};
    const auto& s = pair.second_d;
    const auto& f = pair.first_d;
    parallel_for_rows(height, [&](int y) {
        for (int x = 0; x < width; ++x) {
            const double px = x + w.u(x, y);
            const double py = y + w.v(x, y);
            const double warped = sample_bicubic(pair.second, px, py);
            d.Ix(x, y) = sample_bicubic(s.dx, px, py);
            d.Iy(x, y) = sample_bicubic(s.dy, px, py);
            d.Ixx(x, y) = sample_bicubic(s.dxx, px, py);
            d.Iyy(x, y) = sample_bicubic(s.dyy, px, py);
            d.Ixy(x, y) = sample_bicubic(s.dxy, px, py);
            d.Iz(x, y) = warped - pair.first(x, y);
            d.Ixz(x, y) = d.Ix(x, y) - f.dx(x, y);
            d.Iyz(x, y) = d.Iy(x, y) - f.dy(x, y);
        }
    });
    return d;
}

DerivativeSet warped_derivatives(const Image& first, const Image& second, const FlowField& w) {
    if (!first.same_shape(second) || !w.same_shape(first))
        throw DimensionError("image pair and flow dimensions must agree");
    return warped_derivatives(FramePair(first, second), w);
}

} // namespace lcmflow

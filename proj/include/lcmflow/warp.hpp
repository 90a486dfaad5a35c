#pragma once

#include "lcmflow/flow.hpp"
#include "lcmflow/image.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace lcmflow {

struct WarpResult {
    Image image;
    /// 1 where X + w(X) fell outside [0,W-1] x [0,H-1].
    std::vector<std::uint8_t> oob_mask;
};

/// out(X) = src(X + w(X)), bicubic with border clamp.
WarpResult inverse_warp(const Image& src, const FlowField& w);

struct InterpolatedFrame {
    Image image;
    /// 1 where no source pixel splatted and the flow was filled from the
    /// nearest splatted pixel.
    std::vector<std::uint8_t> hole_mask;
};

/// Flow forward-splatted to time t. Collisions keep the source whose landing
/// point is nearest to the pixel center (smaller source index on ties); holes
/// take the value of the nearest splatted pixel (4-connected breadth-first).
FlowField splat_flow(const FlowField& w, double t, std::vector<std::uint8_t>* hole_mask = nullptr);

/// Frame at time t in [0,1] between first (t=0) and second (t=1):
/// (1-t) * first(X - t w_t) + t * second(X + (1-t) w_t).
InterpolatedFrame interpolate_middle_frame(const Image& first, const Image& second,
                                           const FlowField& w, double t = 0.5);

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; // interleaved RGB

    std::array<std::uint8_t, 3> at(int x, int y) const {
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
        return {data[i], data[i + 1], data[i + 2]};
    }
    bool operator==(const RgbImage&) const = default;
};

/// Number of hues in the standard optical flow color wheel.
int color_wheel_size();
/// Wheel entry k as RGB in [0,255].
std::array<int, 3> color_wheel_entry(int k);

/// Standard optical flow coloring: hue from direction, saturation from
/// |w| / max_rad (values beyond 1 are darkened). max_rad <= 0 selects the
/// field's maximum magnitude.
RgbImage flow_to_color(const FlowField& w, double max_rad = 0.0);

} // namespace lcmflow

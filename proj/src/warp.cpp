#include "lcmflow/warp.hpp"

#include "lcmflow/error.hpp"
#include "parallel_for.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

namespace lcmflow {

WarpResult inverse_warp(const Image& src, const FlowField& w) {
    if (!w.same_shape(src)) throw DimensionError("inverse_warp: flow and image differ in size");
    const int width = src.width();
    const int height = src.height();
    WarpResult out{Image(width, height), std::vector<std::uint8_t>(src.size(), 0)};
    parallel_for_rows(height, [&](int y) {
        for (int x = 0; x < width; ++x) {
            const double px = x + w.u(x, y);
            const double py = y + w.v(x, y);
            out.image(x, y) = sample_bicubic(src, px, py);
            if (px < 0.0 || py < 0.0 || px > width - 1 || py > height - 1)
                out.oob_mask[static_cast<std::size_t>(y) * width + x] = 1;
        }
    });
    return out;
}

FlowField splat_flow(const FlowField& w, double t, std::vector<std::uint8_t>* hole_mask) {
    const int width = w.width();
    const int height = w.height();
    const std::size_t n = w.size();
    FlowField out(width, height);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::uint8_t> filled(n, 0);

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double tx = x + t * w.u(x, y);
            const double ty = y + t * w.v(x, y);
            const long px = std::lround(tx);
            const long py = std::lround(ty);
            if (px < 0 || py < 0 || px >= width || py >= height) continue;
            const std::size_t j = static_cast<std::size_t>(py) * width + px;
            const double d2 = (tx - px) * (tx - px) + (ty - py) * (ty - py);
            if (d2 < best[j]) {
                best[j] = d2;
                filled[j] = 1;
                out.u[j] = w.u(x, y);
                out.v[j] = w.v(x, y);
            }
        }
    }

    if (hole_mask) {
        hole_mask->assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) (*hole_mask)[i] = filled[i] ? 0 : 1;
    }

    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < n; ++i)
        if (filled[i]) queue.push_back(i);
    if (queue.empty()) return out; // nothing landed: zero flow
    while (!queue.empty()) {
        const std::size_t i = queue.front();
        queue.pop_front();
        const int x = static_cast<int>(i % width);
        const int y = static_cast<int>(i / width);
        const int nx[4] = {x - 1, x + 1, x, x};
        const int ny[4] = {y, y, y - 1, y + 1};
        for (int k = 0; k < 4; ++k) {
            if (nx[k] < 0 || ny[k] < 0 || nx[k] >= width || ny[k] >= height) continue;
            const std::size_t j = static_cast<std::size_t>(ny[k]) * width + nx[k];
            if (filled[j]) continue;
            filled[j] = 1;
            out.u[j] = out.u[i];
            out.v[j] = out.v[i];
            queue.push_back(j);
        }
    }
    return out;
}

InterpolatedFrame interpolate_middle_frame(const Image& first, const Image& second,
                                           const FlowField& w, double t) {
    if (!first.same_shape(second) || !w.same_shape(first))
        throw DimensionError("interpolate_middle_frame: inputs differ in size");
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("interpolation time must lie in [0,1]");
    InterpolatedFrame out;
    const FlowField wt = splat_flow(w, t, &out.hole_mask);
    const int width = first.width();
    const int height = first.height();
    out.image = Image(width, height);
    parallel_for_rows(height, [&](int y) {
        for (int x = 0; x < width; ++x) {
            const double u = wt.u(x, y);
            const double v = wt.v(x, y);
            const double a = sample_bicubic(first, x - t * u, y - t * v);
            const double b = sample_bicubic(second, x + (1.0 - t) * u, y + (1.0 - t) * v);
            out.image(x, y) = (1.0 - t) * a + t * b;
        }
    });
    return out;
}

namespace {

constexpr int kRY = 15, kYG = 6, kGC = 4, kCB = 11, kBM = 13, kMR = 6;
constexpr int kWheelSize = kRY + kYG + kGC + kCB + kBM + kMR;

std::array<std::array<int, 3>, kWheelSize> make_wheel() {
    std::array<std::array<int, 3>, kWheelSize> wheel{};
    int k = 0;
    for (int i = 0; i < kRY; ++i) wheel[k++] = {255, 255 * i / kRY, 0};
    for (int i = 0; i < kYG; ++i) wheel[k++] = {255 - 255 * i / kYG, 255, 0};
    for (int i = 0; i < kGC; ++i) wheel[k++] = {0, 255, 255 * i / kGC};
    for (int i = 0; i < kCB; ++i) wheel[k++] = {0, 255 - 255 * i / kCB, 255};
    for (int i = 0; i < kBM; ++i) wheel[k++] = {255 * i / kBM, 0, 255};
    for (int i = 0; i < kMR; ++i) wheel[k++] = {255, 0, 255 - 255 * i / kMR};
    return wheel;
}

const auto kWheel = make_wheel();

std::array<std::uint8_t, 3> wheel_color(double fx, double fy) {
    const double rad = std::sqrt(fx * fx + fy * fy);
    const double a = std::atan2(-fy, -fx) / std::numbers::pi;
    const double fk = (a + 1.0) / 2.0 * (kWheelSize - 1);
    const int k0 = static_cast<int>(fk);
    const int k1 = (k0 + 1) % kWheelSize;
    const double f = fk - k0;
    std::array<std::uint8_t, 3> pix{};
    for (int b = 0; b < 3; ++b) {
        const double c0 = kWheel[k0][b] / 255.0;
        const double c1 = kWheel[k1][b] / 255.0;
        double col = (1.0 - f) * c0 + f * c1;
        if (rad <= 1.0)
            col = 1.0 - rad * (1.0 - col);
        else
            col *= 0.75;
        pix[b] = static_cast<std::uint8_t>(255.0 * col);
    }
    return pix;
}

} // namespace

int color_wheel_size() { return kWheelSize; }

std::array<int, 3> color_wheel_entry(int k) { return kWheel.at(static_cast<std::size_t>(k)); }

RgbImage flow_to_color(const FlowField& w, double max_rad) {
    if (!w.all_finite()) throw NumericalError("flow_to_color: non-finite flow");
    if (max_rad <= 0.0) {
        max_rad = w.max_magnitude();
        if (max_rad == 0.0) max_rad = 1.0;
    }
    RgbImage out{w.width(), w.height(), std::vector<std::uint8_t>(3 * w.size())};
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto pix = wheel_color(w.u[i] / max_rad, w.v[i] / max_rad);
        out.data[3 * i] = pix[0];
        out.data[3 * i + 1] = pix[1];
        out.data[3 * i + 2] = pix[2];
    }
    return out;
}

} // namespace lcmflow

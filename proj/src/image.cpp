#include "lcmflow/image.hpp"

#include "lcmflow/error.hpp"
#include "parallel_for.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace lcmflow {

Image::Image(int width, int height, double fill) : width_(width), height_(height) {
    if (width < 1 || height < 1)
        throw DimensionError("image dimensions must be positive, got " + std::to_string(width) +
                             "x" + std::to_string(height));
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Image::Image(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (width < 1 || height < 1)
        throw DimensionError("image dimensions must be positive");
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw DimensionError("image data length does not match " + std::to_string(width) + "x" +
                             std::to_string(height));
}

double Image::clamped(int x, int y) const {
    x = std::clamp(x, 0, width_ - 1);
    y = std::clamp(y, 0, height_ - 1);
    return data_[index(x, y)];
}

bool Image::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Image to_grayscale(const Raster& raster) {
    if (raster.width < 1 || raster.height < 1 || raster.data.empty())
        throw FormatError("empty raster");
    const std::size_t n = static_cast<std::size_t>(raster.width) * raster.height;
    if (raster.channels != 1 && raster.channels != 3)
        throw FormatError("unsupported channel count " + std::to_string(raster.channels));
    if (raster.data.size() != n * raster.channels)
        throw DimensionError("raster data length does not match its dimensions");

    Image out(raster.width, raster.height);
    if (raster.channels == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = raster.data[i];
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double* p = &raster.data[3 * i];
            out[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
        }
    }
    return out;
}

namespace {

// Catmull-Rom weights for taps at -1, 0, 1, 2 relative to floor(x).
// At t == 0 the weights are exactly (0, 1, 0, 0).
std::array<double, 4> cubic_weights(double t) {
    return {((-0.5 * t + 1.0) * t - 0.5) * t,
            ((1.5 * t - 2.5) * t) * t + 1.0,
            ((-1.5 * t + 2.0) * t + 0.5) * t,
            ((0.5 * t - 0.5) * t) * t};
}

} // namespace

double sample_bicubic(const Image& img, double x, double y) {
    const int w = img.width();
    const int h = img.height();
    x = std::clamp(x, 0.0, static_cast<double>(w - 1));
    y = std::clamp(y, 0.0, static_cast<double>(h - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const auto wx = cubic_weights(x - x0);
    const auto wy = cubic_weights(y - y0);

    std::array<int, 4> xs{};
    for (int k = 0; k < 4; ++k) xs[k] = std::clamp(x0 - 1 + k, 0, w - 1);

    double acc = 0.0;
    for (int j = 0; j < 4; ++j) {
        const int yy = std::clamp(y0 - 1 + j, 0, h - 1);
        double row = 0.0;
        for (int k = 0; k < 4; ++k) row += wx[k] * img(xs[k], yy);
        acc += wy[j] * row;
    }
    return acc;
}

Image gaussian_blur(const Image& img, double sigma) {
    if (!(sigma > 0.0)) return img;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    const int w = img.width();
    const int h = img.height();
    Image tmp(w, h);
    parallel_for_rows(h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * img.clamped(x + i, y);
            tmp(x, y) = acc;
        }
    });
    Image out(w, h);
    parallel_for_rows(h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * tmp.clamped(x, y + i);
            out(x, y) = acc;
        }
    });
    return out;
}

Image resize_bicubic(const Image& img, int new_width, int new_height) {
    Image out(new_width, new_height);
    const double sx = static_cast<double>(img.width()) / new_width;
    const double sy = static_cast<double>(img.height()) / new_height;
    parallel_for_rows(new_height, [&](int y) {
        const double src_y = (y + 0.5) * sy - 0.5;
        for (int x = 0; x < new_width; ++x) out(x, y) = sample_bicubic(img, (x + 0.5) * sx - 0.5, src_y);
    });
    return out;
}

} // namespace lcmflow

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lcmflow {

/// Single-channel floating point raster, row-major. Intensities loaded from
/// files are normalized to [0,1]; derived fields (derivatives, diffusivities)
/// reuse the same container without that range restriction.
class Image {
public:
    Image() = default;
    Image(int width, int height, double fill = 0.0);
    Image(int width, int height, std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(int x, int y) { return data_[index(x, y)]; }
    double operator()(int x, int y) const { return data_[index(x, y)]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    /// Pixel access with coordinates clamped to the border.
    double clamped(int x, int y) const;

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    bool same_shape(const Image& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }
    bool all_finite() const;

    bool operator==(const Image& other) const = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

using ScalarField = Image;

/// Interleaved multi-channel raster with values already scaled to [0,1].
struct Raster {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> data;
};

/// Luma conversion (0.299, 0.587, 0.114) for 3 channels, pass-through for 1.
/// Throws FormatError on any other channel count.
Image to_grayscale(const Raster& raster);

/// Catmull-Rom bicubic sample. Coordinates are clamped to [0,W-1]x[0,H-1].
double sample_bicubic(const Image& img, double x, double y);

/// Separable Gaussian blur with replicated borders. sigma <= 0 returns a copy.
Image gaussian_blur(const Image& img, double sigma);

/// Bicubic resampling to a new size using pixel-center alignment.
Image resize_bicubic(const Image& img, int new_width, int new_height);

} // namespace lcmflow

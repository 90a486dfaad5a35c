#pragma once

#include "lcmflow/image.hpp"

#include <utility>
#include <vector>

namespace lcmflow {

/// Coarse-to-fine image pyramid. levels[0] is the input image; each further
/// level is round(previous * scale_factor) in both dimensions.
struct ImagePyramid {
    std::vector<Image> levels;
    double scale_factor = 0.75;

    int level_count() const { return static_cast<int>(levels.size()); }
    const Image& finest() const { return levels.front(); }
    const Image& coarsest() const { return levels.back(); }
};

/// Dimensions of every level, finest first, stopping before a level would drop
/// below min_dim in either dimension. An input already below min_dim yields a
/// single level.
std::vector<std::pair<int, int>> pyramid_shape(int width, int height, double factor, int min_dim);

/// Anti-aliasing sigma applied before each downsampling step.
double pyramid_presmooth_sigma(double factor);

ImagePyramid build_pyramid(const Image& img, double factor, int min_dim);

} // namespace lcmflow

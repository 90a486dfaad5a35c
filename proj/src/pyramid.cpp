#include "lcmflow/pyramid.hpp"

#include "lcmflow/error.hpp"

#include <cmath>

namespace lcmflow {

namespace {

void check_factor(double factor, int min_dim) {
    if (!(factor > 0.0 && factor < 1.0)) throw ConfigError("pyramid factor must lie in (0,1)");
    if (min_dim < 8) throw ConfigError("pyramid min_dim must be at least 8");
}

} // namespace

std::vector<std::pair<int, int>> pyramid_shape(int width, int height, double factor, int min_dim) {
    check_factor(factor, min_dim);
    std::vector<std::pair<int, int>> dims{{width, height}};
    for (;;) {
        const auto [w, h] = dims.back();
        const int nw = static_cast<int>(std::lround(w * factor));
        const int nh = static_cast<int>(std::lround(h * factor));
        if (nw < min_dim || nh < min_dim) break;
        dims.emplace_back(nw, nh);
    }
    return dims;
}

double pyramid_presmooth_sigma(double factor) {
    return 0.5 * std::sqrt(1.0 / (factor * factor) - 1.0);
}

ImagePyramid build_pyramid(const Image& img, double factor, int min_dim) {
    const auto dims = pyramid_shape(img.width(), img.height(), factor, min_dim);
    const double sigma = pyramid_presmooth_sigma(factor);
    ImagePyramid pyr;
    pyr.scale_factor = factor;
    pyr.levels.reserve(dims.size());
    pyr.levels.push_back(img);
    for (std::size_t k = 1; k < dims.size(); ++k) {
        const Image smoothed = gaussian_blur(pyr.levels.back(), sigma);
        pyr.levels.push_back(resize_bicubic(smoothed, dims[k].first, dims[k].second));
    }
    return pyr;
}

} // namespace lcmflow

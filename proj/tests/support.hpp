#pragma once

#include "lcmflow/benchmark.hpp"
#include "lcmflow/flow.hpp"
#include "lcmflow/image.hpp"

#include <algorithm>
#include <cmath>

namespace lcmtest {

using lcmflow::FlowField;
using lcmflow::Image;
using lcmflow::Rng;

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline int uniform_int(Rng& rng, int lo, int hi) {
    return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

inline Image random_image(Rng& rng, int w, int h, double lo = 0.0, double hi = 1.0) {
    Image img(w, h);
    for (double& v : img.values()) v = uniform(rng, lo, hi);
    return img;
}

inline FlowField random_flow(Rng& rng, int w, int h, double amplitude) {
    return {random_image(rng, w, h, -amplitude, amplitude), random_image(rng, w, h, -amplitude, amplitude)};
}

inline double max_abs_diff(const Image& a, const Image& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const Image& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

// Maximum over pixels at least `margin` away from every border.
template <class F>
double interior_max(int w, int h, int margin, F&& f) {
    double m = 0.0;
    for (int y = margin; y < h - margin; ++y)
        for (int x = margin; x < w - margin; ++x) m = std::max(m, std::abs(f(x, y)));
    return m;
}

} // namespace lcmtest

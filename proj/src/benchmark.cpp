#include "lcmflow/benchmark.hpp"

#include "lcmflow/error.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>

namespace lcmflow {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
    // Rejection sampling keeps the result unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
        r = engine_();
    } while (r >= limit);
    return r % n;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return mag * std::cos(2.0 * std::numbers::pi * u2);
}

Degradation degradation_from_string(const std::string& name) {
    if (name == "occlusion") return Degradation::occlusion;
    if (name == "gaussian") return Degradation::gaussian;
    if (name == "saltpepper") return Degradation::salt_pepper;
    throw ConfigError("unknown degradation '" + name + "' (expected occlusion, gaussian or saltpepper)");
}

std::string to_string(Degradation kind) {
    switch (kind) {
    case Degradation::occlusion: return "occlusion";
    case Degradation::gaussian: return "gaussian";
    case Degradation::salt_pepper: return "saltpepper";
    }
    return "unknown";
}

std::pair<Vec2, Vec2> occluder_centers(int width, int height, int frame, int frame_count,
                                       const DegradationSettings& s) {
    const Vec2 center{(width - 1) / 2.0, (height - 1) / 2.0};
    const double orbit = s.orbit_fraction * std::min(width, height);
    const double angle = 2.0 * std::numbers::pi * frame / std::max(frame_count, 1);
    const Vec2 r{orbit * std::cos(angle), orbit * std::sin(angle)};
    return {center + r, center - r};
}

Image add_occlusion(const Image& img, int frame, int frame_count, const DegradationSettings& s) {
    Image out = img;
    const auto [a, b] = occluder_centers(img.width(), img.height(), frame, frame_count, s);
    const double r2 = s.disc_radius * s.disc_radius;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const Vec2 p{static_cast<double>(x), static_cast<double>(y)};
            if ((p - a).norm2() <= r2 || (p - b).norm2() <= r2) out(x, y) = 0.0;
        }
    return out;
}

Image add_gaussian_noise(const Image& img, Rng& rng, const DegradationSettings& s) {
    const auto [lo, hi] = std::minmax_element(img.values().begin(), img.values().end());
    const double sigma = s.gaussian_sigma * (*hi - *lo);
    Image out = img;
    for (double& v : out.values()) v = std::clamp(v + sigma * rng.normal(), 0.0, 1.0);
    return out;
}

Image add_salt_pepper(const Image& img, Rng& rng, const DegradationSettings& s) {
    Image out = img;
    const std::size_t n = img.size();
    const auto count = static_cast<std::size_t>(std::lround(s.salt_pepper_density * n));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Partial Fisher-Yates: the first `count` entries are a uniform sample.
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(idx[i], idx[j]);
        out[idx[i]] = rng.uniform() < 0.5 ? 0.0 : 1.0;
    }
    return out;
}

std::vector<Image> degrade_sequence(const std::vector<Image>& frames, Degradation kind,
                                    std::uint64_t seed, const DegradationSettings& s) {
    Rng rng(seed);
    std::vector<Image> out;
    out.reserve(frames.size());
    const int count = static_cast<int>(frames.size());
    for (int f = 0; f < count; ++f) {
        switch (kind) {
        case Degradation::occlusion: out.push_back(add_occlusion(frames[f], f, count, s)); break;
        case Degradation::gaussian: out.push_back(add_gaussian_noise(frames[f], rng, s)); break;
        case Degradation::salt_pepper: out.push_back(add_salt_pepper(frames[f], rng, s)); break;
        }
    }
    return out;
}

Image band_limited_noise(int width, int height, std::uint64_t seed, double sigma) {
    Rng rng(seed);
    Image noise(width, height);
    for (double& v : noise.values()) v = rng.uniform();
    Image smooth = gaussian_blur(noise, sigma);
    const auto [lo, hi] = std::minmax_element(smooth.values().begin(), smooth.values().end());
    const double lo_v = *lo;
    const double range = *hi - *lo;
    for (double& v : smooth.values()) v = range > 0.0 ? 0.05 + 0.9 * (v - lo_v) / range : 0.5;
    return smooth;
}

FlowField sinusoidal_flow(int width, int height, double amplitude) {
    FlowField w(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double phi = std::numbers::pi *
                               (static_cast<double>(x) / width +
                                0.5 * std::sin(2.0 * std::numbers::pi * y / height));
            w.u(x, y) = amplitude * std::cos(phi);
            w.v(x, y) = amplitude * std::sin(phi);
        }
    return w;
}

SyntheticSequence synth_sequence(int width, int height, double amplitude, int frames,
                                 std::uint64_t seed) {
    if (width < 64 || height < 64) throw ConfigError("synthetic sequences need at least 64x64 pixels");
    if (frames < 2) throw ConfigError("synthetic sequences need at least 2 frames");
    if (!(amplitude >= 0.0) || amplitude >= std::min(width, height) / 4.0)
        throw ConfigError("warp amplitude must lie in [0, min(W,H)/4)");

    // The texture canvas has a margin so X + w never leaves it.
    const int margin = static_cast<int>(std::ceil(amplitude)) + 4;
    const Image canvas = band_limited_noise(width + 2 * margin, height + 2 * margin, seed);
    const FlowField w = sinusoidal_flow(width, height, amplitude);

    SyntheticSequence seq;
    for (int k = 0; k < frames; ++k) {
        const double s = 1.0 - static_cast<double>(k) / (frames - 1);
        Image frame(width, height);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                frame(x, y) = sample_bicubic(canvas, x + margin + s * w.u(x, y),
                                             y + margin + s * w.v(x, y));
        seq.frames.push_back(std::move(frame));
        if (k + 1 < frames) {
            FlowField gt = w;
            for (double& u : gt.u.values()) u *= s;
            for (double& v : gt.v.values()) v *= s;
            seq.ground_truth.push_back(std::move(gt));
        }
    }
    return seq;
}

Image circular_shift(const Image& img, int dx, int dy) {
    const int w = img.width();
    const int h = img.height();
    Image out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out(x, y) = img(((x - dx) % w + w) % w, ((y - dy) % h + h) % h);
    return out;
}

} // namespace lcmflow

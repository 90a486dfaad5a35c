#pragma once

#include "lcmflow/flow.hpp"
#include "lcmflow/image.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace lcmflow {

/// Seeded generator with platform-independent conversions (the standard
/// distributions are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform();
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    double normal();

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

enum class Degradation { occlusion, gaussian, salt_pepper };

Degradation degradation_from_string(const std::string& name);
std::string to_string(Degradation kind);

struct DegradationSettings {
    double disc_radius = 20.0;       // occluder radius in pixels
    double orbit_fraction = 0.3;     // orbit radius as a fraction of min(W,H)
    double gaussian_sigma = 0.2;     // relative to the frame's intensity range
    double salt_pepper_density = 0.1;
};

/// Centers of the two occluding discs in frame `frame` of `frame_count`:
/// diametrically opposite points on a circle around the image center,
/// advancing 2*pi/frame_count per frame.
std::pair<Vec2, Vec2> occluder_centers(int width, int height, int frame, int frame_count,
                                       const DegradationSettings& s = {});

Image add_occlusion(const Image& img, int frame, int frame_count, const DegradationSettings& s = {});
/// Additive N(0, (sigma * range)^2) noise, clamped to [0,1].
Image add_gaussian_noise(const Image& img, Rng& rng, const DegradationSettings& s = {});
/// Sets exactly round(density * N) distinct pixels, each to 0 or 1 with equal odds.
Image add_salt_pepper(const Image& img, Rng& rng, const DegradationSettings& s = {});

/// Degrades every frame; one generator seeded with `seed` is consumed in
/// frame order.
std::vector<Image> degrade_sequence(const std::vector<Image>& frames, Degradation kind,
                                    std::uint64_t seed, const DegradationSettings& s = {});

/// Seeded white noise smoothed by a Gaussian of `sigma` pixels and
/// stretched to [0.05, 0.95].
Image band_limited_noise(int width, int height, std::uint64_t seed, double sigma = 2.0);

/// Smooth non-rigid field with |w| == amplitude everywhere:
/// w = amplitude * (cos phi, sin phi), phi = pi * (x/W + 0.5 sin(2 pi y / H)).
FlowField sinusoidal_flow(int width, int height, double amplitude);

/// Frames 0..frames-1 of a synthetic deforming texture and the exact flow
/// from each frame to the last one: frame_k(X) = T(X + s_k w(X)) with
/// s_k = 1 - k/(frames-1) and T the last frame, so gt_k = s_k * w.
struct SyntheticSequence {
    std::vector<Image> frames;
    std::vector<FlowField> ground_truth; // frames.size() - 1 entries
};

/// Throws ConfigError when width or height < 64, frames < 2, amplitude < 0
/// or amplitude >= min(W,H)/4.
SyntheticSequence synth_sequence(int width, int height, double amplitude, int frames,
                                 std::uint64_t seed);

/// Circular shift: out(x, y) = img((x - dx) mod W, (y - dy) mod H), so that
/// img(X) = out(X + (dx, dy)) away from the wrap seam.
Image circular_shift(const Image& img, int dx, int dy);

} // namespace lcmflow

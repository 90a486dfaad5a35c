#pragma once

#include "lcmflow/flow.hpp"
#include "lcmflow/image.hpp"

namespace lcmflow {

/// First derivative along x with the five-point stencil (1, -8, 0, 8, -1)/12,
/// borders replicated. Requires at least 5 pixels in each dimension.
Image derivative_x(const Image& img);
Image derivative_y(const Image& img);

/// First and second spatial derivatives of one image. Second derivatives are
/// repeated applications of the first-derivative stencil.
struct SpatialDerivatives {
    Image dx, dy, dxx, dyy, dxy;
};

SpatialDerivatives spatial_derivatives(const Image& img);

/// Linearization fields for the data term at the current flow estimate.
/// Spatial fields are the second image's derivatives sampled at X + w;
/// the z fields are residuals of the warped second image against the first.
struct DerivativeSet {
    Image Ix, Iy, Ixx, Iyy, Ixy;
    Image Iz, Ixz, Iyz;

    int width() const { return Ix.width(); }
    int height() const { return Ix.height(); }
};

/// Precomputed image pair at one pyramid level. Derivatives of both images are
/// evaluated once; warped_derivatives() then only resamples.
struct FramePair {
    FramePair(Image first, Image second);

    Image first;
    Image second;
    SpatialDerivatives first_d;
    SpatialDerivatives second_d;
};

DerivativeSet warped_derivatives(const FramePair& pair, const FlowField& w);

/// Convenience overload computing the spatial derivatives on the fly.
DerivativeSet warped_derivatives(const Image& first, const Image& second, const FlowField& w);

} // namespace lcmflow

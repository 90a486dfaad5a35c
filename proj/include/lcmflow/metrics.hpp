#pragma once

#include "lcmflow/flow.hpp"
#include "lcmflow/image.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lcmflow {

/// Per-pixel validity; an empty mask selects every pixel.
using PixelMask = std::vector<std::uint8_t>;

struct ErrorReport {
    double mean_epe = 0.0;
    double rms_epe = 0.0;
    double median_epe = 0.0;
    double percentile_99_epe = 0.0;
    double mean_angular_error_deg = 0.0;
    std::optional<double> interp_error_rms;
    std::optional<double> normalized_interp_error;
    std::size_t valid_pixel_count = 0;
};

/// Nearest-rank percentile (p in (0,100]) of an unsorted sample.
double percentile_nearest_rank(std::vector<double> values, double p);

/// Per-pixel |w - gt| over the mask, row-major order of the masked pixels.
std::vector<double> endpoint_errors(const FlowField& w, const FlowField& gt, const PixelMask& mask = {});

/// Mean, RMS, median and 99th percentile EPE. Throws ConfigError on an empty
/// selection.
ErrorReport endpoint_error(const FlowField& w, const FlowField& gt, const PixelMask& mask = {});

/// Mean angle in degrees between (u, v, 1) and (u', v', 1).
double angular_error(const FlowField& w, const FlowField& gt, const PixelMask& mask = {});

/// EPE statistics plus angular error.
ErrorReport evaluate_flow(const FlowField& w, const FlowField& gt, const PixelMask& mask = {});

/// RMS intensity difference. The normalized variant divides each squared
/// difference by (|grad gt|^2 + 1) with central-difference gradients.
double interpolation_error(const Image& predicted, const Image& truth, bool gradient_normalized);

std::string report_to_text(const ErrorReport& report);
std::string report_to_json(const ErrorReport& report);

} // namespace lcmflow

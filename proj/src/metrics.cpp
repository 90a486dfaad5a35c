#include "lcmflow/metrics.hpp"

#include "lcmflow/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace lcmflow {

namespace {

void check_inputs(const FlowField& w, const FlowField& gt, const PixelMask& mask) {
    if (!w.same_shape(gt)) throw DimensionError("flow and ground truth differ in size");
    if (!mask.empty() && mask.size() != w.size()) throw DimensionError("mask size mismatch");
}

bool selected(const PixelMask& mask, std::size_t i) { return mask.empty() || mask[i] != 0; }

} // namespace

double percentile_nearest_rank(std::vector<double> values, double p) {
    if (values.empty()) throw ConfigError("percentile of an empty sample");
    if (!(p > 0.0 && p <= 100.0)) throw ConfigError("percentile must lie in (0,100]");
    const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * values.size()));
    const std::size_t idx = std::clamp<std::size_t>(rank, 1, values.size()) - 1;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx), values.end());
    return values[idx];
}

std::vector<double> endpoint_errors(const FlowField& w, const FlowField& gt, const PixelMask& mask) {
    check_inputs(w, gt, mask);
    std::vector<double> out;
    out.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!selected(mask, i)) continue;
        out.push_back(std::hypot(w.u[i] - gt.u[i], w.v[i] - gt.v[i]));
    }
    return out;
}

ErrorReport endpoint_error(const FlowField& w, const FlowField& gt, const PixelMask& mask) {
    const std::vector<double> epe = endpoint_errors(w, gt, mask);
    if (epe.empty()) throw ConfigError("endpoint_error: mask selects no pixels");
    ErrorReport r;
    r.valid_pixel_count = epe.size();
    double sum = 0.0;
    double sum2 = 0.0;
    for (double e : epe) {
        sum += e;
        sum2 += e * e;
    }
    r.mean_epe = sum / epe.size();
    r.rms_epe = std::sqrt(sum2 / epe.size());
    r.median_epe = percentile_nearest_rank(epe, 50.0);
    r.percentile_99_epe = percentile_nearest_rank(epe, 99.0);
    return r;
}

double angular_error(const FlowField& w, const FlowField& gt, const PixelMask& mask) {
    check_inputs(w, gt, mask);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!selected(mask, i)) continue;
        const double u = w.u[i], v = w.v[i], gu = gt.u[i], gv = gt.v[i];
        const double num = u * gu + v * gv + 1.0;
        const double den = std::sqrt(u * u + v * v + 1.0) * std::sqrt(gu * gu + gv * gv + 1.0);
        sum += std::acos(std::clamp(num / den, -1.0, 1.0));
        ++count;
    }
    if (count == 0) throw ConfigError("angular_error: mask selects no pixels");
    return sum / count * 180.0 / std::numbers::pi;
}

ErrorReport evaluate_flow(const FlowField& w, const FlowField& gt, const PixelMask& mask) {
    ErrorReport r = endpoint_error(w, gt, mask);
    r.mean_angular_error_deg = angular_error(w, gt, mask);
    return r;
}

double interpolation_error(const Image& predicted, const Image& truth, bool gradient_normalized) {
    if (!predicted.same_shape(truth)) throw DimensionError("interpolation_error: frames differ in size");
    double sum = 0.0;
    for (int y = 0; y < truth.height(); ++y) {
        for (int x = 0; x < truth.width(); ++x) {
            const double d = predicted(x, y) - truth(x, y);
            double term = d * d;
            if (gradient_normalized) {
                const double gx = 0.5 * (truth.clamped(x + 1, y) - truth.clamped(x - 1, y));
                const double gy = 0.5 * (truth.clamped(x, y + 1) - truth.clamped(x, y - 1));
                term /= gx * gx + gy * gy + 1.0;
            }
            sum += term;
        }
    }
    return std::sqrt(sum / truth.size());
}

std::string report_to_text(const ErrorReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "valid_pixel_count " << r.valid_pixel_count << '\n'
       << "mean_epe " << r.mean_epe << '\n'
       << "rms_epe " << r.rms_epe << '\n'
       << "median_epe " << r.median_epe << '\n'
       << "percentile_99_epe " << r.percentile_99_epe << '\n'
       << "mean_angular_error_deg " << r.mean_angular_error_deg << '\n';
    if (r.interp_error_rms) os << "interp_error_rms " << *r.interp_error_rms << '\n';
    if (r.normalized_interp_error) os << "normalized_interp_error " << *r.normalized_interp_error << '\n';
    return os.str();
}

std::string report_to_json(const ErrorReport& r) {
    nlohmann::json j{{"valid_pixel_count", r.valid_pixel_count},
                     {"mean_epe", r.mean_epe},
                     {"rms_epe", r.rms_epe},
                     {"median_epe", r.median_epe},
                     {"percentile_99_epe", r.percentile_99_epe},
                     {"mean_angular_error_deg", r.mean_angular_error_deg}};
    if (r.interp_error_rms) j["interp_error_rms"] = *r.interp_error_rms;
    if (r.normalized_interp_error) j["normalized_interp_error"] = *r.normalized_interp_error;
    return j.dump(2);
}

} // namespace lcmflow

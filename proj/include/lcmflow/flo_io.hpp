#pragma once

#include "lcmflow/flow.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lcmflow {

/// Magic float of the .flo format; its little-endian bytes spell "PIEH".
inline constexpr float kFloMagic = 202021.25f;
/// Components with |value| above this threshold mark unknown flow.
inline constexpr double kFloUnknownThreshold = 1e9;
inline constexpr float kFloUnknownValue = 1e10f;

struct FloData {
    FlowField flow;
    /// 1 where the flow is known. Unknown pixels hold (0, 0) in `flow`.
    std::vector<std::uint8_t> known;

    bool all_known() const;
};

/// Parses .flo bytes: float magic, int32 width, int32 height, then
/// interleaved float32 (u, v) in row-major order, all little-endian.
/// Throws FormatError on bad magic, bad dimensions or truncation.
FloData decode_flo(std::string_view bytes);
FloData read_flo(const std::filesystem::path& path);

/// Encodes a field; pixels with known[i] == 0 are written as the unknown
/// sentinel. Throws NumericalError on non-finite known values.
std::string encode_flo(const FlowField& w, const std::vector<std::uint8_t>& known = {});
void write_flo(const FlowField& w, const std::filesystem::path& path,
               const std::vector<std::uint8_t>& known = {});

} // namespace lcmflow

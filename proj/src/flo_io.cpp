#include "lcmflow/flo_io.hpp"

#include "lcmflow/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace lcmflow {

namespace {

std::uint32_t load_le32(std::string_view bytes, std::size_t offset) {
    std::uint32_t v = 0;
    for (int b = 3; b >= 0; --b)
        v = (v << 8) | static_cast<std::uint8_t>(bytes[offset + static_cast<std::size_t>(b)]);
    return v;
}

void store_le32(std::string& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

} // namespace

bool FloData::all_known() const {
    return std::all_of(known.begin(), known.end(), [](std::uint8_t k) { return k != 0; });
}

FloData decode_flo(std::string_view bytes) {
    if (bytes.size() < 12) throw FormatError("flo: header truncated");
    const float magic = std::bit_cast<float>(load_le32(bytes, 0));
    if (magic != kFloMagic) throw FormatError("flo: bad magic (expected PIEH)");
    const auto width = static_cast<std::int32_t>(load_le32(bytes, 4));
    const auto height = static_cast<std::int32_t>(load_le32(bytes, 8));
    if (width < 1 || height < 1 || width > 100000 || height > 100000)
        throw FormatError("flo: invalid dimensions " + std::to_string(width) + "x" + std::to_string(height));
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() < 12 + n * 8) throw FormatError("flo: payload truncated");

    FloData data{FlowField(width, height), std::vector<std::uint8_t>(n, 1)};
    for (std::size_t i = 0; i < n; ++i) {
        const double u = std::bit_cast<float>(load_le32(bytes, 12 + 8 * i));
        const double v = std::bit_cast<float>(load_le32(bytes, 16 + 8 * i));
        const bool unknown = !std::isfinite(u) || !std::isfinite(v) ||
                             std::abs(u) > kFloUnknownThreshold || std::abs(v) > kFloUnknownThreshold;
        if (unknown) {
            data.known[i] = 0;
        } else {
            data.flow.u[i] = u;
            data.flow.v[i] = v;
        }
    }
    return data;
}

FloData read_flo(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_flo(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::string encode_flo(const FlowField& w, const std::vector<std::uint8_t>& known) {
    if (!known.empty() && known.size() != w.size()) throw DimensionError("flo: mask size mismatch");
    std::string out;
    out.reserve(12 + w.size() * 8);
    store_le32(out, std::bit_cast<std::uint32_t>(kFloMagic));
    store_le32(out, static_cast<std::uint32_t>(w.width()));
    store_le32(out, static_cast<std::uint32_t>(w.height()));
    for (std::size_t i = 0; i < w.size(); ++i) {
        float u = kFloUnknownValue;
        float v = kFloUnknownValue;
        if (known.empty() || known[i]) {
            if (!std::isfinite(w.u[i]) || !std::isfinite(w.v[i]))
                throw NumericalError("flo: non-finite flow at pixel " + std::to_string(i));
            u = static_cast<float>(w.u[i]);
            v = static_cast<float>(w.v[i]);
        }
        store_le32(out, std::bit_cast<std::uint32_t>(u));
        store_le32(out, std::bit_cast<std::uint32_t>(v));
    }
    return out;
}

void write_flo(const FlowField& w, const std::filesystem::path& path,
               const std::vector<std::uint8_t>& known) {
    const std::string bytes = encode_flo(w, known);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

} // namespace lcmflow

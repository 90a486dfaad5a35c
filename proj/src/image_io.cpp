#include "lcmflow/image_io.hpp"

#include "lcmflow/error.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

namespace lcmflow {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.string().c_str(), mode));
    if (!f) throw IoError("cannot open " + path.string());
    return f;
}

[[noreturn]] void png_error_fn(png_structp, png_const_charp msg) { throw FormatError(msg); }
void png_warning_fn(png_structp, png_const_charp) {}

Raster read_png(const std::filesystem::path& path) {
    FilePtr file = open_file(path, "rb");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    if (!png) throw FormatError("png: cannot allocate reader");
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* png;
        png_infop* info;
        ~Guard() { png_destroy_read_struct(png, info, nullptr); }
    } guard{&png, &info};

    png_init_io(png, file.get());
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS))
        throw FormatError(path.string() + ": alpha channels are not supported");
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (depth == 16) png_set_swap(png); // little-endian samples on read
    png_read_update_info(png, info);

    Raster r;
    r.width = static_cast<int>(png_get_image_width(png, info));
    r.height = static_cast<int>(png_get_image_height(png, info));
    r.channels = png_get_channels(png, info);
    const int out_depth = png_get_bit_depth(png, info);
    if (r.channels != 1 && r.channels != 3)
        throw FormatError(path.string() + ": unsupported channel count");
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    std::vector<png_byte> buffer(rowbytes * r.height);
    std::vector<png_bytep> rows(r.height);
    for (int y = 0; y < r.height; ++y) rows[y] = buffer.data() + rowbytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);

    const std::size_t samples = static_cast<std::size_t>(r.width) * r.height * r.channels;
    r.data.resize(samples);
    for (int y = 0; y < r.height; ++y) {
        const png_byte* row = rows[y];
        for (std::size_t s = 0; s < static_cast<std::size_t>(r.width) * r.channels; ++s) {
            const std::size_t dst = static_cast<std::size_t>(y) * r.width * r.channels + s;
            if (out_depth == 16)
                r.data[dst] = (row[2 * s] | (row[2 * s + 1] << 8)) / 65535.0;
            else
                r.data[dst] = row[s] / 255.0;
        }
    }
    return r;
}

// Tokenizer for PNM headers (handles comments).
class PnmReader {
public:
    explicit PnmReader(std::string bytes) : bytes_(std::move(bytes)) {}

    long next_int() {
        skip_space();
        if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_])))
            throw FormatError("pnm: malformed header");
        long v = 0;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            v = v * 10 + (bytes_[pos_] - '0');
            if (v > 1'000'000'000) throw FormatError("pnm: value out of range");
            ++pos_;
        }
        return v;
    }

    void skip_single_space() {
        if (pos_ < bytes_.size()) ++pos_;
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }
    unsigned char byte(std::size_t i) const { return static_cast<unsigned char>(bytes_[pos_ + i]); }

private:
    void skip_space() {
        while (pos_ < bytes_.size()) {
            if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::string bytes_;
    std::size_t pos_ = 2;
};

Raster read_pnm(const std::filesystem::path& path, const std::string& bytes) {
    const char kind = bytes[1];
    const bool ascii = kind == '2' || kind == '3';
    Raster r;
    r.channels = (kind == '3' || kind == '6') ? 3 : 1;
    PnmReader rd(bytes);
    r.width = static_cast<int>(rd.next_int());
    r.height = static_cast<int>(rd.next_int());
    const long maxval = rd.next_int();
    if (r.width < 1 || r.height < 1) throw FormatError(path.string() + ": invalid dimensions");
    if (maxval < 1 || maxval > 65535) throw FormatError(path.string() + ": invalid maxval");
    const std::size_t samples = static_cast<std::size_t>(r.width) * r.height * r.channels;
    r.data.resize(samples);
    if (ascii) {
        for (std::size_t i = 0; i < samples; ++i) r.data[i] = static_cast<double>(rd.next_int()) / maxval;
    } else {
        rd.skip_single_space();
        const std::size_t bps = maxval > 255 ? 2 : 1;
        if (rd.remaining() < samples * bps) throw FormatError(path.string() + ": truncated pixel data");
        for (std::size_t i = 0; i < samples; ++i) {
            const unsigned v = bps == 2 ? (rd.byte(2 * i) << 8) | rd.byte(2 * i + 1) : rd.byte(i);
            r.data[i] = static_cast<double>(v) / maxval;
        }
    }
    return r;
}

std::uint16_t quantize(double v, double maxval) {
    return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * maxval));
}

void write_png_rows(const std::filesystem::path& path, int width, int height, int color_type,
                    int bit_depth, const std::vector<png_byte>& buffer, std::size_t rowbytes) {
    FilePtr file = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    if (!png) throw IoError("png: cannot allocate writer");
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* png;
        png_infop* info;
        ~Guard() { png_destroy_write_struct(png, info); }
    } guard{&png, &info};
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
                 color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y)
        png_write_row(png, const_cast<png_bytep>(buffer.data() + rowbytes * y));
    png_write_end(png, nullptr);
}

} // namespace

Raster read_raster(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0)
        return read_png(path);
    if (bytes.size() >= 3 && bytes[0] == 'P' && std::string("2356").find(bytes[1]) != std::string::npos)
        return read_pnm(path, bytes);
    throw FormatError(path.string() + ": unrecognized image format (expected PNG or PGM/PPM)");
}

Image read_image(const std::filesystem::path& path) {
    Image img = to_grayscale(read_raster(path));
    if (!img.all_finite()) throw FormatError(path.string() + ": non-finite intensities");
    return img;
}

void write_png(const std::filesystem::path& path, const Image& img, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) throw ConfigError("png bit depth must be 8 or 16");
    const std::size_t bps = bit_depth / 8;
    const std::size_t rowbytes = static_cast<std::size_t>(img.width()) * bps;
    std::vector<png_byte> buffer(rowbytes * img.height());
    const double maxval = bit_depth == 16 ? 65535.0 : 255.0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const std::uint16_t q = quantize(img(x, y), maxval);
            png_byte* dst = buffer.data() + rowbytes * y + bps * x;
            if (bps == 2) {
                dst[0] = static_cast<png_byte>(q >> 8);
                dst[1] = static_cast<png_byte>(q & 0xff);
            } else {
                dst[0] = static_cast<png_byte>(q);
            }
        }
    write_png_rows(path, img.width(), img.height(), PNG_COLOR_TYPE_GRAY, bit_depth, buffer, rowbytes);
}

void write_png(const std::filesystem::path& path, const RgbImage& img) {
    const std::size_t rowbytes = static_cast<std::size_t>(img.width) * 3;
    std::vector<png_byte> buffer(img.data.begin(), img.data.end());
    write_png_rows(path, img.width, img.height, PNG_COLOR_TYPE_RGB, 8, buffer, rowbytes);
}

void write_pgm(const std::filesystem::path& path, const Image& img, int maxval) {
    if (maxval != 255 && maxval != 65535) throw ConfigError("pgm maxval must be 255 or 65535");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << img.width() << ' ' << img.height() << '\n' << maxval << '\n';
    for (std::size_t i = 0; i < img.size(); ++i) {
        const std::uint16_t q = quantize(img[i], maxval);
        if (maxval == 65535) out.put(static_cast<char>(q >> 8));
        out.put(static_cast<char>(q & 0xff));
    }
    if (!out) throw IoError("write failed for " + path.string());
}

} // namespace lcmflow

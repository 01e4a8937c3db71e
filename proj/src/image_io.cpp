// Copyright 2026 The bayermc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bayermc/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <vector>

namespace bayermc {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) {
        throw IoError(path.string(), std::string("cannot open for ") + (mode[0] == 'r' ? "reading" : "writing"));
    }
    return f;
}

// Decoded PNG/PNM raster: samples interleaved per pixel.
struct Raster {
    int width = 0;
    int height = 0;
    int channels = 0;
    int bit_depth = 8;
    std::uint16_t maxval = 255;
    std::vector<std::uint16_t> samples;
};

void png_error_to_jmp(png_structp png, png_const_charp) { std::longjmp(png_jmpbuf(png), 1); }
void png_warning_ignore(png_structp, png_const_charp) {}

Raster read_png(const std::filesystem::path& path) {
    FilePtr f = open_file(path, "rb");
    unsigned char sig[8] = {};
    if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw IoError(path.string(), "malformed header: not a PNG file");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_to_jmp, png_warning_ignore);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path.string(), "libpng initialisation failed");
    }
    Raster raster;
    std::vector<png_byte> bytes;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path.string(), "malformed PNG data");
    }
    png_init_io(png, f.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const png_byte color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (depth == 16) png_set_swap(png);
    png_read_update_info(png, info);

    raster.width = static_cast<int>(png_get_image_width(png, info));
    raster.height = static_cast<int>(png_get_image_height(png, info));
    raster.channels = png_get_channels(png, info);
    raster.bit_depth = png_get_bit_depth(png, info);
    raster.maxval = raster.bit_depth == 16 ? 65535 : 255;
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    bytes.resize(rowbytes * static_cast<std::size_t>(raster.height));
    rows.resize(static_cast<std::size_t>(raster.height));
    for (int y = 0; y < raster.height; ++y) rows[y] = bytes.data() + rowbytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    const std::size_t n = static_cast<std::size_t>(raster.width) * raster.height * raster.channels;
    raster.samples.resize(n);
    if (raster.bit_depth == 16) {
        for (std::size_t i = 0; i < n; ++i) {
            raster.samples[i] = static_cast<std::uint16_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
        }
    } else {
        std::copy(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(n), raster.samples.begin());
    }
    return raster;
}

void write_png(const std::filesystem::path& path, int width, int height, int channels, bool sixteen,
               const std::vector<std::uint16_t>& samples) {
    FilePtr f = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_to_jmp, png_warning_ignore);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError(path.string(), "libpng initialisation failed");
    }
    const int bps = sixteen ? 2 : 1;
    std::vector<png_byte> bytes(static_cast<std::size_t>(width) * height * channels * bps);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (sixteen) {
            bytes[2 * i] = static_cast<png_byte>(samples[i] >> 8);
            bytes[2 * i + 1] = static_cast<png_byte>(samples[i] & 0xff);
        } else {
            bytes[i] = static_cast<png_byte>(samples[i]);
        }
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    const std::size_t rowbytes = static_cast<std::size_t>(width) * channels * bps;
    for (int y = 0; y < height; ++y) rows[y] = bytes.data() + rowbytes * y;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError(path.string(), "PNG encoding failed");
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), sixteen ? 16 : 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// Netpbm token reader: skips whitespace and '#' comments.
int read_pnm_int(std::istream& in, const std::filesystem::path& path) {
    int c = in.peek();
    while (in && (std::isspace(c) || c == '#')) {
        if (c == '#') {
            std::string ignored;
            std::getline(in, ignored);
        } else {
            in.get();
        }
        c = in.peek();
    }
    int value = 0;
    if (!(in >> value) || value <= 0) {
        throw IoError(path.string(), "malformed header");
    }
    return value;
}

Raster read_pnm(const std::filesystem::path& path, char expected_magic) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    char magic[2] = {};
    in.read(magic, 2);
    if (!in || magic[0] != 'P') throw IoError(path.string(), "malformed header: not a binary PNM file");
    if (magic[1] == '6' && expected_magic == '5') {
        throw IoError(path.string(), "expected single channel, found a 3-channel PPM");
    }
    if (magic[1] != expected_magic) {
        throw IoError(path.string(), std::string("malformed header: expected P") + expected_magic);
    }
    Raster raster;
    raster.channels = expected_magic == '6' ? 3 : 1;
    raster.width = read_pnm_int(in, path);
    raster.height = read_pnm_int(in, path);
    const int maxval = read_pnm_int(in, path);
    if (maxval > 65535) throw IoError(path.string(), "malformed header: maxval > 65535");
    raster.maxval = static_cast<std::uint16_t>(maxval);
    raster.bit_depth = maxval > 255 ? 16 : 8;
    in.get(); // single whitespace after maxval
    const std::size_t n = static_cast<std::size_t>(raster.width) * raster.height * raster.channels;
    const int bps = raster.bit_depth == 16 ? 2 : 1;
    std::vector<unsigned char> bytes(n * bps);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
        throw IoError(path.string(), "truncated pixel data");
    }
    raster.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        raster.samples[i] = bps == 2 ? static_cast<std::uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]) : bytes[i];
        if (raster.samples[i] > raster.maxval) throw IoError(path.string(), "sample exceeds maxval");
    }
    return raster;
}

void write_pnm(const std::filesystem::path& path, char magic, int width, int height, int channels,
               std::uint16_t maxval, const std::vector<std::uint16_t>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << 'P' << magic << '\n' << width << ' ' << height << '\n' << maxval << '\n';
    const bool wide = maxval > 255;
    std::vector<unsigned char> bytes(samples.size() * (wide ? 2 : 1));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (wide) {
            bytes[2 * i] = static_cast<unsigned char>(samples[i] >> 8);
            bytes[2 * i + 1] = static_cast<unsigned char>(samples[i] & 0xff);
        } else {
            bytes[i] = static_cast<unsigned char>(samples[i]);
        }
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    (void)channels;
    if (!out) throw IoError(path.string(), "write failed");
}

PixelPlane channel_plane(const Raster& raster, int channel) {
    PixelPlane plane(raster.height, raster.width);
    for (int y = 0; y < raster.height; ++y) {
        for (int x = 0; x < raster.width; ++x) {
            plane(y, x) = raster.samples[(static_cast<std::size_t>(y) * raster.width + x) * raster.channels + channel];
        }
    }
    return plane;
}

std::vector<std::uint16_t> plane_samples(const PixelPlane& plane) {
    std::vector<std::uint16_t> out(static_cast<std::size_t>(plane.size()));
    Eigen::Map<PixelPlane>(out.data(), plane.rows(), plane.cols()) = plane;
    return out;
}

} // namespace

ImageFormat format_from_path(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".pgm") return ImageFormat::Pgm;
    if (ext == ".png") return ImageFormat::Png;
    throw IoError(path.string(), "unrecognised image extension '" + ext + "'");
}

Frame load_frame(const std::filesystem::path& path, ImageFormat format, FrameKind kind) {
    Raster raster = format == ImageFormat::Pgm ? read_pnm(path, '5') : read_png(path);
    if (raster.channels != 1) {
        throw IoError(path.string(), "expected single channel, found " + std::to_string(raster.channels));
    }
    try {
        return Frame(channel_plane(raster, 0), kind, raster.maxval);
    } catch (const ShapeError& e) {
        throw IoError(path.string(), e.what());
    }
}

Frame load_frame(const std::filesystem::path& path, FrameKind kind) {
    return load_frame(path, format_from_path(path), kind);
}

void save_frame(const Frame& frame, const std::filesystem::path& path, ImageFormat format) {
    const auto samples = plane_samples(frame.data());
    if (format == ImageFormat::Pgm) {
        write_pnm(path, '5', frame.width(), frame.height(), 1, frame.max_value(), samples);
    } else {
        write_png(path, frame.width(), frame.height(), 1, frame.is_16bit(), samples);
    }
}

void save_frame(const Frame& frame, const std::filesystem::path& path) {
    save_frame(frame, path, format_from_path(path));
}

RgbImage load_rgb(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    Raster raster = (ext == ".ppm") ? read_pnm(path, '6') : read_png(path);
    if (raster.channels < 3) {
        throw IoError(path.string(), "expected an RGB image, found " + std::to_string(raster.channels) + " channel(s)");
    }
    RgbImage image;
    image.max_value = raster.maxval;
    for (int c = 0; c < 3; ++c) image.channels[c] = channel_plane(raster, c);
    return image;
}

void save_rgb_ppm(const RgbImage& image, const std::filesystem::path& path) {
    const auto& r = image.channels[0];
    std::vector<std::uint16_t> samples(static_cast<std::size_t>(r.size()) * 3);
    for (Eigen::Index y = 0; y < r.rows(); ++y) {
        for (Eigen::Index x = 0; x < r.cols(); ++x) {
            for (int c = 0; c < 3; ++c) {
                samples[(static_cast<std::size_t>(y) * r.cols() + x) * 3 + c] = image.channels[c](y, x);
            }
        }
    }
    write_pnm(path, '6', static_cast<int>(r.cols()), static_cast<int>(r.rows()), 3, image.max_value, samples);
}

namespace {

LabelMap make_labels(const std::filesystem::path& path, ClassPlane classes, std::optional<int> num_classes) {
    try {
        return num_classes ? LabelMap(std::move(classes), *num_classes) : LabelMap::infer(std::move(classes));
    } catch (const ShapeError& e) {
        throw IoError(path.string(), e.what());
    }
}

} // namespace

LabelMap load_labels(const std::filesystem::path& path, std::optional<int> num_classes) {
    Raster raster = read_png(path);
    if (raster.channels != 1) {
        throw IoError(path.string(), "expected single channel, found " + std::to_string(raster.channels));
    }
    if (raster.bit_depth != 8) {
        throw IoError(path.string(), "label maps must be 8-bit");
    }
    return make_labels(path, channel_plane(raster, 0).cast<std::uint8_t>(), num_classes);
}

LabelMap load_labels_raw(const std::filesystem::path& path, int width, int height, std::optional<int> num_classes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    ClassPlane classes(height, width);
    in.read(reinterpret_cast<char*>(classes.data()), static_cast<std::streamsize>(classes.size()));
    if (in.gcount() != classes.size() || in.peek() != std::char_traits<char>::eof()) {
        throw IoError(path.string(), "raw label size does not match " + std::to_string(width) + "x" +
                                         std::to_string(height));
    }
    return make_labels(path, std::move(classes), num_classes);
}

void save_labels(const LabelMap& labels, const std::filesystem::path& path, LabelFormat format) {
    if (format == LabelFormat::RawU8) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError(path.string(), "cannot open for writing");
        out.write(reinterpret_cast<const char*>(labels.classes().data()),
                  static_cast<std::streamsize>(labels.classes().size()));
        if (!out) throw IoError(path.string(), "write failed");
        return;
    }
    write_png(path, labels.width(), labels.height(), 1, false, plane_samples(labels.classes().cast<std::uint16_t>()));
}

} // namespace bayermc

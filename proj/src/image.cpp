// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sflf/image.hpp"

#include <png.h>
#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "sflf/error.hpp"

namespace sflf {

double linear_to_srgb(double linear) {
    if (!(linear > 0.0)) return 0.0;
    if (linear >= 1.0) return 1.0;
    return linear <= 0.0031308 ? 12.92 * linear : 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
}

double srgb_to_linear(double encoded) {
    if (!(encoded > 0.0)) return 0.0;
    if (encoded >= 1.0) return 1.0;
    return encoded <= 0.04045 ? encoded / 12.92 : std::pow((encoded + 0.055) / 1.055, 2.4);
}

std::uint8_t encode_srgb8(double linear) {
    return static_cast<std::uint8_t>(std::lround(linear_to_srgb(linear) * 255.0));
}

Rgba8Image to_srgb8(const Image &image, std::span<const std::uint8_t> coverage) {
    SFLF_REQUIRE(coverage.empty() || coverage.size() == image.pixels.size(), "coverage mask size mismatch");
    Rgba8Image out{image.width, image.height, std::vector<std::uint8_t>(image.pixels.size() * 4)};
    for (std::size_t k = 0; k < image.pixels.size(); ++k) {
        std::uint8_t *px = out.rgba.data() + 4 * k;
        const bool covered = coverage.empty() || coverage[k] != 0;
        if (!covered) continue;
        const Rgb &c = image.pixels[k];
        px[0] = encode_srgb8(c.r);
        px[1] = encode_srgb8(c.g);
        px[2] = encode_srgb8(c.b);
        px[3] = 255;
    }
    return out;
}

Image from_srgb8(const Rgba8Image &image) {
    Image out(image.width, image.height);
    for (std::size_t k = 0; k < out.pixels.size(); ++k) {
        const std::uint8_t *px = image.rgba.data() + 4 * k;
        out.pixels[k] = {srgb_to_linear(px[0] / 255.0), srgb_to_linear(px[1] / 255.0), srgb_to_linear(px[2] / 255.0)};
    }
    return out;
}

namespace {

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
    auto *out = static_cast<std::vector<std::uint8_t> *>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

void flush_nothing(png_structp) {}

}  // namespace

std::vector<std::uint8_t> encode_png(const Rgba8Image &image) {
    SFLF_REQUIRE(image.width > 0 && image.height > 0, "cannot encode an empty image");
    SFLF_REQUIRE(image.rgba.size() == std::size_t{image.width} * image.height * 4, "RGBA buffer size mismatch");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("PNG encoder allocation failed");
    }
    std::vector<std::uint8_t> out;
    std::vector<png_const_bytep> rows(image.height);
    for (std::uint32_t y = 0; y < image.height; ++y) rows[y] = image.rgba.data() + std::size_t{y} * image.width * 4;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("PNG encode failed");
    }
    png_set_write_fn(png, &out, append_bytes, flush_nothing);
    // Frames are served interactively: favour speed over size.
    png_set_compression_level(png, Z_BEST_SPEED);
    png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_SUB);
    png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGBA, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_BASE, PNG_FILTER_TYPE_BASE);
    png_set_rows(png, info, const_cast<png_bytepp>(rows.data()));
    png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

Rgba8Image decode_png(std::span<const std::uint8_t> bytes) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size()))
        throw std::runtime_error(std::string("PNG decode failed: ") + png.message);
    png.format = PNG_FORMAT_RGBA;
    Rgba8Image out{png.width, png.height, std::vector<std::uint8_t>(PNG_IMAGE_SIZE(png))};
    if (!png_image_finish_read(&png, nullptr, out.rgba.data(), 0, nullptr)) {
        png_image_free(&png);
        throw std::runtime_error(std::string("PNG decode failed: ") + png.message);
    }
    return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path &path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace sflf

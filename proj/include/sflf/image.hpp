// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SFLF_IMAGE_HPP
#define SFLF_IMAGE_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sflf/vec.hpp"

namespace sflf {

// Linear RGB image, row-major, row 0 at the top.
struct Image {
    std::uint32_t width = 0, height = 0;
    std::vector<Rgb> pixels;

    Image() = default;
    Image(std::uint32_t w, std::uint32_t h, Rgb fill = {}) : width(w), height(h), pixels(std::size_t{w} * h, fill) {}

    Rgb &at(std::uint32_t x, std::uint32_t y) { return pixels[std::size_t{y} * width + x]; }
    const Rgb &at(std::uint32_t x, std::uint32_t y) const { return pixels[std::size_t{y} * width + x]; }
};

// 8-bit RGBA, sRGB-encoded colour, row-major.
struct Rgba8Image {
    std::uint32_t width = 0, height = 0;
    std::vector<std::uint8_t> rgba;

    const std::uint8_t *pixel(std::uint32_t x, std::uint32_t y) const {
        return rgba.data() + 4 * (std::size_t{y} * width + x);
    }
};

double linear_to_srgb(double linear);
double srgb_to_linear(double encoded);
std::uint8_t encode_srgb8(double linear);

// Converts linear pixels to 8-bit sRGB. When `coverage` is non-empty, alpha
// is 255 where coverage is set and 0 elsewhere (and RGB is zeroed there);
// otherwise alpha is 255 everywhere.
Rgba8Image to_srgb8(const Image &image, std::span<const std::uint8_t> coverage = {});

// Inverse of the colour part of to_srgb8.
Image from_srgb8(const Rgba8Image &image);

// PNG, 8-bit RGBA, fixed encoder settings so equal images give equal bytes.
std::vector<std::uint8_t> encode_png(const Rgba8Image &image);
// Accepts any PNG libpng can read; output is expanded to 8-bit RGBA.
Rgba8Image decode_png(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path &path);
void write_file(const std::filesystem::path &path, std::span<const std::uint8_t> bytes);

}  // namespace sflf

#endif  // SFLF_IMAGE_HPP

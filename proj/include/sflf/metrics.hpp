// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SFLF_METRICS_HPP
#define SFLF_METRICS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sflf/image.hpp"
#include "sflf/render.hpp"

namespace sflf {

struct SsimParams {
    int window = 11;  // Gaussian taps per axis, odd
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;

    void validate() const;
};

struct GrayImage {
    std::uint32_t width = 0, height = 0;
    std::vector<double> values;

    double at(std::uint32_t x, std::uint32_t y) const { return values[std::size_t{y} * width + x]; }
};

// Rec. 709 luma of the sRGB-encoded channels, in [0, 1].
GrayImage luma(const Rgba8Image &image);

// Per-pixel SSIM. Local means and (co)variances use the Gaussian window
// restricted to masked pixels (normalised convolution), so unmasked pixels
// never influence the result. Entries outside the mask are NaN. An empty
// mask selects every pixel.
std::vector<double> ssim_map(const GrayImage &a, const GrayImage &b, std::span<const std::uint8_t> mask,
                             const SsimParams &params = {});

// Mean of ssim_map over the mask. Throws ContractViolation on a size
// mismatch or an empty mask.
double ssim(const GrayImage &a, const GrayImage &b, std::span<const std::uint8_t> mask = {},
            const SsimParams &params = {});

struct CompareReport {
    double ssim = 0.0;
    std::uint64_t masked_pixels = 0;
    double mae = 0.0;  // mean |a - b| over masked pixels and RGB channels, sRGB units in [0, 1]

    std::string to_json() const;
};

// Metrics over mask pixels of two 8-bit sRGB images.
CompareReport compare_images(const Rgba8Image &a, const Rgba8Image &b, std::span<const std::uint8_t> mask,
                             const SsimParams &params = {});

// Alpha channel of `image` as a mask (alpha != 0).
std::vector<std::uint8_t> mask_from_alpha(const Rgba8Image &image);

// Compares a rendered frame with a linear reference over covered pixels.
// Both sides are quantised to 8-bit sRGB first, exactly as their PNGs
// would be. Throws ContractViolation when nothing is covered.
CompareReport compare(const FrameResult &frame, const Image &reference, const SsimParams &params = {});

}  // namespace sflf

#endif  // SFLF_METRICS_HPP

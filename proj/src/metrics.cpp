// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sflf/metrics.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"
#include "sflf/error.hpp"

namespace sflf {

namespace {

// Zero-padded separable convolution with a symmetric kernel.
std::vector<double> blur(const std::vector<double> &src, std::uint32_t w, std::uint32_t h,
                         const std::vector<double> &kernel) {
    const int r = static_cast<int>(kernel.size() / 2);
    std::vector<double> tmp(src.size(), 0.0), out(src.size(), 0.0);
    for (std::uint32_t y = 0; y < h; ++y) {
        for (std::uint32_t x = 0; x < w; ++x) {
            double s = 0.0;
            for (int k = -r; k <= r; ++k) {
                const long xx = static_cast<long>(x) + k;
                if (xx < 0 || xx >= static_cast<long>(w)) continue;
                s += kernel[k + r] * src[std::size_t{y} * w + xx];
            }
            tmp[std::size_t{y} * w + x] = s;
        }
    }
    for (std::uint32_t y = 0; y < h; ++y) {
        for (std::uint32_t x = 0; x < w; ++x) {
            double s = 0.0;
            for (int k = -r; k <= r; ++k) {
                const long yy = static_cast<long>(y) + k;
                if (yy < 0 || yy >= static_cast<long>(h)) continue;
                s += kernel[k + r] * tmp[yy * w + x];
            }
            out[std::size_t{y} * w + x] = s;
        }
    }
    return out;
}

bool selected(std::span<const std::uint8_t> mask, std::size_t k) { return mask.empty() || mask[k] != 0; }

}  // namespace

void SsimParams::validate() const {
    SFLF_REQUIRE(window >= 3 && window % 2 == 1, "SSIM window must be odd and >= 3");
    SFLF_REQUIRE(sigma > 0.0, "SSIM sigma must be > 0");
    SFLF_REQUIRE(k1 > 0.0 && k2 > 0.0, "SSIM constants must be > 0");
    SFLF_REQUIRE(dynamic_range > 0.0, "SSIM dynamic range must be > 0");
}

GrayImage luma(const Rgba8Image &image) {
    GrayImage out{image.width, image.height, std::vector<double>(std::size_t{image.width} * image.height)};
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        const std::uint8_t *px = image.rgba.data() + 4 * k;
        out.values[k] = (0.2126 * px[0] + 0.7152 * px[1] + 0.0722 * px[2]) / 255.0;
    }
    return out;
}

std::vector<double> ssim_map(const GrayImage &a, const GrayImage &b, std::span<const std::uint8_t> mask,
                             const SsimParams &params) {
    params.validate();
    SFLF_REQUIRE(a.width == b.width && a.height == b.height, "SSIM inputs differ in size");
    SFLF_REQUIRE(a.values.size() == std::size_t{a.width} * a.height && b.values.size() == a.values.size(),
                 "SSIM image buffer size mismatch");
    SFLF_REQUIRE(mask.empty() || mask.size() == a.values.size(), "SSIM mask size mismatch");

    const std::size_t count = a.values.size();
    const int r = params.window / 2;
    std::vector<double> kernel(params.window);
    for (int k = -r; k <= r; ++k) kernel[k + r] = std::exp(-(k * k) / (2.0 * params.sigma * params.sigma));

    std::vector<double> m(count), ma(count), mb(count), maa(count), mbb(count), mab(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double w = selected(mask, k) ? 1.0 : 0.0;
        const double va = a.values[k], vb = b.values[k];
        m[k] = w;
        ma[k] = w * va;
        mb[k] = w * vb;
        maa[k] = w * va * va;
        mbb[k] = w * vb * vb;
        mab[k] = w * va * vb;
    }
    const auto wsum = blur(m, a.width, a.height, kernel);
    const auto sa = blur(ma, a.width, a.height, kernel);
    const auto sb = blur(mb, a.width, a.height, kernel);
    const auto saa = blur(maa, a.width, a.height, kernel);
    const auto sbb = blur(mbb, a.width, a.height, kernel);
    const auto sab = blur(mab, a.width, a.height, kernel);

    const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
    const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);
    std::vector<double> out(count, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < count; ++k) {
        if (!selected(mask, k)) continue;
        const double mu_a = sa[k] / wsum[k], mu_b = sb[k] / wsum[k];
        const double var_a = saa[k] / wsum[k] - mu_a * mu_a;
        const double var_b = sbb[k] / wsum[k] - mu_b * mu_b;
        const double cov = sab[k] / wsum[k] - mu_a * mu_b;
        out[k] = ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                 ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
    }
    return out;
}

double ssim(const GrayImage &a, const GrayImage &b, std::span<const std::uint8_t> mask, const SsimParams &params) {
    const auto map = ssim_map(a, b, mask, params);
    double sum = 0.0;
    std::uint64_t n = 0;
    for (std::size_t k = 0; k < map.size(); ++k) {
        if (!selected(mask, k)) continue;
        sum += map[k];
        ++n;
    }
    SFLF_REQUIRE(n > 0, "SSIM mask selects no pixels");
    return sum / static_cast<double>(n);
}

std::string CompareReport::to_json() const {
    nlohmann::ordered_json j;
    j["ssim"] = ssim;
    j["masked_pixels"] = masked_pixels;
    j["mae"] = mae;
    j["cwssim"] = nullptr;  // reserved
    return j.dump();
}

std::vector<std::uint8_t> mask_from_alpha(const Rgba8Image &image) {
    std::vector<std::uint8_t> mask(std::size_t{image.width} * image.height);
    for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = image.rgba[4 * k + 3] != 0 ? 1 : 0;
    return mask;
}

CompareReport compare_images(const Rgba8Image &a, const Rgba8Image &b, std::span<const std::uint8_t> mask,
                             const SsimParams &params) {
    SFLF_REQUIRE(a.width == b.width && a.height == b.height, "compared images differ in size");
    CompareReport report;
    double abs_sum = 0.0;
    const std::size_t count = std::size_t{a.width} * a.height;
    for (std::size_t k = 0; k < count; ++k) {
        if (!selected(mask, k)) continue;
        ++report.masked_pixels;
        for (int c = 0; c < 3; ++c) abs_sum += std::abs(a.rgba[4 * k + c] - b.rgba[4 * k + c]) / 255.0;
    }
    SFLF_REQUIRE(report.masked_pixels > 0, "no covered pixels to compare");
    report.mae = abs_sum / (3.0 * static_cast<double>(report.masked_pixels));
    report.ssim = ssim(luma(a), luma(b), mask, params);
    return report;
}

CompareReport compare(const FrameResult &frame, const Image &reference, const SsimParams &params) {
    SFLF_REQUIRE(frame.image.width == reference.width && frame.image.height == reference.height,
                 "frame and reference differ in size");
    const Rgba8Image a = to_srgb8(frame.image, frame.coverage);
    const Rgba8Image b = to_srgb8(reference);
    return compare_images(a, b, frame.coverage, params);
}

}  // namespace sflf

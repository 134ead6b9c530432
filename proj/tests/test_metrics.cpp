// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "sflf/error.hpp"
#include "sflf/image.hpp"
#include "sflf/metrics.hpp"

using namespace sflf;

namespace {

Rgba8Image fixture(const std::string &name) { return decode_png(read_file(std::string(SFLF_FIXTURE_DIR) + "/" + name)); }

GrayImage noise(std::uint32_t w, std::uint32_t h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GrayImage g{w, h, std::vector<double>(std::size_t{w} * h)};
    for (auto &v : g.values) v = u(rng);
    return g;
}

GrayImage constant(std::uint32_t w, std::uint32_t h, double v) {
    return GrayImage{w, h, std::vector<double>(std::size_t{w} * h, v)};
}

// Mean SSIM over pixels at least `border` away from every edge.
double interior_mean(const std::vector<double> &map, std::uint32_t w, std::uint32_t h, std::uint32_t border) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::uint32_t y = border; y + border < h; ++y)
        for (std::uint32_t x = border; x + border < w; ++x, ++n) sum += map[std::size_t{y} * w + x];
    return sum / static_cast<double>(n);
}

}  // namespace

TEST_CASE("SSIM of an image with itself is exactly one") {
    const GrayImage a = noise(40, 30, 1);
    CHECK(ssim(a, a) == 1.0);
    const Rgba8Image img = fixture("astronaut_a.png");
    CHECK(compare_images(img, img, {}).ssim == 1.0);
}

TEST_CASE("SSIM of constant images has a closed form") {
    const SsimParams p;
    const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
    for (auto [va, vb] : {std::pair{0.2, 0.7}, std::pair{0.0, 1.0}, std::pair{0.5, 0.5}, std::pair{0.9, 0.1}}) {
        const double expected = (2.0 * va * vb + c1) / (va * va + vb * vb + c1);
        CHECK(ssim(constant(20, 20, va), constant(20, 20, vb)) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("SSIM is symmetric") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const GrayImage a = noise(33, 21, seed), b = noise(33, 21, seed + 100);
        CHECK(std::abs(ssim(a, b) - ssim(b, a)) < 1e-9);
    }
}

TEST_CASE("SSIM of an image and its negative is negative") {
    const GrayImage a = noise(32, 32, 7);
    GrayImage inv = a;
    for (auto &v : inv.values) v = 1.0 - v;
    CHECK(ssim(a, inv) < 0.0);
}

TEST_CASE("SSIM matches the scikit-image reference on fixtures") {
    // Interior means from make_ssim_fixtures.py.
    const std::pair<const char *, double> cases[] = {
        {"gradient", 0.6150970425976884}, {"checker", 0.37883659492510285}, {"astronaut", 0.885885790971322}};
    for (const auto &[name, expected] : cases) {
        CAPTURE(name);
        const GrayImage a = luma(fixture(std::string(name) + "_a.png"));
        const GrayImage b = luma(fixture(std::string(name) + "_b.png"));
        const auto map = ssim_map(a, b, {});
        CHECK(interior_mean(map, a.width, a.height, 5) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("masked SSIM ignores pixels outside the mask") {
    const GrayImage a = noise(48, 40, 11), b = noise(48, 40, 12);
    std::vector<std::uint8_t> mask(a.values.size(), 0);
    for (std::uint32_t y = 8; y < 30; ++y)
        for (std::uint32_t x = 5; x < 40; ++x) mask[std::size_t{y} * 48 + x] = 1;
    const double base = ssim(a, b, mask);

    GrayImage a2 = a, b2 = b;
    std::mt19937_64 rng(13);
    for (std::size_t k = 0; k < mask.size(); ++k) {
        if (mask[k]) continue;
        a2.values[k] = static_cast<double>(rng() % 1000) / 999.0;
        b2.values[k] = static_cast<double>(rng() % 1000) / 999.0;
    }
    CHECK(ssim(a2, b2, mask) == base);

    const auto map = ssim_map(a, b, mask);
    for (std::size_t k = 0; k < mask.size(); ++k) CHECK(std::isnan(map[k]) == (mask[k] == 0));
}

TEST_CASE("SSIM contract violations") {
    const GrayImage a = noise(16, 16, 1), b = noise(16, 17, 2);
    CHECK_THROWS_AS(ssim(a, b), ContractViolation);
    CHECK_THROWS_AS(ssim(a, a, std::vector<std::uint8_t>(256, 0)), ContractViolation);
    CHECK_THROWS_AS(ssim(a, a, std::vector<std::uint8_t>(10, 1)), ContractViolation);
    SsimParams bad;
    bad.window = 4;
    CHECK_THROWS_AS(ssim(a, a, {}, bad), ContractViolation);
}

TEST_CASE("compare on frames ignores uncovered pixels") {
    FrameResult frame;
    frame.image = Image(32, 32, {0.4, 0.5, 0.6});
    frame.coverage.assign(32 * 32, 0);
    for (std::uint32_t y = 4; y < 28; ++y)
        for (std::uint32_t x = 4; x < 20; ++x) frame.coverage[y * 32 + x] = 1;
    frame.stats.covered_pixels = 24 * 16;
    Image reference(32, 32, {0.4, 0.5, 0.6});
    for (std::uint32_t y = 0; y < 32; ++y) reference.at(y % 7, y) = {0.9, 0.1, 0.2};  // some inside, some out
    const CompareReport r1 = compare(frame, reference);

    for (std::size_t p = 0; p < frame.coverage.size(); ++p) {
        if (frame.coverage[p]) continue;
        frame.image.pixels[p] = {1.0, 0.0, 1.0};
        reference.pixels[p] = {0.0, 1.0, 0.0};
    }
    const CompareReport r2 = compare(frame, reference);
    CHECK(r1.ssim == r2.ssim);
    CHECK(r1.mae == r2.mae);
    CHECK(r1.masked_pixels == 24 * 16);
    CHECK(r1.ssim < 1.0);

    const auto j = nlohmann::json::parse(r1.to_json());
    CHECK(j["ssim"].get<double>() == r1.ssim);
    CHECK(j["masked_pixels"].get<std::uint64_t>() == r1.masked_pixels);
    CHECK(j["cwssim"].is_null());
}

TEST_CASE("mask_from_alpha") {
    Rgba8Image img{2, 1, {1, 2, 3, 0, 4, 5, 6, 9}};
    CHECK(mask_from_alpha(img) == std::vector<std::uint8_t>{0, 1});
}

TEST_CASE("sRGB transfer and PNG round trip") {
    CHECK(linear_to_srgb(0.0) == 0.0);
    CHECK(linear_to_srgb(1.0) == doctest::Approx(1.0));
    CHECK(linear_to_srgb(0.0031308) == doctest::Approx(0.0404482362771082));
    CHECK(srgb_to_linear(linear_to_srgb(0.25)) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(encode_srgb8(0.5) == 188);
    CHECK(encode_srgb8(-1.0) == 0);
    CHECK(encode_srgb8(9.0) == 255);

    const Rgba8Image img = fixture("checker_a.png");
    const Rgba8Image back = decode_png(encode_png(img));
    CHECK(back.width == img.width);
    CHECK(back.rgba == img.rgba);
    CHECK_THROWS(decode_png(std::vector<std::uint8_t>{1, 2, 3}));
}

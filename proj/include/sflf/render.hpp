// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SFLF_RENDER_HPP
#define SFLF_RENDER_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "sflf/image.hpp"
#include "sflf/lightfield.hpp"
#include "sflf/ray.hpp"

namespace sflf {

// Pinhole camera. Pixel (x, y) spans [x, x+1) x [y, y+1); row 0 is the top.
struct Camera {
    Vec3 eye{0.0, -2.5, 0.0};
    Vec3 look_at{};
    Vec3 up{0.0, 0.0, 1.0};
    double vfov = 0.785398163397448;  // radians
    std::uint32_t width = 256, height = 256;

    static Camera from_degrees(const Vec3 &eye, const Vec3 &look_at, const Vec3 &up, double vfov_deg,
                               std::uint32_t width, std::uint32_t height);

    void validate() const;
    // Ray through film position (px, py) in pixel units; pixel centres are
    // at (x + 0.5, y + 0.5).
    Ray primary_ray(double px, double py) const;
};

struct SphereHits {
    Vec3 h_o;  // front hit, unit direction from the sphere center
    Vec3 h_d;  // back hit, unit direction from the sphere center
    bool eye_inside = false;
};

// Front and back intersections of `ray` with the sphere (radius, center),
// returned as unit directions from the center. Misses, tangential rays
// (discriminant within 1e-12 R^2 of zero) and spheres behind the origin give
// nullopt. If the ray starts inside the sphere, h_d is the forward hit and
// h_o the direction from the center to the ray origin (or -direction when the
// origin is the center).
std::optional<SphereHits> intersect_sphere(const Ray &ray, double radius, const Vec3 &center);

enum class SampleMode { Nearest, Filtered };

std::optional<SampleMode> parse_sample_mode(std::string_view text);
std::string_view to_string(SampleMode mode);

struct Sample {
    Rgb color;
    bool valid = false;
    std::uint32_t fetches = 0;  // texel lookups performed
};

// Texel of the nearest origin and direction lattice points. Invalid when
// the nearest origin row was not baked.
Sample sample_nearest(const LightField &field, const Vec3 &h_o, const Vec3 &h_d);

// One of the 25 (origin, direction) neighbour pairs considered by filtered
// sampling. weight is the unnormalised tent-kernel product.
struct FootprintEntry {
    std::uint32_t i = 0, j = 0;
    double weight = 0.0;
};
struct Footprint {
    std::array<FootprintEntry, 25> entries{};
    std::size_t count = 0;
    std::uint32_t nearest_i = 0, nearest_j = 0;
};
Footprint filter_footprint(const LightField &field, const Vec3 &h_o, const Vec3 &h_d);

// Weighted mix of the 5 x 5 nearest origin/direction texels. Falls back to
// the nearest texel when no stored texel has positive weight; invalid when
// the nearest origin row was not baked.
Sample sample_filtered(const LightField &field, const Vec3 &h_o, const Vec3 &h_d);

Sample sample(const LightField &field, const Vec3 &h_o, const Vec3 &h_d, SampleMode mode);

struct FrameStats {
    std::uint64_t texel_fetches = 0;
    std::uint64_t covered_pixels = 0;
    bool eye_inside = false;
};

struct FrameResult {
    Image image;                         // linear RGB, black where uncovered
    std::vector<std::uint8_t> coverage;  // 1 where the field answered
    FrameStats stats;

    double coverage_percent() const;
};

FrameResult render_frame(const LightField &field, const Camera &camera, SampleMode mode, unsigned threads = 0);

// 8-bit sRGB PNG with alpha = coverage.
std::vector<std::uint8_t> frame_png(const FrameResult &frame);

}  // namespace sflf

#endif  // SFLF_RENDER_HPP

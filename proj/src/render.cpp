// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sflf/render.hpp"

#include <array>
#include <atomic>
#include <cmath>

#include "sflf/error.hpp"
#include "sflf/parallel.hpp"
#include "sflf/sf_core.hpp"

namespace sflf {

namespace {

constexpr int kFilterNeighbors = 5;

Rgb min_rgb(const Rgb &a, const Rgb &b) { return {std::min(a.r, b.r), std::min(a.g, b.g), std::min(a.b, b.b)}; }
Rgb max_rgb(const Rgb &a, const Rgb &b) { return {std::max(a.r, b.r), std::max(a.g, b.g), std::max(a.b, b.b)}; }
Rgb clamp_rgb(const Rgb &v, const Rgb &lo, const Rgb &hi) { return min_rgb(max_rgb(v, lo), hi); }

// Camera basis, computed once per frame.
struct ViewBasis {
    Vec3 eye, forward, right, true_up;
    double tan_half, aspect, width, height;

    explicit ViewBasis(const Camera &cam)
        : eye(cam.eye),
          forward(normalize(cam.look_at - cam.eye)),
          right(normalize(cross(forward, cam.up))),
          true_up(cross(right, forward)),
          tan_half(std::tan(0.5 * cam.vfov)),
          aspect(static_cast<double>(cam.width) / static_cast<double>(cam.height)),
          width(cam.width),
          height(cam.height) {}

    Ray ray(double px, double py) const {
        const double u = (2.0 * px / width - 1.0) * tan_half * aspect;
        const double v = (1.0 - 2.0 * py / height) * tan_half;
        return {eye, normalize(forward + right * u + true_up * v)};
    }
};

// Filter supports on the unit sphere, computed once per field.
struct Supports {
    double origin, direction;

    explicit Supports(const LightField &field)
        : origin(sf::kernel_radius(field.m(), field.radius()) / field.radius()),
          direction(sf::kernel_radius(field.n(), field.radius()) / field.radius()) {}
};

// Same values as dequantize, without the division.
const std::array<double, 256> kUnorm8 = [] {
    std::array<double, 256> out{};
    for (int v = 0; v < 256; ++v) out[v] = v / 255.0;
    return out;
}();

Rgb unorm8(const Texel &t) { return {kUnorm8[t.r], kUnorm8[t.g], kUnorm8[t.b]}; }

Footprint make_footprint(const sf::NeighborList &origins, const sf::NeighborList &directions,
                         const Supports &supports) {
    Footprint fp;
    fp.nearest_i = origins[0].index;
    fp.nearest_j = directions[0].index;
    for (const auto &o : origins) {
        const double wo = sf::kernel_weight(o.distance, supports.origin);
        for (const auto &d : directions)
            fp.entries[fp.count++] = {o.index, d.index, wo * sf::kernel_weight(d.distance, supports.direction)};
    }
    return fp;
}

Sample filtered(const LightField &field, const Supports &supports, const Vec3 &h_o, const Vec3 &h_d) {
    const auto origins = sf::neighbors_k(h_o, field.m(), kFilterNeighbors);
    if (!field.row_stored(origins[0].index)) return {};
    const auto directions = sf::neighbors_k(h_d, field.n(), kFilterNeighbors);
    std::array<double, kFilterNeighbors> weight_d{};
    for (std::size_t b = 0; b < directions.size(); ++b)
        weight_d[b] = sf::kernel_weight(directions[b].distance, supports.direction);

    // Sum relative to the first contributing texel so that equal inputs
    // reproduce their value exactly. Every origin/direction pair counts as
    // one fetch, stored or not.
    Sample out;
    out.fetches = static_cast<std::uint32_t>(origins.size() * directions.size());
    double total = 0.0;
    Rgb reference, accum, lo, hi;
    Rgb nearest;
    bool have_reference = false;
    for (std::size_t a = 0; a < origins.size(); ++a) {
        const std::uint32_t i = origins[a].index;
        if (!field.row_stored(i)) continue;
        const double wo = sf::kernel_weight(origins[a].distance, supports.origin);
        for (std::size_t b = 0; b < directions.size(); ++b) {
            const Texel &t = field.texel(i, directions[b].index);
            const Rgb c = unorm8(t);
            if (a == 0 && b == 0) nearest = c;
            const double w = wo * weight_d[b];
            if (!(w > 0.0) || t.a == 0) continue;
            if (!have_reference) {
                reference = lo = hi = c;
                have_reference = true;
            }
            lo = min_rgb(lo, c);
            hi = max_rgb(hi, c);
            accum += (c - reference) * w;
            total += w;
        }
    }
    out.valid = true;
    out.color = have_reference ? clamp_rgb(reference + accum / total, lo, hi) : nearest;
    return out;
}

}  // namespace

Camera Camera::from_degrees(const Vec3 &eye, const Vec3 &look_at, const Vec3 &up, double vfov_deg,
                            std::uint32_t width, std::uint32_t height) {
    return Camera{eye, look_at, up, vfov_deg * sf::kPi / 180.0, width, height};
}

void Camera::validate() const {
    SFLF_REQUIRE(is_finite(eye) && is_finite(look_at) && is_finite(up), "camera pose must be finite");
    SFLF_REQUIRE(length(look_at - eye) > 0.0, "camera eye and look_at coincide");
    SFLF_REQUIRE(vfov > 0.0 && vfov < sf::kPi, "vertical field of view must be in (0, pi)");
    SFLF_REQUIRE(width >= 1 && height >= 1, "image size must be at least 1x1");
    SFLF_REQUIRE(length(cross(look_at - eye, up)) > 1e-12 * length(look_at - eye) * length(up),
                 "camera up vector is parallel to the view direction");
}

Ray Camera::primary_ray(double px, double py) const { return ViewBasis(*this).ray(px, py); }

std::optional<SphereHits> intersect_sphere(const Ray &ray, double radius, const Vec3 &center) {
    const Vec3 oc = ray.origin - center;
    const double b = dot(oc, ray.direction);
    const double c = dot(oc, oc) - radius * radius;
    const double disc = b * b - c;
    if (disc <= 1e-12 * radius * radius) return std::nullopt;
    const double root = std::sqrt(disc);
    const double t_far = -b + root;
    if (t_far <= 0.0) return std::nullopt;
    const double t_near = -b - root;

    SphereHits hits;
    hits.h_d = normalize(ray.at(t_far) - center);
    if (t_near > 0.0) {
        hits.h_o = normalize(ray.at(t_near) - center);
    } else {
        hits.eye_inside = true;
        const double dist = length(oc);
        hits.h_o = dist > 0.0 ? oc / dist : -ray.direction;
    }
    return hits;
}

std::optional<SampleMode> parse_sample_mode(std::string_view text) {
    if (text == "nearest") return SampleMode::Nearest;
    if (text == "filtered") return SampleMode::Filtered;
    return std::nullopt;
}

std::string_view to_string(SampleMode mode) { return mode == SampleMode::Nearest ? "nearest" : "filtered"; }

Sample sample_nearest(const LightField &field, const Vec3 &h_o, const Vec3 &h_d) {
    const std::uint32_t i = sf::inverse_nearest(h_o, field.m());
    if (!field.row_stored(i)) return {};
    const std::uint32_t j = sf::inverse_nearest(h_d, field.n());
    const auto texel = field.fetch(i, j);
    return {dequantize(*texel), true, 1};
}

Footprint filter_footprint(const LightField &field, const Vec3 &h_o, const Vec3 &h_d) {
    return make_footprint(sf::neighbors_k(h_o, field.m(), kFilterNeighbors),
                          sf::neighbors_k(h_d, field.n(), kFilterNeighbors), Supports(field));
}

Sample sample_filtered(const LightField &field, const Vec3 &h_o, const Vec3 &h_d) {
    return filtered(field, Supports(field), h_o, h_d);
}

Sample sample(const LightField &field, const Vec3 &h_o, const Vec3 &h_d, SampleMode mode) {
    return mode == SampleMode::Nearest ? sample_nearest(field, h_o, h_d) : sample_filtered(field, h_o, h_d);
}

double FrameResult::coverage_percent() const {
    if (coverage.empty()) return 0.0;
    return 100.0 * static_cast<double>(stats.covered_pixels) / static_cast<double>(coverage.size());
}

FrameResult render_frame(const LightField &field, const Camera &camera, SampleMode mode, unsigned threads) {
    camera.validate();
    FrameResult frame;
    frame.image = Image(camera.width, camera.height);
    frame.coverage.assign(std::size_t{camera.width} * camera.height, 0);
    frame.stats.eye_inside = length(camera.eye - field.center()) < field.radius();

    const ViewBasis view(camera);
    const Supports supports(field);
    std::atomic<std::uint64_t> fetches{0}, covered{0};
    parallel_for(camera.height, threads, [&](unsigned, std::uint64_t row) {
        const auto y = static_cast<std::uint32_t>(row);
        std::uint64_t row_fetches = 0, row_covered = 0;
        for (std::uint32_t x = 0; x < camera.width; ++x) {
            const Ray ray = view.ray(x + 0.5, y + 0.5);
            const auto hits = intersect_sphere(ray, field.radius(), field.center());
            if (!hits) continue;
            const Sample s = mode == SampleMode::Nearest ? sample_nearest(field, hits->h_o, hits->h_d)
                                                         : filtered(field, supports, hits->h_o, hits->h_d);
            row_fetches += s.fetches;
            if (!s.valid) continue;
            frame.image.at(x, y) = s.color;
            frame.coverage[std::size_t{y} * camera.width + x] = 1;
            ++row_covered;
        }
        fetches += row_fetches;
        covered += row_covered;
    });
    frame.stats.texel_fetches = fetches;
    frame.stats.covered_pixels = covered;
    return frame;
}

std::vector<std::uint8_t> frame_png(const FrameResult &frame) {
    return encode_png(to_srgb8(frame.image, frame.coverage));
}

}  // namespace sflf

// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sflf/tooling.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "sflf/baker.hpp"
#include "sflf/error.hpp"
#include "sflf/parallel.hpp"
#include "sflf/rng.hpp"
#include "sflf/sf_core.hpp"

namespace sflf {

namespace {

std::vector<double> parse_numbers(std::string_view text, char sep) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find(sep, pos), text.size());
        const std::string_view token = text.substr(pos, end - pos);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc() || ptr != token.data() + token.size() || token.empty())
            throw ContractViolation("malformed number '" + std::string(token) + "' in '" + std::string(text) + "'");
        out.push_back(v);
        pos = end + 1;
    }
    return out;
}

}  // namespace

Image render_ground_truth(const Scene &scene, const Camera &camera, std::uint32_t spp, std::uint64_t seed,
                          std::uint32_t max_depth, unsigned threads) {
    camera.validate();
    scene.validate();
    SFLF_REQUIRE(spp >= 1, "spp must be >= 1");
    SFLF_REQUIRE(max_depth >= 1, "max_depth must be >= 1");
    const SceneAccel accel(scene);
    Image image(camera.width, camera.height);
    parallel_for(camera.height, threads, [&](unsigned, std::uint64_t row) {
        const auto y = static_cast<std::uint32_t>(row);
        for (std::uint32_t x = 0; x < camera.width; ++x) {
            Rgb sum{};
            for (std::uint32_t s = 0; s < spp; ++s) {
                Pcg32 rng(hash_counters({seed, x, y, s}));
                const double jx = rng.uniform(), jy = rng.uniform();
                sum += trace(camera.primary_ray(x + jx, y + jy), accel, rng, max_depth);
            }
            image.at(x, y) = sum / static_cast<double>(spp);
        }
    });
    return image;
}

Scene desk_scene() {
    Scene scene;
    scene.materials = {Material{{0.8, 0.35, 0.2}, {}}, Material{{0.7, 0.68, 0.62}, {}}};
    scene.triangles = meshes::torus({0.0, 0.0, 0.0}, 0.45, 0.18, 48, 24, 0);
    const double z = -0.3, h = 0.65;
    const Vec3 a{-h, -h, z}, b{h, -h, z}, c{h, h, z}, d{-h, h, z};
    scene.triangles.push_back(Triangle{{a, b, c}, 1});
    scene.triangles.push_back(Triangle{{a, c, d}, 1});
    scene.environment = {0.8, 0.85, 1.0};
    return scene;
}

Scene furnace_scene(double radius, double albedo, double emission) {
    Scene scene;
    scene.materials = {Material{{albedo, albedo, albedo}, {emission, emission, emission}}};
    scene.triangles = meshes::icosphere({}, radius, 3, 0);
    scene.environment = {};
    return scene;
}

Camera parse_pose(std::string_view pose, double vfov_deg, std::uint32_t width, std::uint32_t height) {
    const auto v = parse_numbers(pose, ',');
    if (v.size() != 9) throw ContractViolation("pose needs 9 comma-separated numbers (eye, look_at, up)");
    Camera cam = Camera::from_degrees({v[0], v[1], v[2]}, {v[3], v[4], v[5]}, {v[6], v[7], v[8]}, vfov_deg, width,
                                      height);
    cam.validate();
    return cam;
}

std::pair<std::uint32_t, std::uint32_t> parse_size(std::string_view text) {
    const auto v = parse_numbers(text, 'x');
    if (v.size() != 2 || v[0] < 1 || v[1] < 1 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]) ||
        v[0] > 65535 || v[1] > 65535)
        throw ContractViolation("size must look like WxH with positive integers");
    return {static_cast<std::uint32_t>(v[0]), static_cast<std::uint32_t>(v[1])};
}

Vec3 parse_vec3(std::string_view text) {
    const auto v = parse_numbers(text, ',');
    if (v.size() != 3) throw ContractViolation("expected x,y,z");
    return {v[0], v[1], v[2]};
}

std::string format_pose(const Camera &camera) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", camera.eye.x,
                  camera.eye.y, camera.eye.z, camera.look_at.x, camera.look_at.y, camera.look_at.z, camera.up.x,
                  camera.up.y, camera.up.z);
    return buf;
}

Camera orbit_camera(const Vec3 &center, double distance, double azimuth, double elevation, double vfov_deg,
                    std::uint32_t width, std::uint32_t height) {
    const Vec3 offset{std::cos(elevation) * std::cos(azimuth), std::cos(elevation) * std::sin(azimuth),
                      std::sin(elevation)};
    return Camera::from_degrees(center + offset * distance, center, {0.0, 0.0, 1.0}, vfov_deg, width, height);
}

nlohmann::json write_dataset(const Scene &scene, const LightField &field, const DatasetOptions &options,
                             const std::filesystem::path &out_dir) {
    SFLF_REQUIRE(options.views >= 1, "dataset needs at least one view");
    SFLF_REQUIRE(options.min_distance > 1.0 && options.max_distance >= options.min_distance,
                 "orbit distances must exceed the field radius");
    std::filesystem::create_directories(out_dir);

    nlohmann::ordered_json manifest;
    manifest["field"] = {{"m", field.m()}, {"n", field.n()}, {"radius", field.radius()}};
    manifest["seed"] = options.seed;
    manifest["spp"] = options.spp;
    manifest["pairs"] = nlohmann::json::array();

    Pcg32 rng(hash_counters({options.seed, 0x64617461ULL}));
    constexpr double kDeg = sf::kPi / 180.0;
    for (std::uint32_t v = 0; v < options.views; ++v) {
        const double distance =
            field.radius() * (options.min_distance + rng.uniform() * (options.max_distance - options.min_distance));
        const double azimuth = 2.0 * sf::kPi * rng.uniform();
        const double elevation =
            kDeg * (options.min_elevation_deg +
                    rng.uniform() * (options.max_elevation_deg - options.min_elevation_deg));
        const Camera cam =
            orbit_camera(field.center(), distance, azimuth, elevation, options.vfov_deg, options.width, options.height);

        const FrameResult frame = render_frame(field, cam, SampleMode::Filtered, options.threads);
        const Image truth =
            render_ground_truth(scene, cam, options.spp, hash_counters({options.seed, v}), options.max_depth,
                                options.threads);

        Rgba8Image mask{cam.width, cam.height, std::vector<std::uint8_t>(frame.coverage.size() * 4)};
        for (std::size_t k = 0; k < frame.coverage.size(); ++k) {
            const std::uint8_t g = frame.coverage[k] ? 255 : 0;
            mask.rgba[4 * k] = mask.rgba[4 * k + 1] = mask.rgba[4 * k + 2] = g;
            mask.rgba[4 * k + 3] = 255;
        }

        char id[16];
        std::snprintf(id, sizeof id, "%05u", v);
        const std::string input = std::string(id) + "_input.png";
        const std::string target = std::string(id) + "_target.png";
        const std::string mask_name = std::string(id) + "_mask.png";
        write_file(out_dir / input, frame_png(frame));
        write_file(out_dir / target, encode_png(to_srgb8(truth)));
        write_file(out_dir / mask_name, encode_png(mask));

        manifest["pairs"].push_back({{"id", id},
                                     {"input", input},
                                     {"target", target},
                                     {"mask", mask_name},
                                     {"coverage_percent", frame.coverage_percent()},
                                     {"pose",
                                      {{"eye", {cam.eye.x, cam.eye.y, cam.eye.z}},
                                       {"look_at", {cam.look_at.x, cam.look_at.y, cam.look_at.z}},
                                       {"up", {cam.up.x, cam.up.y, cam.up.z}},
                                       {"fov_deg", options.vfov_deg},
                                       {"width", cam.width},
                                       {"height", cam.height}}}});
    }
    std::ofstream(out_dir / "manifest.json") << manifest.dump(2) << '\n';
    return manifest;
}

}  // namespace sflf

// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SFLF_TOOLING_HPP
#define SFLF_TOOLING_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "sflf/image.hpp"
#include "sflf/lightfield.hpp"
#include "sflf/render.hpp"
#include "sflf/scene.hpp"

namespace sflf {

// Path-traced reference: per pixel, the mean of `spp` traces through
// uniformly jittered film positions. Pixel (x, y) sample s draws from a
// stream keyed by (seed, x, y, s).
Image render_ground_truth(const Scene &scene, const Camera &camera, std::uint32_t spp, std::uint64_t seed,
                          std::uint32_t max_depth = 5, unsigned threads = 0);

// "ex,ey,ez,lx,ly,lz,ux,uy,uz" -> camera with the given fov and size.
Camera parse_pose(std::string_view pose, double vfov_deg, std::uint32_t width, std::uint32_t height);
// "WxH"
std::pair<std::uint32_t, std::uint32_t> parse_size(std::string_view text);
// "x,y,z"
Vec3 parse_vec3(std::string_view text);
std::string format_pose(const Camera &camera);

// Camera on a sphere of `distance` around `center`, z up, looking at the
// center. Angles in radians; elevation is measured from the xy plane.
Camera orbit_camera(const Vec3 &center, double distance, double azimuth, double elevation, double vfov_deg,
                    std::uint32_t width, std::uint32_t height);

// Sample scenes used by the tests and the README walkthrough.
// A torus resting above a square table top, lit by a pale sky; 2306
// triangles, all inside the unit sphere around the origin.
Scene desk_scene();
// Closed icosphere of `radius` around the origin facing a black
// environment; every face has the given albedo and emission.
Scene furnace_scene(double radius, double albedo, double emission);

struct DatasetOptions {
    std::uint32_t views = 10;
    std::uint64_t seed = 0;
    std::uint32_t spp = 1024;  // ground-truth samples per pixel
    std::uint32_t max_depth = 5;
    std::uint32_t width = 256, height = 256;
    double vfov_deg = 40.0;
    // Orbit distance range as multiples of the field radius.
    double min_distance = 2.0, max_distance = 3.5;
    // Elevation range in degrees; defaults stay in the upper hemisphere.
    double min_elevation_deg = 10.0, max_elevation_deg = 70.0;
    unsigned threads = 0;
};

// Writes, per view, `<id>_input.png` (filtered light-field frame, alpha =
// coverage), `<id>_target.png` (path-traced reference), `<id>_mask.png`
// (coverage as grey 0/255) and a `manifest.json` listing them with poses.
// Returns the manifest.
nlohmann::json write_dataset(const Scene &scene, const LightField &field, const DatasetOptions &options,
                             const std::filesystem::path &out_dir);

}  // namespace sflf

#endif  // SFLF_TOOLING_HPP

// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "sflf/baker.hpp"
#include "sflf/error.hpp"
#include "sflf/sf_core.hpp"
#include "sflf/tooling.hpp"

using namespace sflf;

namespace {

// Mean over pixels of the across-seed variance of the red channel.
double estimator_variance(const Scene &scene, const Camera &cam, std::uint32_t spp, int seeds) {
    std::vector<double> sum(std::size_t{cam.width} * cam.height, 0.0), sum2(sum.size(), 0.0);
    for (int s = 0; s < seeds; ++s) {
        const Image img = render_ground_truth(scene, cam, spp, 1000 + s * 7919ULL + spp);
        for (std::size_t p = 0; p < sum.size(); ++p) {
            sum[p] += img.pixels[p].r;
            sum2[p] += img.pixels[p].r * img.pixels[p].r;
        }
    }
    double total = 0.0;
    for (std::size_t p = 0; p < sum.size(); ++p) {
        const double mean = sum[p] / seeds;
        total += (sum2[p] - seeds * mean * mean) / (seeds - 1);
    }
    return total / static_cast<double>(sum.size());
}

}  // namespace

TEST_CASE("pose, size and vector parsing") {
    const Camera cam = parse_pose("0,-2.5,1,0,0,0,0,0,1", 45.0, 64, 32);
    CHECK(cam.eye == Vec3{0, -2.5, 1});
    CHECK(cam.up == Vec3{0, 0, 1});
    CHECK(cam.vfov == doctest::Approx(sf::kPi / 4));
    CHECK(cam.width == 64);
    CHECK(parse_pose(format_pose(cam), 45.0, 64, 32).eye == cam.eye);
    CHECK_THROWS_AS(parse_pose("0,0,1", 45.0, 8, 8), ContractViolation);
    CHECK_THROWS_AS(parse_pose("0,0,1,0,0,1,0,0,1", 45.0, 8, 8), ContractViolation);
    CHECK_THROWS_AS(parse_pose("0,-2,0,0,0,0,0,1,0", 45.0, 8, 8), ContractViolation);
    CHECK_THROWS_AS(parse_pose("0,-2,0,0,0,0,0,0,one", 45.0, 8, 8), ContractViolation);

    CHECK(parse_size("256x128") == std::pair<std::uint32_t, std::uint32_t>{256, 128});
    CHECK_THROWS_AS(parse_size("256"), ContractViolation);
    CHECK_THROWS_AS(parse_size("0x10"), ContractViolation);
    CHECK_THROWS_AS(parse_size("10.5x10"), ContractViolation);
    CHECK(parse_vec3("1,-2,3.5") == Vec3{1, -2, 3.5});
    CHECK_THROWS_AS(parse_vec3("1,2"), ContractViolation);
}

TEST_CASE("orbit_camera") {
    const Camera cam = orbit_camera({1, 2, 3}, 2.0, sf::kPi / 2, sf::kPi / 6, 40.0, 10, 10);
    CHECK(length(cam.eye - Vec3{1, 2, 3}) == doctest::Approx(2.0));
    CHECK(cam.eye.z - 3.0 == doctest::Approx(1.0));
    CHECK(cam.eye.x == doctest::Approx(1.0));
    CHECK(cam.look_at == Vec3{1, 2, 3});
    CHECK_NOTHROW(cam.validate());
}

TEST_CASE("sample scenes") {
    const Scene desk = desk_scene();
    CHECK_NOTHROW(desk.validate());
    CHECK(desk.triangles.size() <= 5000);
    CHECK(desk.max_distance_from({}) < 1.0);
    const Scene furnace = furnace_scene(2.0, 0.5, 0.25);
    CHECK_NOTHROW(furnace.validate());
    CHECK(furnace.environment == Rgb{});
    CHECK(furnace.has_emitters());
}

TEST_CASE("ground truth of an empty scene is the environment") {
    Scene empty;
    empty.environment = {0.1, 0.2, 0.3};
    const Camera cam = Camera::from_degrees({0, -3, 0}, {}, {0, 0, 1}, 40.0, 8, 8);
    const Image img = render_ground_truth(empty, cam, 3, 5);
    for (const Rgb &p : img.pixels) {
        CHECK(p.r == doctest::Approx(0.1).epsilon(1e-15));
        CHECK(p.g == doctest::Approx(0.2).epsilon(1e-15));
        CHECK(p.b == doctest::Approx(0.3).epsilon(1e-15));
    }
}

TEST_CASE("ground truth is deterministic and thread-independent") {
    const Scene desk = desk_scene();
    const Camera cam = Camera::from_degrees({0.5, -2.5, 1.0}, {}, {0, 0, 1}, 40.0, 24, 16);
    const Image a = render_ground_truth(desk, cam, 4, 9, 5, 1);
    const Image b = render_ground_truth(desk, cam, 4, 9, 5, 3);
    CHECK(a.pixels == b.pixels);
}

TEST_CASE("ground-truth variance halves when samples double") {
    const Scene desk = desk_scene();
    const Camera cam = Camera::from_degrees({0.3, -2.2, 1.2}, {0, 0, -0.1}, {0, 0, 1}, 30.0, 16, 16);
    const double v8 = estimator_variance(desk, cam, 8, 24);
    const double v16 = estimator_variance(desk, cam, 16, 24);
    REQUIRE(v16 > 0.0);
    CHECK(v8 / v16 == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("write_dataset lays out pairs and a manifest") {
    const Scene desk = desk_scene();
    BakeConfig cfg;
    cfg.m = 128;
    cfg.n = 256;
    cfg.spp = 1;
    cfg.hemisphere_only = true;
    const LightField field = bake(desk, cfg);

    DatasetOptions opts;
    opts.views = 3;
    opts.spp = 2;
    opts.width = 24;
    opts.height = 20;
    opts.seed = 4;
    const auto dir = std::filesystem::temp_directory_path() / "sflf_test_dataset";
    std::filesystem::remove_all(dir);
    const auto manifest = write_dataset(desk, field, opts, dir);
    REQUIRE(manifest["pairs"].size() == 3);
    for (const auto &pair : manifest["pairs"]) {
        for (const char *key : {"input", "target", "mask"}) {
            const auto path = dir / pair[key].get<std::string>();
            REQUIRE(std::filesystem::exists(path));
            const Rgba8Image img = decode_png(read_file(path));
            CHECK(img.width == 24);
            CHECK(img.height == 20);
        }
        const Rgba8Image input = decode_png(read_file(dir / pair["input"].get<std::string>()));
        const Rgba8Image mask = decode_png(read_file(dir / pair["mask"].get<std::string>()));
        for (std::size_t p = 0; p < std::size_t{24} * 20; ++p)
            CHECK((input.rgba[4 * p + 3] != 0) == (mask.rgba[4 * p] != 0));
        CHECK(pair["pose"]["eye"].size() == 3);
    }
    std::ifstream in(dir / "manifest.json");
    CHECK(nlohmann::json::parse(in) == manifest);

    // Same seed, same poses.
    const auto again = write_dataset(desk, field, opts, dir);
    CHECK(again["pairs"][2]["pose"] == manifest["pairs"][2]["pose"]);
}

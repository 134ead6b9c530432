// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include "doctest.h"
#include "sflf/baker.hpp"
#include "sflf/error.hpp"
#include "sflf/lightfield.hpp"
#include "sflf/rng.hpp"
#include "sflf/sf_core.hpp"
#include "sflf/tooling.hpp"

using namespace sflf;

namespace {

BakeConfig small_config() {
    BakeConfig cfg;
    cfg.m = 64;
    cfg.n = 96;
    cfg.spp = 4;
    cfg.seed = 42;
    return cfg;
}

Scene emissive_triangle(const Rgb &emission) {
    Scene s;
    s.materials = {Material{{0.0, 0.0, 0.0}, emission}};
    s.triangles = {Triangle{{Vec3{-1, -1, 5}, Vec3{1, -1, 5}, Vec3{0, 1, 5}}, 0}};
    s.environment = {0.1, 0.2, 0.3};
    return s;
}

}  // namespace

TEST_CASE("concentric_disk stays in the unit disk and covers it evenly") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int inner = 0;
    const int trials = 40000;
    double mx = 0.0, my = 0.0;
    for (int k = 0; k < trials; ++k) {
        const DiskSample d = concentric_disk(u(rng), u(rng));
        const double r = std::hypot(d.x, d.y);
        CHECK(r <= 1.0 + 1e-12);
        if (r < 0.5) ++inner;
        mx += d.x;
        my += d.y;
    }
    CHECK(static_cast<double>(inner) / trials == doctest::Approx(0.25).epsilon(0.04));
    CHECK(std::abs(mx / trials) < 0.01);
    CHECK(std::abs(my / trials) < 0.01);
    const DiskSample centre = concentric_disk(0.5, 0.5);
    CHECK(centre.x == 0.0);
    CHECK(centre.y == 0.0);
}

TEST_CASE("disk radius covers 1/M of the sphere") {
    BakeConfig cfg;
    cfg.m = 12288;
    cfg.radius = 1.0;
    CHECK(cfg.disk_radius() == doctest::Approx(0.01804219591217581).epsilon(1e-13));
    cfg.radius = 3.0;
    CHECK(cfg.disk_radius() == doctest::Approx(3.0 * 0.01804219591217581).epsilon(1e-13));
}

TEST_CASE("ray_for geometry") {
    BakeConfig cfg = small_config();
    cfg.radius = 2.0;
    cfg.center = {1.0, -1.0, 0.5};
    for (std::uint32_t i : {0u, 7u, 63u}) {
        for (std::uint32_t j : {0u, 50u, 95u}) {
            const auto ray = ray_for(i, j, cfg, {});
            REQUIRE(ray);
            const Vec3 po = sf::sf_point(i, cfg.m), pd = sf::sf_point(j, cfg.n);
            CHECK(length(ray->origin - (cfg.center + po * cfg.radius)) < 1e-12);
            CHECK(length(ray->direction - normalize(pd - po)) < 1e-12);

            const auto jittered = ray_for(i, j, cfg, {0.6, -0.8});
            const Vec3 offset = jittered->origin - ray->origin;
            CHECK(length(offset) == doctest::Approx(cfg.disk_radius()));
            CHECK(std::abs(dot(offset, po)) < 1e-12);
            CHECK(length(jittered->direction - ray->direction) < 1e-15);
        }
    }
    CHECK_THROWS_AS(ray_for(64, 0, cfg, {}), ContractViolation);
    CHECK_THROWS_AS(ray_for(0, 96, cfg, {}), ContractViolation);

    BakeConfig same = small_config();
    same.n = same.m;
    CHECK(!ray_for(5, 5, same, {}));

    BakeConfig hemi = small_config();
    hemi.hemisphere_only = true;
    CHECK_NOTHROW(ray_for(31, 0, hemi, {}));
    CHECK_THROWS_AS(ray_for(32, 0, hemi, {}), ContractViolation);
}

TEST_CASE("trace: escaping rays return the environment exactly") {
    Scene empty;
    empty.environment = {0.25, 0.5, 0.75};
    const SceneAccel accel(empty);
    Pcg32 rng(9);
    for (int k = 0; k < 10; ++k) {
        const Rgb c = trace(Ray{{0, 0, 0}, normalize(Vec3{1.0, k * 0.1, -0.3})}, accel, rng, 5);
        CHECK(c == empty.environment);
    }
}

TEST_CASE("trace: a black emitter returns its emission exactly") {
    const Scene s = emissive_triangle({2.0, 3.0, 4.0});
    const SceneAccel accel(s);
    Pcg32 rng(11);
    CHECK(trace(Ray{{0, 0, 0}, {0, 0, 1}}, accel, rng, 5) == Rgb{2.0, 3.0, 4.0});
    CHECK(trace(Ray{{0, 0, 0}, {0, 0, -1}}, accel, rng, 5) == s.environment);
}

TEST_CASE("trace: one diffuse bounce under a uniform sky") {
    // An infinite-ish floor of albedo a under sky L sees a * L.
    Scene s;
    s.materials = {Material{{0.5, 0.5, 0.5}, {}}};
    const double h = 1e4;
    s.triangles = {Triangle{{Vec3{-h, -h, 0}, Vec3{h, -h, 0}, Vec3{h, h, 0}}, 0},
                   Triangle{{Vec3{-h, -h, 0}, Vec3{h, h, 0}, Vec3{-h, h, 0}}, 0}};
    s.environment = {1.0, 1.0, 1.0};
    const SceneAccel accel(s);
    Pcg32 rng(13);
    for (int k = 0; k < 100; ++k) {
        const Rgb c = trace(Ray{{0, 0, 1}, normalize(Vec3{0.1, 0.2, -1.0})}, accel, rng, 5);
        CHECK(c.r == doctest::Approx(0.5));
    }
}

TEST_CASE("bake of an empty scene stores the quantised environment everywhere") {
    Scene empty;
    empty.environment = {0.3, 0.6, 0.9};
    BakeConfig cfg = small_config();
    BakeDiagnostics diag;
    const LightField f = bake(empty, cfg, {}, &diag);
    const Texel expected = quantize(empty.environment);
    for (const Texel &t : f.texels()) CHECK(t == expected);
    CHECK(diag.texels == std::uint64_t{cfg.m} * cfg.n);
    CHECK(diag.samples == diag.texels * cfg.spp);
    CHECK(diag.nonfinite_samples == 0);
}

TEST_CASE("bake is independent of the thread count") {
    const Scene s = desk_scene();
    BakeConfig cfg = small_config();
    cfg.hemisphere_only = true;
    BakeOptions one, many;
    one.threads = 1;
    many.threads = 5;
    const auto a = serialize(bake(s, cfg, one));
    const auto b = serialize(bake(s, cfg, many));
    CHECK(a == b);
    cfg.seed = 43;
    CHECK(serialize(bake(s, cfg, one)) != a);
}

TEST_CASE("hemisphere bakes store the upper rows only") {
    Scene empty;
    empty.environment = {1.0, 1.0, 1.0};
    BakeConfig cfg = small_config();
    cfg.hemisphere_only = true;
    const LightField f = bake(empty, cfg);
    CHECK(f.stored_rows() == cfg.m / 2);
    CHECK(f.texels().size() == std::size_t{cfg.m / 2} * cfg.n);
    for (std::uint32_t i = 0; i < f.stored_rows(); ++i) CHECK(sf::sf_z(i, cfg.m) > 0.0);
}

TEST_CASE("coincident origin and direction points give transparent texels") {
    Scene empty;
    empty.environment = {1.0, 1.0, 1.0};
    BakeConfig cfg = small_config();
    cfg.n = cfg.m;
    BakeDiagnostics diag;
    const LightField f = bake(empty, cfg, {}, &diag);
    CHECK(diag.degenerate_texels.size() == cfg.m);
    for (std::uint32_t i = 0; i < cfg.m; ++i) {
        CHECK(f.texel(i, i).a == 0);
        CHECK(f.texel(i, (i + 1) % cfg.m).a == 255);
    }
}

TEST_CASE("bake refuses geometry outside the sphere") {
    Scene s = emissive_triangle({1.0, 1.0, 1.0});
    BakeConfig cfg = small_config();
    CHECK_THROWS_AS(bake(s, cfg), BakeError);
    cfg.require_containment = false;
    CHECK_NOTHROW(bake(s, cfg));
    cfg.radius = 6.0;
    cfg.require_containment = true;
    CHECK_NOTHROW(bake(s, cfg));
}

TEST_CASE("bake validates its configuration and reports progress") {
    Scene empty;
    BakeConfig cfg = small_config();
    cfg.spp = 0;
    CHECK_THROWS_AS(bake(empty, cfg), ContractViolation);
    cfg = small_config();
    cfg.m = 1;
    CHECK_THROWS_AS(bake(empty, cfg), ContractViolation);
    cfg = small_config();
    cfg.radius = -1.0;
    CHECK_THROWS_AS(bake(empty, cfg), ContractViolation);

    cfg = small_config();
    std::uint64_t last = 0, total = 0, calls = 0;
    BakeOptions opts;
    opts.progress = [&](std::uint64_t done, std::uint64_t all) {
        CHECK(done > last);
        last = done;
        total = all;
        ++calls;
    };
    bake(empty, cfg, opts);
    CHECK(last == cfg.m);
    CHECK(total == cfg.m);
    CHECK(calls == cfg.m);
}

TEST_CASE("trace: white furnace converges to the geometric series") {
    // Closed emitting enclosure: L = e * (1 + a + ... + a^depth).
    const double e = 0.25, a = 0.5;
    const Scene s = furnace_scene(2.0, a, e);
    const SceneAccel accel(s);
    const std::uint32_t depth = 5;
    const double expected = e * (1.0 - std::pow(a, depth + 1)) / (1.0 - a);
    double sum = 0.0, peak = 0.0;
    const int samples = 20000;
    for (int k = 0; k < samples; ++k) {
        Pcg32 rng(hash_counters({3, static_cast<std::uint64_t>(k)}));
        std::mt19937_64 dirs(k);
        std::normal_distribution<double> g;
        const Ray ray{{0.1, -0.2, 0.3}, normalize(Vec3{g(dirs), g(dirs), g(dirs)})};
        const double v = trace(ray, accel, rng, depth).r;
        sum += v;
        peak = std::max(peak, v);
    }
    CHECK(sum / samples == doctest::Approx(expected).epsilon(0.005));
    // Light sampling and bounce hits are combined, so no sample blows up.
    CHECK(peak < 2.0 * expected);
}
